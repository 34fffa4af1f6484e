#include "tailfuse/csv.hpp"

#include <cmath>
#include <cstdio>

namespace tailfuse {

std::string format_sig(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

void write_csv_header(std::ostream& os) { os << kCsvHeader << "\n"; }

void write_csv_row(std::ostream& os, const SimResult& r) {
  if (r.skipped) return;
  os << r.experiment << ',' << r.copula << ',' << format_sig(r.param) << ','
     << format_sig(r.tau) << ',' << r.n << ',' << r.transform << ','
     << format_sig(r.gamma) << ',' << format_sig(r.alpha) << ',' << r.reps << ','
     << r.rejections << ',' << format_sig(r.estimate) << ',' << format_sig(r.ci_lo)
     << ',' << format_sig(r.ci_hi) << ',' << r.bonf_rejections << ','
     << format_sig(r.ratio) << ',' << r.seed << "\n";
}

void write_csv_truncation_marker(std::ostream& os) {
  os << "truncated,,,,,,,,,,,,,,,\n";
}

void write_csv(std::ostream& os, const std::vector<SimResult>& rows, bool truncated) {
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
  if (truncated) write_csv_truncation_marker(os);
}

}  // namespace tailfuse
