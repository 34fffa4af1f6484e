#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tailfuse/simlab.hpp"

namespace tailfuse {

inline constexpr const char* kCsvHeader =
    "experiment,copula,param,tau,n,transform,gamma,alpha,reps,rejections,estimate,"
    "ci_lo,ci_hi,bonf_rejections,ratio,seed";

// Fixed significant-digit decimal, locale-independent; inf/nan spelled out.
std::string format_sig(double x, int digits = 6);

void write_csv_header(std::ostream& os);
// Skipped cells (degenerate thresholds) are not emitted as data rows.
void write_csv_row(std::ostream& os, const SimResult& row);
void write_csv(std::ostream& os, const std::vector<SimResult>& rows, bool truncated);
// Marker row appended when a sweep was interrupted.
void write_csv_truncation_marker(std::ostream& os);

}  // namespace tailfuse
