#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dasdn/denoiser.hpp"
#include "dasdn/metrics.hpp"

namespace dasdn {

/// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);

struct ReportInfo {
  std::string method;
  std::size_t rank_c = 0;
  std::size_t window_size = 0;
  std::size_t hop_size = 0;
  std::size_t iterations = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  std::string input;
  std::string output;
  std::string denoised_tensor;  // file holding the denoised amplitude, empty if none
};

/// JSON report of a denoise run. Only deterministic content is written: wall
/// time is left out so that repeated runs produce identical bytes.
std::string report_json(const ReportInfo& info, const DenoiseReport* report);

/// channel,cc_noisy,cc_denoised,cci_db,psnr_noisy_db,psnr_denoised_db plus a mean row.
void write_metrics_csv(std::ostream& out, const Evaluation& eval);

struct SweepCell {
  std::string method;
  std::size_t rank = 0;
  double mean_cci_db = 0.0;
  double mean_psnr_db = 0.0;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

}  // namespace dasdn
