#include "dasdn/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace dasdn {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string report_json(const ReportInfo& info, const DenoiseReport* report) {
  nlohmann::ordered_json j;
  j["method"] = info.method;
  j["input"] = info.input;
  j["output"] = info.output;
  j["rank_c"] = info.rank_c;
  j["window"] = info.window_size;
  j["hop"] = info.hop_size;
  if (report != nullptr) {
    j["iterations"] = info.iterations;
    j["learning_rate"] = info.learning_rate;
    j["seed"] = info.seed;
    const auto& d = report->denoised.dims();
    j["dims"] = {d[0], d[1], d[2]};
    j["norm_scale"] = report->params.norm_scale;
    j["final_loss"] = report->loss_trace.empty() ? 0.0 : report->loss_trace.back();
    j["loss_trace"] = report->loss_trace;
    j["beta"] = report->beta;
    j["gamma"] = report->gamma;
    if (!info.denoised_tensor.empty()) j["denoised_tensor"] = info.denoised_tensor;
  }
  return j.dump(2) + "\n";
}

void write_metrics_csv(std::ostream& out, const Evaluation& eval) {
  out << "channel,cc_noisy,cc_denoised,cci_db,psnr_noisy_db,psnr_denoised_db\n";
  auto row = [&out](const std::string& label, const ChannelMetrics& m) {
    out << label << ',' << format_number(m.cc_noisy) << ',' << format_number(m.cc_denoised) << ','
        << format_number(m.cci_db) << ',' << format_number(m.psnr_noisy_db) << ','
        << format_number(m.psnr_denoised_db) << '\n';
  };
  for (const auto& m : eval.channels) row(std::to_string(m.channel), m);
  row("mean", eval.mean);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "method,rank,mean_cci_db,mean_psnr_db\n";
  for (const auto& c : cells) {
    out << c.method << ',' << c.rank << ',' << format_number(c.mean_cci_db) << ','
        << format_number(c.mean_psnr_db) << '\n';
  }
}

}  // namespace dasdn
