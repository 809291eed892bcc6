// dasdn: synthesize, denoise, evaluate and sweep multichannel DAS recordings.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dasdn/baselines.hpp"
#include "dasdn/error.hpp"
#include "dasdn/image.hpp"
#include "dasdn/metrics.hpp"
#include "dasdn/pipeline.hpp"
#include "dasdn/report.hpp"
#include "dasdn/synth.hpp"
#include "dasdn/tensor_io.hpp"
#include "dasdn/wav.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot create " + path.string());
  out << text;
}

dasdn::WavEncoding parse_encoding(const std::string& name) {
  if (name == "float32") return dasdn::WavEncoding::kFloat32;
  if (name == "pcm16") return dasdn::WavEncoding::kPcm16;
  throw std::invalid_argument("unknown encoding '" + name + "' (expected float32 or pcm16)");
}

dasdn::OutputMode parse_output_mode(const std::string& name) {
  if (name == "predictor") return dasdn::OutputMode::kPredictor;
  if (name == "lowrank") return dasdn::OutputMode::kLowRank;
  throw std::invalid_argument("unknown output mode '" + name + "' (expected predictor or lowrank)");
}

std::vector<double> first_channel(const dasdn::MultichannelSignal& sig) {
  const auto ch = sig.channel(0);
  return {ch.begin(), ch.end()};
}

struct SynthArgs {
  std::string config;
  std::optional<std::uint64_t> standard_seed;
  std::string out;
  std::string truth;
  std::string source_out;
  std::string noise_out;
  double noise_seconds = 30.0;
  std::string encoding = "float32";
};

int run_synth(const SynthArgs& a) {
  if (a.config.empty() == !a.standard_seed.has_value()) {
    throw std::invalid_argument("give exactly one of --config or --standard");
  }
  const dasdn::SceneConfig cfg = a.standard_seed
                                     ? dasdn::standard_scene_config(*a.standard_seed)
                                     : dasdn::parse_scene_config(read_text(a.config));
  const dasdn::SceneTruth truth = dasdn::generate(cfg);
  const auto enc = parse_encoding(a.encoding);
  dasdn::write_wav(a.out, truth.noisy, enc);
  if (!a.truth.empty()) write_text(a.truth, dasdn::truth_to_json(cfg, truth));
  if (!a.source_out.empty()) {
    const auto& s = truth.sources.front();
    dasdn::write_wav(a.source_out,
                     dasdn::MultichannelSignal(1, s.size(), cfg.sample_rate, s), enc);
  }
  if (!a.noise_out.empty()) {
    dasdn::write_wav(a.noise_out, dasdn::noise_recording(cfg, a.noise_seconds), enc);
  }
  return kExitOk;
}

struct MethodArgs {
  std::size_t rank_c = 1;
  std::size_t window = dasdn::kDefaultWindow;
  std::size_t hop = dasdn::kDefaultHop;
  std::size_t iters = dasdn::kDefaultIterations;
  double lr = dasdn::kDefaultLearningRate;
  std::uint64_t seed = 0;
  std::string noise;
  std::string output_mode = "predictor";
  bool quiet = false;
};

void add_method_options(CLI::App* app, MethodArgs& m) {
  app->add_option("--window", m.window, "STFT window length in samples")->capture_default_str();
  app->add_option("--hop", m.hop, "STFT hop in samples")->capture_default_str();
  app->add_option("--iters", m.iters, "optimizer iterations (proposed)")->capture_default_str();
  app->add_option("--lr", m.lr, "Adam learning rate (proposed)")->capture_default_str();
  app->add_option("--seed", m.seed, "initialization seed (proposed)")->capture_default_str();
  app->add_option("--noise", m.noise, "noise-only WAV for the spectral subtraction floor");
  app->add_option("--output-mode", m.output_mode,
                  "proposed output: predictor | lowrank")->capture_default_str();
  app->add_flag("--quiet", m.quiet, "suppress the iteration counter on stderr");
}

dasdn::MethodOptions method_options(const MethodArgs& m, dasdn::Method method,
                                    std::size_t channels) {
  dasdn::MethodOptions o;
  o.rank_c = m.rank_c;
  o.window_size = m.window;
  o.hop_size = m.hop;
  o.iterations = m.iters;
  o.learning_rate = m.lr;
  o.seed = m.seed;
  o.output_mode = parse_output_mode(m.output_mode);
  if (method == dasdn::Method::kSpectralSubtraction) {
    if (m.noise.empty()) throw std::invalid_argument("--method ss requires --noise");
    const auto noise = dasdn::read_wav(m.noise);
    if (noise.channels() != channels) {
      throw std::invalid_argument("noise recording has " + std::to_string(noise.channels()) +
                                  " channels, input has " + std::to_string(channels));
    }
    o.noise_floor = dasdn::estimate_noise_floor(noise, m.window, m.hop);
  }
  if (!m.quiet) {
    const std::size_t total = m.iters;
    o.progress = [total](std::size_t it, double loss) {
      if ((it + 1) % 50 == 0 || it + 1 == total) {
        std::cerr << "iter " << (it + 1) << '/' << total << " loss " << loss << '\n';
      }
    };
  }
  return o;
}

struct DenoiseArgs {
  std::string in;
  std::string method = "proposed";
  std::string out;
  std::string report;
  std::string encoding = "float32";
  MethodArgs m;
};

int run_denoise(const DenoiseArgs& a) {
  const dasdn::Method method = dasdn::parse_method(a.method);
  const auto noisy = dasdn::read_wav(a.in);
  const auto result = dasdn::run_method(noisy, method, method_options(a.m, method, noisy.channels()));
  dasdn::write_wav(a.out, result.denoised, parse_encoding(a.encoding));
  if (!a.report.empty()) {
    dasdn::ReportInfo info;
    info.method = std::string(dasdn::method_name(method));
    info.rank_c = a.m.rank_c;
    info.window_size = a.m.window;
    info.hop_size = a.m.hop;
    info.iterations = a.m.iters;
    info.learning_rate = a.m.lr;
    info.seed = a.m.seed;
    info.input = fs::path(a.in).filename().string();
    info.output = fs::path(a.out).filename().string();
    if (result.report) {
      fs::path tensor_path = a.report;
      tensor_path.replace_extension(".das3");
      dasdn::write_tensor(tensor_path, result.report->denoised);
      info.denoised_tensor = tensor_path.filename().string();
    }
    write_text(a.report, dasdn::report_json(info, result.report ? &*result.report : nullptr));
  }
  return kExitOk;
}

struct EvalArgs {
  std::string denoised;
  std::string noisy;
  std::string source;
  std::string out;
};

int run_eval(const EvalArgs& a) {
  const auto denoised = dasdn::read_wav(a.denoised);
  const auto noisy = dasdn::read_wav(a.noisy);
  const auto source = dasdn::read_wav(a.source);
  if (denoised.channels() != noisy.channels()) {
    throw std::invalid_argument("denoised has " + std::to_string(denoised.channels()) +
                                " channels, noisy has " + std::to_string(noisy.channels()));
  }
  if (source.channels() != 1) throw std::invalid_argument("source must be single-channel");
  const auto eval = dasdn::evaluate(denoised, noisy, first_channel(source));
  if (a.out.empty() || a.out == "-") {
    dasdn::write_metrics_csv(std::cout, eval);
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::invalid_argument("cannot create " + a.out);
    dasdn::write_metrics_csv(out, eval);
  }
  return kExitOk;
}

struct SweepArgs {
  std::string in;
  std::string source;
  std::vector<std::string> methods{"proposed", "svd", "tucker"};
  std::vector<std::size_t> ranks{1, 5, 10, 25, 50};
  std::string out;
  MethodArgs m;
};

int run_sweep(SweepArgs a) {
  const auto noisy = dasdn::read_wav(a.in);
  const auto source = dasdn::read_wav(a.source);
  if (source.channels() != 1) throw std::invalid_argument("source must be single-channel");
  const auto src = first_channel(source);
  std::vector<dasdn::Method> methods;
  for (const auto& name : a.methods) methods.push_back(dasdn::parse_method(name));
  for (std::size_t r : a.ranks) {
    if (r < 1 || r > noisy.channels()) {
      throw std::invalid_argument("rank " + std::to_string(r) + " outside [1, " +
                                  std::to_string(noisy.channels()) + "]");
    }
  }

  std::vector<dasdn::SweepCell> cells;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t r : a.ranks) {
      dasdn::SweepCell cell{a.methods[i], r, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()};
      try {
        MethodArgs m = a.m;
        m.rank_c = r;
        if (!m.quiet) std::cerr << "sweep: " << a.methods[i] << " rank " << r << '\n';
        const auto result =
            dasdn::run_method(noisy, methods[i], method_options(m, methods[i], noisy.channels()));
        const auto eval = dasdn::evaluate(result.denoised, noisy, src);
        cell.mean_cci_db = eval.mean.cci_db;
        cell.mean_psnr_db = eval.mean.psnr_denoised_db;
      } catch (const std::exception& e) {
        std::cerr << "warning: " << a.methods[i] << " rank " << r << " failed: " << e.what()
                  << '\n';
      }
      cells.push_back(cell);
    }
  }
  std::ofstream out(a.out);
  if (!out) throw std::invalid_argument("cannot create " + a.out);
  dasdn::write_sweep_csv(out, cells);
  return kExitOk;
}

struct SpectrogramArgs {
  std::string in;
  std::size_t channel = 0;
  std::string out;
  std::size_t window = dasdn::kDefaultWindow;
  std::size_t hop = dasdn::kDefaultHop;
};

int run_spectrogram(const SpectrogramArgs& a) {
  const auto sig = dasdn::read_wav(a.in);
  const auto mag = dasdn::magnitude(dasdn::stft(sig, a.window, a.hop));
  dasdn::export_spectrogram_image(mag, a.channel, a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Training-free low-rank denoiser for multichannel DAS recordings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dasdn 0.1.0");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic DAS scene");
  s->add_option("--config", synth.config, "scene JSON document");
  s->add_option("--standard", synth.standard_seed, "use the built-in standard scene with this seed");
  s->add_option("--out", synth.out, "noisy multichannel WAV")->required();
  s->add_option("--truth", synth.truth, "ground-truth JSON sidecar");
  s->add_option("--source-out", synth.source_out, "single-channel WAV of the first source");
  s->add_option("--noise-out", synth.noise_out, "noise-only recording with the scene's sigmas");
  s->add_option("--noise-seconds", synth.noise_seconds, "length of --noise-out")
      ->capture_default_str();
  s->add_option("--encoding", synth.encoding, "float32 | pcm16")->capture_default_str();

  DenoiseArgs den;
  auto* d = app.add_subcommand("denoise", "denoise a multichannel WAV");
  d->add_option("--in", den.in, "noisy multichannel WAV")->required();
  d->add_option("--method", den.method, "proposed | ss | svd | tucker")->capture_default_str();
  d->add_option("--rank-c", den.m.rank_c, "spatial (channel) rank")->capture_default_str();
  d->add_option("--out", den.out, "denoised WAV")->required();
  d->add_option("--report", den.report,
                "JSON report; the proposed method also writes the denoised amplitude "
                "next to it as .das3");
  d->add_option("--encoding", den.encoding, "float32 | pcm16")->capture_default_str();
  add_method_options(d, den.m);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "per-channel CC, CCi and PSNR against a source");
  e->add_option("--denoised", ev.denoised, "denoised WAV")->required();
  e->add_option("--noisy", ev.noisy, "noisy WAV")->required();
  e->add_option("--source", ev.source, "single-channel source WAV")->required();
  e->add_option("--out", ev.out, "metrics CSV ('-' for stdout)")->capture_default_str();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "mean CCi/PSNR over methods x spatial ranks");
  w->add_option("--in", sw.in, "noisy multichannel WAV")->required();
  w->add_option("--source", sw.source, "single-channel source WAV")->required();
  w->add_option("--methods", sw.methods, "comma-separated methods")
      ->delimiter(',')
      ->capture_default_str();
  w->add_option("--ranks", sw.ranks, "comma-separated spatial ranks")
      ->delimiter(',')
      ->capture_default_str();
  w->add_option("--out", sw.out, "sweep CSV")->required();
  add_method_options(w, sw.m);

  SpectrogramArgs sp;
  auto* g = app.add_subcommand("spectrogram", "export one channel's spectrogram as a P5 image");
  g->add_option("--in", sp.in, "multichannel WAV")->required();
  g->add_option("--channel", sp.channel, "zero-based channel")->capture_default_str();
  g->add_option("--out", sp.out, "PGM file")->required();
  g->add_option("--window", sp.window, "STFT window length")->capture_default_str();
  g->add_option("--hop", sp.hop, "STFT hop")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (s->parsed()) return run_synth(synth);
    if (d->parsed()) return run_denoise(den);
    if (e->parsed()) return run_eval(ev);
    if (w->parsed()) return run_sweep(sw);
    if (g->parsed()) return run_spectrogram(sp);
  } catch (const dasdn::NumericError& err) {
    std::cerr << "error: " << err.what();
    if (err.iteration()) std::cerr << " (iteration " << *err.iteration() << ')';
    std::cerr << '\n';
    return kExitNumeric;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitInternal;
  } catch (const std::exception& err) {
    // Bad flags, unreadable or malformed files, inconsistent inputs.
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
