#include "dasdn/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dasdn/wav.hpp"

namespace dasdn {

namespace {

using nlohmann::json;

enum class Stream : std::uint64_t { kSource = 1, kChannelNoise = 2, kNoiseRecording = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), static_cast<std::uint32_t>(stream), lo(index), hi(index)};
  return std::mt19937_64(seq);
}

double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller, one variate per pair of uniforms; deterministic across standard libraries.
double gaussian(std::mt19937_64& rng) {
  const double u1 = unit_open(rng);
  const double u2 = unit_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Blackman-windowed sinc band-pass with cutoffs given as fractions of the sample rate.
std::vector<double> bandpass_taps(double low, double high, std::size_t taps) {
  std::vector<double> h(taps);
  const double mid = static_cast<double>(taps - 1) / 2.0;
  for (std::size_t n = 0; n < taps; ++n) {
    const double k = static_cast<double>(n) - mid;
    const double w = 0.42 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (taps - 1)) +
                     0.08 * std::cos(4.0 * std::numbers::pi * n / (taps - 1));
    h[n] = w * (2.0 * high * sinc(2.0 * high * k) - 2.0 * low * sinc(2.0 * low * k));
  }
  return h;
}

std::vector<double> make_source(const SourceSpec& s, std::size_t n, double fs, std::uint64_t seed,
                                std::size_t index) {
  std::vector<double> x(n, 0.0);
  switch (s.kind) {
    case WaveformKind::kSine:
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency_hz * i / fs);
      }
      break;
    case WaveformKind::kChirp: {
      const double dur = static_cast<double>(n) / fs;
      const double rate = (s.end_hz - s.start_hz) / dur;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = s.amplitude *
               std::sin(2.0 * std::numbers::pi * (s.start_hz * t + 0.5 * rate * t * t));
      }
      break;
    }
    case WaveformKind::kFilteredNoise: {
      auto rng = make_rng(seed, Stream::kSource, index);
      const std::size_t taps = 513;
      const auto h = bandpass_taps(s.low_hz / fs, s.high_hz / fs, taps);
      std::vector<double> white(n + taps - 1);
      for (double& v : white) v = gaussian(rng);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < taps; ++k) acc += h[k] * white[i + taps - 1 - k];
        x[i] = acc;
        ss += acc * acc;
      }
      const double rms = std::sqrt(ss / static_cast<double>(n));
      if (rms > 0.0) {
        for (double& v : x) v *= s.amplitude / rms;
      }
      break;
    }
    case WaveformKind::kWavFile: {
      const MultichannelSignal w = read_wav(s.path);
      if (w.sample_rate() != fs) {
        throw std::invalid_argument("source wav " + s.path + " has sample rate " +
                                    std::to_string(w.sample_rate()) + ", scene expects " +
                                    std::to_string(fs));
      }
      const auto ch = w.channel(0);
      for (std::size_t i = 0; i < n && i < ch.size(); ++i) x[i] = s.amplitude * ch[i];
      break;
    }
  }
  return x;
}

const char* kind_name(WaveformKind k) {
  switch (k) {
    case WaveformKind::kSine: return "sine";
    case WaveformKind::kChirp: return "chirp";
    case WaveformKind::kFilteredNoise: return "filtered-noise";
    case WaveformKind::kWavFile: return "wav-file";
  }
  return "unknown";
}

WaveformKind parse_kind(const std::string& s) {
  if (s == "sine") return WaveformKind::kSine;
  if (s == "chirp") return WaveformKind::kChirp;
  if (s == "filtered-noise") return WaveformKind::kFilteredNoise;
  if (s == "wav-file") return WaveformKind::kWavFile;
  throw std::invalid_argument("unknown source type '" + s + "'");
}

std::vector<double> parse_profile(const json& j, std::size_t n, const char* name) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object() && j.contains("ramp")) {
    const auto r = j.at("ramp").get<std::vector<double>>();
    if (r.size() != 2) throw std::invalid_argument(std::string(name) + ".ramp needs two values");
    return linear_ramp(r[0], r[1], n);
  }
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  throw std::invalid_argument(std::string(name) + " must be an array, a number or {\"ramp\": [a, b]}");
}

json source_to_json(const SourceSpec& s) {
  json j{{"type", kind_name(s.kind)}, {"amplitude", s.amplitude}};
  switch (s.kind) {
    case WaveformKind::kSine: j["frequency_hz"] = s.frequency_hz; break;
    case WaveformKind::kChirp:
      j["start_hz"] = s.start_hz;
      j["end_hz"] = s.end_hz;
      break;
    case WaveformKind::kFilteredNoise:
      j["low_hz"] = s.low_hz;
      j["high_hz"] = s.high_hz;
      break;
    case WaveformKind::kWavFile: j["path"] = s.path; break;
  }
  return j;
}

json config_json(const SceneConfig& cfg) {
  json sources = json::array();
  for (const auto& s : cfg.sources) sources.push_back(source_to_json(s));
  return json{{"channels", cfg.channels}, {"duration_s", cfg.duration_s},
              {"sample_rate", cfg.sample_rate}, {"sources", sources},
              {"gains", cfg.gains}, {"sigmas", cfg.sigmas},
              {"delays", cfg.delays}, {"seed", cfg.seed}};
}

}  // namespace

std::size_t SceneConfig::samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

std::vector<double> linear_ramp(double first, double last, std::size_t n) {
  std::vector<double> v(n, first);
  if (n == 1) return v;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

void validate(const SceneConfig& cfg) {
  if (cfg.channels < 1) throw std::invalid_argument("scene needs at least one channel");
  if (!(cfg.sample_rate > 0.0)) throw std::invalid_argument("scene sample rate must be positive");
  if (!(cfg.duration_s > 0.0) || cfg.samples() == 0) {
    throw std::invalid_argument("scene duration must be positive");
  }
  if (cfg.sources.empty()) throw std::invalid_argument("scene needs at least one source");
  if (cfg.gains.size() != cfg.channels || cfg.sigmas.size() != cfg.channels) {
    throw std::invalid_argument("gains and sigmas must have one entry per channel");
  }
  if (!cfg.delays.empty() && cfg.delays.size() != cfg.channels) {
    throw std::invalid_argument("delays must be empty or have one entry per channel");
  }
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    if (!(cfg.gains[c] >= 0.0)) throw std::invalid_argument("gains must be >= 0");
    if (!(cfg.sigmas[c] >= 0.0)) throw std::invalid_argument("sigmas must be >= 0");
  }
  for (const auto& s : cfg.sources) {
    if (s.kind == WaveformKind::kFilteredNoise &&
        !(s.low_hz >= 0.0 && s.low_hz < s.high_hz && s.high_hz <= cfg.sample_rate / 2.0)) {
      throw std::invalid_argument("filtered-noise band must satisfy 0 <= low < high <= fs/2");
    }
  }
}

SceneTruth generate(const SceneConfig& cfg) {
  validate(cfg);
  const std::size_t n = cfg.samples();
  SceneTruth truth{MultichannelSignal(cfg.channels, n, cfg.sample_rate),
                   MultichannelSignal(cfg.channels, n, cfg.sample_rate),
                   MultichannelSignal(cfg.channels, n, cfg.sample_rate),
                   {},
                   cfg.gains,
                   cfg.sigmas,
                   cfg.delays.empty() ? std::vector<std::size_t>(cfg.channels, 0) : cfg.delays};
  for (std::size_t s = 0; s < cfg.sources.size(); ++s) {
    truth.sources.push_back(make_source(cfg.sources[s], n, cfg.sample_rate, cfg.seed, s));
  }
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    auto clean = truth.clean.channel(c);
    const std::size_t d = truth.delays[c];
    for (const auto& src : truth.sources) {
      for (std::size_t i = d; i < n; ++i) clean[i] += cfg.gains[c] * src[i - d];
    }
    auto noise = truth.noise.channel(c);
    auto rng = make_rng(cfg.seed, Stream::kChannelNoise, c);
    for (std::size_t i = 0; i < n; ++i) noise[i] = cfg.sigmas[c] * gaussian(rng);
    auto noisy = truth.noisy.channel(c);
    for (std::size_t i = 0; i < n; ++i) noisy[i] = clean[i] + noise[i];
  }
  return truth;
}

MultichannelSignal noise_recording(const SceneConfig& cfg, double duration_s) {
  validate(cfg);
  const auto n = static_cast<std::size_t>(std::llround(duration_s * cfg.sample_rate));
  if (n == 0) throw std::invalid_argument("noise recording duration must be positive");
  MultichannelSignal out(cfg.channels, n, cfg.sample_rate);
  for (std::size_t c = 0; c < cfg.channels; ++c) {
    auto rng = make_rng(cfg.seed, Stream::kNoiseRecording, c);
    auto x = out.channel(c);
    for (std::size_t i = 0; i < n; ++i) x[i] = cfg.sigmas[c] * gaussian(rng);
  }
  return out;
}

SceneConfig standard_scene_config(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.channels = 50;
  cfg.duration_s = 4.0;
  cfg.sample_rate = 20000.0;
  SourceSpec src;
  src.kind = WaveformKind::kFilteredNoise;
  src.amplitude = 1.0;  // unit RMS: channel SNR spans -20 dB to +20 dB
  src.low_hz = 200.0;
  src.high_hz = 1200.0;
  cfg.sources = {src};
  cfg.gains = linear_ramp(0.1, 1.0, cfg.channels);
  cfg.sigmas = linear_ramp(1.0, 0.1, cfg.channels);
  cfg.seed = seed;
  return cfg;
}

SceneTruth standard_scene(std::uint64_t seed) { return generate(standard_scene_config(seed)); }

SceneConfig parse_scene_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scene config is not valid JSON: ") + e.what());
  }
  try {
    SceneConfig cfg;
    cfg.channels = j.value("channels", std::size_t{50});
    cfg.duration_s = j.value("duration_s", 4.0);
    cfg.sample_rate = j.value("sample_rate", 20000.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    for (const auto& sj : j.at("sources")) {
      SourceSpec s;
      s.kind = parse_kind(sj.at("type").get<std::string>());
      s.amplitude = sj.value("amplitude", 1.0);
      s.frequency_hz = sj.value("frequency_hz", s.frequency_hz);
      s.start_hz = sj.value("start_hz", s.start_hz);
      s.end_hz = sj.value("end_hz", s.end_hz);
      s.low_hz = sj.value("low_hz", s.low_hz);
      s.high_hz = sj.value("high_hz", s.high_hz);
      s.path = sj.value("path", std::string{});
      cfg.sources.push_back(s);
    }
    cfg.gains = parse_profile(j.at("gains"), cfg.channels, "gains");
    cfg.sigmas = parse_profile(j.at("sigmas"), cfg.channels, "sigmas");
    if (j.contains("delays")) {
      const auto& d = j.at("delays");
      if (d.is_number()) {
        cfg.delays.assign(cfg.channels, d.get<std::size_t>());
      } else {
        cfg.delays = d.get<std::vector<std::size_t>>();
      }
    }
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scene config: ") + e.what());
  }
}

std::string scene_config_to_json(const SceneConfig& cfg) { return config_json(cfg).dump(2); }

std::string truth_to_json(const SceneConfig& cfg, const SceneTruth& truth) {
  json j{{"config", config_json(cfg)},
         {"gains", truth.gains},
         {"sigmas", truth.sigmas},
         {"delays", truth.delays},
         {"channels", truth.noisy.channels()},
         {"samples", truth.noisy.samples()},
         {"sample_rate", truth.noisy.sample_rate()}};
  return j.dump(2);
}

}  // namespace dasdn
