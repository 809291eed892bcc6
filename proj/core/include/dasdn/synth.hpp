#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dasdn/signal.hpp"

namespace dasdn {

enum class WaveformKind { kSine, kChirp, kFilteredNoise, kWavFile };

struct SourceSpec {
  WaveformKind kind = WaveformKind::kFilteredNoise;
  double amplitude = 1.0;  // RMS for filtered noise, peak for sine/chirp, gain for wav
  double frequency_hz = 440.0;  // sine
  double start_hz = 100.0;      // chirp
  double end_hz = 2000.0;       // chirp
  double low_hz = 100.0;        // filtered noise band
  double high_hz = 1000.0;
  std::string path;             // wav-file; first channel, sample rate must match
};

/// Synthetic DAS recording: every channel sees the same sources scaled by a
/// per-channel sensitivity and delayed by an integer per-channel offset, plus
/// independent white Gaussian noise of per-channel standard deviation.
struct SceneConfig {
  std::size_t channels = 50;
  double duration_s = 4.0;
  double sample_rate = 20000.0;
  std::vector<SourceSpec> sources;
  std::vector<double> gains;
  std::vector<double> sigmas;
  std::vector<std::size_t> delays;  // empty means all zero
  std::uint64_t seed = 0;

  std::size_t samples() const;
};

struct SceneTruth {
  MultichannelSignal clean;
  MultichannelSignal noise;
  MultichannelSignal noisy;  // clean + noise, sample by sample
  std::vector<std::vector<double>> sources;
  std::vector<double> gains;
  std::vector<double> sigmas;
  std::vector<std::size_t> delays;
};

/// Throws std::invalid_argument for an inconsistent config.
void validate(const SceneConfig& cfg);

SceneTruth generate(const SceneConfig& cfg);

/// Noise-only recording with the scene's per-channel sigmas, drawn from streams
/// disjoint from those used by generate().
MultichannelSignal noise_recording(const SceneConfig& cfg, double duration_s);

/// 50 channels, 4 s at 20 kHz, one unit-RMS 200-1200 Hz noise source; gains ramp
/// 0.1 -> 1.0 and noise sigmas ramp 1.0 -> 0.1 across channels, no delays.
SceneConfig standard_scene_config(std::uint64_t seed);
SceneTruth standard_scene(std::uint64_t seed);

/// Values linearly spaced from `first` to `last` inclusive.
std::vector<double> linear_ramp(double first, double last, std::size_t n);

/// JSON scene document. Gains and sigmas accept either an explicit array or
/// {"ramp": [first, last]}. Throws std::invalid_argument on malformed input.
SceneConfig parse_scene_config(std::string_view json_text);
std::string scene_config_to_json(const SceneConfig& cfg);

/// Ground-truth sidecar: gains, sigmas, delays and the config that produced them.
std::string truth_to_json(const SceneConfig& cfg, const SceneTruth& truth);

}  // namespace dasdn
