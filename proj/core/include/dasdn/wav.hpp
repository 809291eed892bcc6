#pragma once

#include <filesystem>

#include "dasdn/signal.hpp"

namespace dasdn {

enum class WavEncoding { kPcm16, kFloat32 };

/// RIFF/WAVE with 1-64 interleaved channels. PCM16 samples are scaled by
/// 1/32768 on read; float32 samples are read as-is. WAVE_FORMAT_EXTENSIBLE
/// headers are accepted when their sub-format is PCM or IEEE float.
///
/// Throws FormatError for malformed files and UnsupportedError for other codecs
/// or bit depths.
MultichannelSignal read_wav(const std::filesystem::path& path);

/// PCM16 clamps to [-1, 32767/32768] and rounds to the nearest step.
void write_wav(const std::filesystem::path& path, const MultichannelSignal& sig,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace dasdn
