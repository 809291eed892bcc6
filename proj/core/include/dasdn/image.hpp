#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dasdn/tensor.hpp"

namespace dasdn {

struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top
};

inline constexpr double kImageDynamicRangeDb = 80.0;

/// One channel of a magnitude spectrogram as 8-bit gray: rows are frequency
/// bins with the highest bin on top, columns are frames. Levels map
/// 20 log10(mag + 1e-10) linearly from (peak - 80 dB) to the peak. An all-zero
/// channel renders black.
GrayImage spectrogram_image(const Tensor3& mag, std::size_t channel);

/// Binary PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

void export_spectrogram_image(const Tensor3& mag, std::size_t channel,
                              const std::filesystem::path& path);

}  // namespace dasdn
