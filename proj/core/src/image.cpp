#include "dasdn/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace dasdn {

GrayImage spectrogram_image(const Tensor3& mag, std::size_t channel) {
  const auto [channels, bins, frames] = mag.dims();
  if (channel >= channels) {
    throw std::invalid_argument("channel " + std::to_string(channel) + " out of range (" +
                                std::to_string(channels) + " channels)");
  }
  GrayImage img{bins, frames, std::vector<std::uint8_t>(bins * frames, 0)};

  double peak = 0.0;
  for (std::size_t f = 0; f < bins; ++f) {
    for (std::size_t t = 0; t < frames; ++t) peak = std::max(peak, std::abs(mag(channel, f, t)));
  }
  if (peak == 0.0) return img;

  const double top = 20.0 * std::log10(peak + 1e-10);
  const double bottom = top - kImageDynamicRangeDb;
  for (std::size_t f = 0; f < bins; ++f) {
    const std::size_t row = bins - 1 - f;
    for (std::size_t t = 0; t < frames; ++t) {
      const double db = 20.0 * std::log10(std::abs(mag(channel, f, t)) + 1e-10);
      const double level = std::clamp((db - bottom) / kImageDynamicRangeDb, 0.0, 1.0);
      img.pixels[row * frames + t] = static_cast<std::uint8_t>(std::lround(level * 255.0));
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << "P5\n" << img.cols << ' ' << img.rows << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void export_spectrogram_image(const Tensor3& mag, std::size_t channel,
                              const std::filesystem::path& path) {
  write_pgm(path, spectrogram_image(mag, channel));
}

}  // namespace dasdn
