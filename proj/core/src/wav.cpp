#include "dasdn/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "dasdn/error.hpp"

namespace dasdn {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;
constexpr std::size_t kMaxChannels = 64;

template <typename T>
T load(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

MultichannelSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError(path.string() + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = load<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) {
        throw FormatError(path.string() + ": truncated fmt chunk");
      }
      format = load<std::uint16_t>(bytes.data() + body);
      channels = load<std::uint16_t>(bytes.data() + body + 2);
      rate = load<std::uint32_t>(bytes.data() + body + 4);
      block_align = load<std::uint16_t>(bytes.data() + body + 12);
      bits = load<std::uint16_t>(bytes.data() + body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw FormatError(path.string() + ": truncated extensible fmt chunk");
        format = load<std::uint16_t>(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      if (data_size < size) throw FormatError(path.string() + ": truncated data chunk");
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw FormatError(path.string() + ": missing fmt chunk");
  if (data == nullptr) throw FormatError(path.string() + ": missing data chunk");
  if (channels == 0 || rate == 0) throw FormatError(path.string() + ": zero channels or rate");
  if (channels > kMaxChannels) {
    throw UnsupportedError(path.string() + ": " + std::to_string(channels) +
                           " channels (at most 64 supported)");
  }
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !f32) {
    throw UnsupportedError(path.string() + ": format " + std::to_string(format) + " with " +
                           std::to_string(bits) + " bits (PCM16 or float32 expected)");
  }
  const std::size_t sample_bytes = bits / 8;
  if (block_align != channels * sample_bytes) {
    throw FormatError(path.string() + ": block align inconsistent with channels and bit depth");
  }
  const std::size_t frames = data_size / block_align;
  if (frames == 0) throw FormatError(path.string() + ": no sample frames");

  MultichannelSignal sig(channels, frames, static_cast<double>(rate));
  for (std::size_t n = 0; n < frames; ++n) {
    const std::uint8_t* frame = data + n * block_align;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* s = frame + c * sample_bytes;
      sig(c, n) = pcm16 ? static_cast<double>(load<std::int16_t>(s)) / 32768.0
                        : static_cast<double>(load<float>(s));
    }
  }
  return sig;
}

void write_wav(const std::filesystem::path& path, const MultichannelSignal& sig,
               WavEncoding encoding) {
  if (sig.channels() == 0 || sig.channels() > kMaxChannels) {
    throw std::invalid_argument("write_wav: channel count must be in [1, 64]");
  }
  const double rate = sig.sample_rate();
  if (rate != std::floor(rate) || rate <= 0.0 || rate > 4294967295.0) {
    throw std::invalid_argument("write_wav: sample rate must be a positive integer");
  }
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const auto channels = static_cast<std::uint16_t>(sig.channels());
  const std::uint16_t block_align = static_cast<std::uint16_t>(channels * bits / 8);
  const std::uint64_t data_size = static_cast<std::uint64_t>(block_align) * sig.samples();
  if (data_size + 36 > 0xFFFFFFFFull) throw std::invalid_argument("write_wav: file exceeds 4 GiB");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out.write("RIFF", 4);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(36 + data_size));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  store<std::uint32_t>(out, 16);
  store<std::uint16_t>(out, pcm16 ? kFormatPcm : kFormatFloat);
  store<std::uint16_t>(out, channels);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(rate));
  store<std::uint32_t>(out, static_cast<std::uint32_t>(rate) * block_align);
  store<std::uint16_t>(out, block_align);
  store<std::uint16_t>(out, bits);
  out.write("data", 4);
  store<std::uint32_t>(out, static_cast<std::uint32_t>(data_size));

  std::vector<char> frame(block_align);
  for (std::size_t n = 0; n < sig.samples(); ++n) {
    for (std::size_t c = 0; c < sig.channels(); ++c) {
      const double v = sig(c, n);
      char* dst = frame.data() + c * (bits / 8);
      if (pcm16) {
        const double q = std::clamp(std::nearbyint(v * 32768.0), -32768.0, 32767.0);
        const auto s = static_cast<std::int16_t>(q);
        std::memcpy(dst, &s, sizeof s);
      } else {
        const auto f = static_cast<float>(v);
        std::memcpy(dst, &f, sizeof f);
      }
    }
    out.write(frame.data(), static_cast<std::streamsize>(frame.size()));
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace dasdn
