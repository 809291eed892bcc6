#include "dasdn/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "dasdn/error.hpp"

namespace dasdn {

static_assert(std::endian::native == std::endian::little,
              "tensor I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'D', 'A', 'S', '3'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in, const char* what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw FormatError(std::string("DAS3: truncated header reading ") + what);
  }
  return v;
}

}  // namespace

void write_tensor(std::ostream& out, const Tensor3& t) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kTensorFormatVersion);
  for (std::size_t d : t.dims()) put<std::uint64_t>(out, d);
  const auto data = t.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!out) throw std::runtime_error("DAS3: write failed");
}

Tensor3 read_tensor(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw FormatError("DAS3: truncated header reading magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("DAS3: bad magic");
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kTensorFormatVersion) {
    throw FormatError("DAS3: unsupported version " + std::to_string(version));
  }
  Dims3 dims{};
  std::uint64_t total = 1;
  for (auto& d : dims) {
    const auto v = get<std::uint64_t>(in, "dims");
    if (v == 0) throw FormatError("DAS3: zero dimension");
    if (total > std::numeric_limits<std::uint64_t>::max() / 8 / v) {
      throw FormatError("DAS3: dimensions overflow");
    }
    total *= v;
    d = static_cast<std::size_t>(v);
  }
  // Check the remaining length before allocating when the stream is seekable.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    if (end - here < static_cast<std::streamoff>(total * 8)) {
      throw FormatError("DAS3: truncated payload");
    }
  }
  std::vector<double> data(static_cast<std::size_t>(total));
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    throw FormatError("DAS3: truncated payload");
  }
  return Tensor3(dims, std::move(data));
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  write_tensor(out, t);
}

Tensor3 read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_tensor(in);
}

}  // namespace dasdn
