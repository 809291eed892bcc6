#pragma once

#include <filesystem>
#include <cstdint>
#include <iosfwd>

#include "dasdn/tensor.hpp"

namespace dasdn {

/// "DAS3" container: 4-byte magic, u32 version (1), three u64 dims, then the
/// row-major f64 payload. All integers and floats little-endian.
inline constexpr std::uint32_t kTensorFormatVersion = 1;
inline constexpr std::size_t kTensorHeaderBytes = 4 + 4 + 3 * 8;

void write_tensor(std::ostream& out, const Tensor3& t);
Tensor3 read_tensor(std::istream& in);

void write_tensor(const std::filesystem::path& path, const Tensor3& t);
Tensor3 read_tensor(const std::filesystem::path& path);

}  // namespace dasdn
