#pragma once

#include <array>
#include <cstddef>

#include "dasdn/tensor.hpp"

namespace dasdn {

/// Tucker ranks along (channel, frequency, time).
using Ranks = std::array<std::size_t, 3>;

/// Core tensor plus one factor matrix per mode; factor m is (I_m x R_m).
struct TuckerFactors {
  Tensor3 core;
  std::array<Matrix, 3> factors;

  Ranks ranks() const { return core.dims(); }
  Dims3 dims() const {
    return {factors[0].rows(), factors[1].rows(), factors[2].rows()};
  }
};

/// Throws std::invalid_argument unless 1 <= ranks[m] <= dims[m] for every mode.
void validate_ranks(const Dims3& dims, const Ranks& ranks);

/// Truncated higher-order SVD: factor m holds the leading left singular vectors
/// of unfold(t, m); the core is t projected onto them. No HOOI refinement.
TuckerFactors hosvd(const Tensor3& t, const Ranks& ranks);

/// core x1 U1 x2 U2 x3 U3.
Tensor3 reconstruct(const TuckerFactors& f);

/// Order (1-based modes) in which to apply the three factor products so the
/// total multiply count is smallest. The result is order-independent up to rounding.
std::array<int, 3> cheapest_mode_order(const Ranks& core_dims, const Dims3& full_dims);

}  // namespace dasdn
