#include "dasdn/tucker.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dasdn/linalg.hpp"

namespace dasdn {

void validate_ranks(const Dims3& dims, const Ranks& ranks) {
  for (std::size_t m = 0; m < 3; ++m) {
    if (ranks[m] < 1 || ranks[m] > dims[m]) {
      throw std::invalid_argument("Tucker rank " + std::to_string(ranks[m]) + " for mode " +
                                  std::to_string(m + 1) + " outside [1, " +
                                  std::to_string(dims[m]) + "]");
    }
  }
}

TuckerFactors hosvd(const Tensor3& t, const Ranks& ranks) {
  validate_ranks(t.dims(), ranks);
  TuckerFactors f;
  for (int mode = 1; mode <= 3; ++mode) {
    f.factors[mode - 1] = left_singular_vectors(unfold(t, mode), ranks[mode - 1]);
  }
  Tensor3 core = t;
  for (int mode = 1; mode <= 3; ++mode) {
    core = mode_multiply(core, f.factors[mode - 1].transposed(), mode);
  }
  f.core = std::move(core);
  return f;
}

Tensor3 reconstruct(const TuckerFactors& f) {
  const Ranks r = f.core.dims();
  for (std::size_t m = 0; m < 3; ++m) {
    if (f.factors[m].cols() != r[m]) {
      throw std::invalid_argument("reconstruct: factor " + std::to_string(m + 1) + " has " +
                                  std::to_string(f.factors[m].cols()) +
                                  " columns but core rank is " + std::to_string(r[m]));
    }
  }
  Tensor3 out = f.core;
  for (int mode : cheapest_mode_order(r, f.dims())) {
    out = mode_multiply(out, f.factors[mode - 1], mode);
  }
  return out;
}

std::array<int, 3> cheapest_mode_order(const Ranks& core_dims, const Dims3& full_dims) {
  std::array<int, 3> order{1, 2, 3};
  std::array<int, 3> best = order;
  double best_cost = -1.0;
  do {
    Dims3 cur = core_dims;
    double cost = 0.0;
    for (int mode : order) {
      const std::size_t m = static_cast<std::size_t>(mode - 1);
      cost += static_cast<double>(cur[0]) * static_cast<double>(cur[1]) *
              static_cast<double>(cur[2]) * static_cast<double>(full_dims[m]);
      cur[m] = full_dims[m];
    }
    if (best_cost < 0.0 || cost < best_cost) {
      best_cost = cost;
      best = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace dasdn
