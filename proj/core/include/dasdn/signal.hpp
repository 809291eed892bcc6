#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dasdn {

/// C equal-length channels of real samples, channel-major.
class MultichannelSignal {
 public:
  MultichannelSignal() = default;
  MultichannelSignal(std::size_t channels, std::size_t samples, double sample_rate);
  MultichannelSignal(std::size_t channels, std::size_t samples, double sample_rate,
                     std::vector<double> data);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t samples() const noexcept { return samples_; }
  double sample_rate() const noexcept { return sample_rate_; }

  std::span<double> channel(std::size_t c);
  std::span<const double> channel(std::size_t c) const;

  double& operator()(std::size_t c, std::size_t n) { return data_[c * samples_ + n]; }
  double operator()(std::size_t c, std::size_t n) const { return data_[c * samples_ + n]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const MultichannelSignal&, const MultichannelSignal&) = default;

 private:
  std::size_t channels_ = 0;
  std::size_t samples_ = 0;
  double sample_rate_ = 0.0;
  std::vector<double> data_;
};

}  // namespace dasdn
