#include "dasdn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dasdn/fft.hpp"

namespace dasdn {

namespace {

using cd = std::complex<double>;

std::vector<double> prefix(std::span<const double> x, bool squared) {
  std::vector<double> p(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) p[i + 1] = p[i] + (squared ? x[i] * x[i] : x[i]);
  return p;
}

bool all_zero(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

// corr[k] for k >= 0 at index k, for k < 0 at index n + k: sum_i x[i + k] y[i].
double best_lag(std::span<const double> x, std::span<const double> y,
                const std::vector<double>& corr, std::size_t n) {
  const auto nx = static_cast<long>(x.size());
  const auto ny = static_cast<long>(y.size());
  const long min_overlap = std::max<long>(1, std::min(nx, ny) / 2);
  const auto px = prefix(x, false);
  const auto pxx = prefix(x, true);
  const auto py = prefix(y, false);
  const auto pyy = prefix(y, true);

  double best = -2.0;
  for (long k = -(ny - 1); k <= nx - 1; ++k) {
    const long y0 = std::max<long>(0, -k);
    const long y1 = std::min<long>(ny, nx - k);
    const long len = y1 - y0;
    if (len < min_overlap) continue;
    const long x0 = y0 + k;
    const double l = static_cast<double>(len);
    const double sx = px[x0 + len] - px[x0];
    const double sxx = pxx[x0 + len] - pxx[x0];
    const double sy = py[y0 + len] - py[y0];
    const double syy = pyy[y0 + len] - pyy[y0];
    const double sxy = corr[k >= 0 ? static_cast<std::size_t>(k) : n - static_cast<std::size_t>(-k)];
    const double vx = sxx - sx * sx / l;
    const double vy = syy - sy * sy / l;
    if (!(vx > 0.0) || !(vy > 0.0)) continue;
    const double r = (sxy - sx * sy / l) / std::sqrt(vx * vy);
    best = std::max(best, std::clamp(r, -1.0, 1.0));
  }
  if (best < -1.5) throw std::domain_error("cross-correlation undefined at every lag");
  return best;
}

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("cross-correlation of an empty signal");
  if (all_zero(x) || all_zero(y)) {
    throw std::domain_error("cross-correlation undefined for an all-zero signal");
  }
}

}  // namespace

LagCorrelator::LagCorrelator(std::span<const double> reference, std::size_t max_other_length)
    : reference_(reference.begin(), reference.end()),
      max_other_length_(max_other_length),
      fft_size_(next_pow2(reference.size() + max_other_length)),
      fft_(fft_size_) {
  if (reference.empty()) throw std::invalid_argument("cross-correlation of an empty signal");
  const Fft& fft = fft_;
  std::vector<cd> buf(fft_size_, cd(0.0, 0.0));
  for (std::size_t i = 0; i < reference.size(); ++i) buf[i] = reference[i];
  reference_spectrum_.resize(fft_size_);
  fft.forward(buf, reference_spectrum_);
  for (cd& v : reference_spectrum_) v = std::conj(v);
}

double LagCorrelator::max_correlation(std::span<const double> x) const {
  check_inputs(x, reference_);
  if (x.size() > max_other_length_) {
    throw std::invalid_argument("LagCorrelator: signal longer than configured");
  }
  const Fft& fft = fft_;
  std::vector<cd> buf(fft_size_, cd(0.0, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  std::vector<cd> spec(fft_size_);
  fft.forward(buf, spec);
  for (std::size_t i = 0; i < fft_size_; ++i) spec[i] *= reference_spectrum_[i];
  fft.inverse(spec, buf);
  std::vector<double> corr(fft_size_);
  for (std::size_t i = 0; i < fft_size_; ++i) corr[i] = buf[i].real();
  return best_lag(x, reference_, corr, fft_size_);
}

double cross_correlation_max(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  return LagCorrelator(y, x.size()).max_correlation(x);
}

double cci(double cc_denoised, double cc_noisy) {
  if (!(cc_denoised >= -1.0 && cc_denoised <= 1.0) || !(cc_noisy >= -1.0 && cc_noisy <= 1.0)) {
    throw std::invalid_argument("cci: correlations must lie in [-1, 1]");
  }
  if (cc_noisy == -1.0) throw std::domain_error("cci: noisy correlation of -1 divides by zero");
  // difference of logs keeps cci(a, b) == -cci(b, a) bit for bit
  return 20.0 * (std::log10(1.0 + cc_denoised) - std::log10(1.0 + cc_noisy));
}

double psnr(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("psnr of an empty signal");
  if (all_zero(y)) throw std::domain_error("psnr undefined for an all-zero signal");
  const double peak = *std::max_element(y.begin(), y.end());
  if (!(peak > 0.0)) throw std::domain_error("psnr requires a positive peak sample");
  double ss = 0.0;
  for (double v : y) ss += v * v;
  const double rms = std::sqrt(ss / static_cast<double>(y.size()));
  return 20.0 * std::log10(peak / rms);
}

Evaluation evaluate(const MultichannelSignal& denoised, const MultichannelSignal& noisy,
                    std::span<const double> source) {
  if (denoised.channels() != noisy.channels()) {
    throw std::invalid_argument("evaluate: denoised has " + std::to_string(denoised.channels()) +
                                " channels, noisy has " + std::to_string(noisy.channels()));
  }
  const LagCorrelator corr(source, std::max(denoised.samples(), noisy.samples()));
  Evaluation ev;
  ev.channels.reserve(noisy.channels());
  for (std::size_t c = 0; c < noisy.channels(); ++c) {
    ChannelMetrics m;
    m.channel = c;
    m.cc_noisy = corr.max_correlation(noisy.channel(c));
    m.psnr_noisy_db = psnr(noisy.channel(c));
    const auto d = denoised.channel(c);
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
      // A silenced channel carries nothing of the source; its PSNR has no value.
      m.cc_denoised = 0.0;
      m.psnr_denoised_db = std::numeric_limits<double>::quiet_NaN();
    } else {
      m.cc_denoised = corr.max_correlation(d);
      m.psnr_denoised_db = psnr(d);
    }
    m.cci_db = cci(m.cc_denoised, m.cc_noisy);
    ev.channels.push_back(m);
  }
  const double n = static_cast<double>(ev.channels.size());
  for (const auto& m : ev.channels) {
    ev.mean.cc_noisy += m.cc_noisy / n;
    ev.mean.cc_denoised += m.cc_denoised / n;
    ev.mean.cci_db += m.cci_db / n;
    ev.mean.psnr_noisy_db += m.psnr_noisy_db / n;
    ev.mean.psnr_denoised_db += m.psnr_denoised_db / n;
  }
  return ev;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length samples of size >= 2");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw std::domain_error("spearman: constant sample");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace dasdn
