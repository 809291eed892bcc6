#include "dasdn/grad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "kernels.hpp"

namespace dasdn::grad {

namespace {

void require_same_shape(Var a, Var b, const char* op) {
  if (a.shape() != b.shape()) throw std::invalid_argument(std::string(op) + ": shapes differ");
}

Dims3 dims3(const Shape& s, const char* op) {
  if (s.size() != 3) throw std::invalid_argument(std::string(op) + ": expected a rank-3 tensor");
  return {s[0], s[1], s[2]};
}

void require_channel_vector(Var t, Var v, const char* op) {
  if (t.shape().empty() || v.shape().size() != 1 || v.shape()[0] != t.shape()[0]) {
    throw std::invalid_argument(std::string(op) + ": vector length must equal the channel count");
  }
}

}  // namespace

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

const Shape& Var::shape() const { return tape_->shape(id_); }
std::size_t Var::size() const { return tape_->value(id_).size(); }
std::span<const double> Var::value() const { return tape_->value(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

std::vector<double> Var::grad() const {
  auto g = tape_->grad(id_);
  if (g.empty()) return std::vector<double>(size(), 0.0);
  return {g.begin(), g.end()};
}

double Var::item() const {
  if (size() != 1) throw std::invalid_argument("item() on a node with more than one element");
  return tape_->value(id_)[0];
}

Var Tape::push(Shape shape, std::vector<double> value, bool requires_grad, BackwardFn backward) {
  if (shape_size(shape) != value.size()) {
    throw std::invalid_argument("tape node value does not match its shape");
  }
  nodes_.push_back(Node{std::move(shape), std::move(value), {}, requires_grad,
                        requires_grad ? std::move(backward) : BackwardFn{}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Shape shape, std::vector<double> value) {
  return push(std::move(shape), std::move(value), true, {});
}

Var Tape::constant(Shape shape, std::vector<double> value) {
  return push(std::move(shape), std::move(value), false, {});
}

Var Tape::parameter(const Tensor3& t) {
  return parameter({t.dims()[0], t.dims()[1], t.dims()[2]}, t.values());
}
Var Tape::constant(const Tensor3& t) {
  return constant({t.dims()[0], t.dims()[1], t.dims()[2]}, t.values());
}
Var Tape::parameter(const Matrix& m) { return parameter({m.rows(), m.cols()}, m.values()); }
Var Tape::constant(const Matrix& m) { return constant({m.rows(), m.cols()}, m.values()); }

Var Tape::record(Shape shape, std::vector<double> value, std::span<const Var> parents,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) {
    if (&p.tape() != this) throw std::invalid_argument("op mixes nodes from different tapes");
    needs = needs || p.requires_grad();
  }
  return push(std::move(shape), std::move(value), needs, std::move(backward));
}

Var Tape::stop_gradient(Var x) {
  return push(x.shape(), std::vector<double>(x.value().begin(), x.value().end()), false, {});
}

std::span<double> Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  if (&loss.tape() != this) throw std::invalid_argument("backward: loss is on another tape");
  if (loss.size() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  if (!nodes_[loss.id()].requires_grad) return;
  grad_buffer(loss.id())[0] += 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.backward || n.grad.empty()) continue;
    n.backward(*this, id);
  }
}

Tensor3 to_tensor(Var v) {
  const Dims3 d = dims3(v.shape(), "to_tensor");
  return Tensor3(d, std::vector<double>(v.value().begin(), v.value().end()));
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  auto av = a.value();
  auto bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const Var parents[] = {a, b};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id(), ib = b.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           for (std::size_t p : {ia, ib}) {
                             if (!tp.requires_grad(p)) continue;
                             auto gp = tp.grad_buffer(p);
                             for (std::size_t i = 0; i < g.size(); ++i) gp[i] += g[i];
                           }
                         });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  auto av = a.value();
  auto bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const Var parents[] = {a, b};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id(), ib = b.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           if (tp.requires_grad(ia)) {
                             auto ga = tp.grad_buffer(ia);
                             for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                           }
                           if (tp.requires_grad(ib)) {
                             auto gb = tp.grad_buffer(ib);
                             for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
                           }
                         });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  auto av = a.value();
  auto bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const Var parents[] = {a, b};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id(), ib = b.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           const auto& va = tp.value(ia);
                           const auto& vb = tp.value(ib);
                           if (tp.requires_grad(ia)) {
                             auto ga = tp.grad_buffer(ia);
                             for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
                           }
                           if (tp.requires_grad(ib)) {
                             auto gb = tp.grad_buffer(ib);
                             for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
                           }
                         });
}

Var scale(Var a, double s) {
  std::vector<double> out(a.value().begin(), a.value().end());
  for (double& v : out) v *= s;
  const Var parents[] = {a};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id(), s](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           auto ga = tp.grad_buffer(ia);
                           for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
                         });
}

Var add_scalar(Var a, double s) {
  std::vector<double> out(a.value().begin(), a.value().end());
  for (double& v : out) v += s;
  const Var parents[] = {a};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           auto ga = tp.grad_buffer(ia);
                           for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
                         });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value()) s += v;
  const Var parents[] = {a};
  return a.tape().record({1}, {s}, parents, [ia = a.id()](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    for (double& v : tp.grad_buffer(ia)) v += g;
  });
}

Var tanh(Var a) {
  std::vector<double> out(a.size());
  auto av = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(av[i]);
  const Var parents[] = {a};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           const auto& y = tp.value(self);
                           auto ga = tp.grad_buffer(ia);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             ga[i] += g[i] * (1.0 - y[i] * y[i]);
                           }
                         });
}

Var abs(Var a) {
  std::vector<double> out(a.size());
  auto av = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(av[i]);
  const Var parents[] = {a};
  return a.tape().record(a.shape(), std::move(out), parents,
                         [ia = a.id()](Tape& tp, std::size_t self) {
                           auto g = tp.grad(self);
                           const auto& x = tp.value(ia);
                           auto ga = tp.grad_buffer(ia);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             const double sign = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
                             ga[i] += g[i] * sign;
                           }
                         });
}

Var channel_sub(Var t, Var v) {
  require_channel_vector(t, v, "channel_sub");
  const std::size_t channels = t.shape()[0];
  const std::size_t inner = t.size() / channels;
  std::vector<double> out(t.value().begin(), t.value().end());
  auto vv = v.value();
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < inner; ++i) out[c * inner + i] -= vv[c];
  }
  const Var parents[] = {t, v};
  return t.tape().record(
      t.shape(), std::move(out), parents,
      [it = t.id(), iv = v.id(), channels, inner](Tape& tp, std::size_t self) {
        auto g = tp.grad(self);
        if (tp.requires_grad(it)) {
          auto gt = tp.grad_buffer(it);
          for (std::size_t i = 0; i < g.size(); ++i) gt[i] += g[i];
        }
        if (tp.requires_grad(iv)) {
          auto gv = tp.grad_buffer(iv);
          for (std::size_t c = 0; c < channels; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < inner; ++i) s += g[c * inner + i];
            gv[c] -= s;
          }
        }
      });
}

Var channel_div(Var t, Var v) {
  require_channel_vector(t, v, "channel_div");
  const std::size_t channels = t.shape()[0];
  const std::size_t inner = t.size() / channels;
  std::vector<double> out(t.value().begin(), t.value().end());
  auto vv = v.value();
  for (std::size_t c = 0; c < channels; ++c) {
    const double inv = 1.0 / vv[c];
    for (std::size_t i = 0; i < inner; ++i) out[c * inner + i] *= inv;
  }
  const Var parents[] = {t, v};
  return t.tape().record(
      t.shape(), std::move(out), parents,
      [it = t.id(), iv = v.id(), channels, inner](Tape& tp, std::size_t self) {
        auto g = tp.grad(self);
        const auto& y = tp.value(self);
        const auto& vv = tp.value(iv);
        if (tp.requires_grad(it)) {
          auto gt = tp.grad_buffer(it);
          for (std::size_t c = 0; c < channels; ++c) {
            const double inv = 1.0 / vv[c];
            for (std::size_t i = 0; i < inner; ++i) gt[c * inner + i] += g[c * inner + i] * inv;
          }
        }
        if (tp.requires_grad(iv)) {
          // d(t/v)/dv = -(t/v)/v
          auto gv = tp.grad_buffer(iv);
          for (std::size_t c = 0; c < channels; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < inner; ++i) s += g[c * inner + i] * y[c * inner + i];
            gv[c] -= s / vv[c];
          }
        }
      });
}

Var channel_tanh(Var t, Var shift, Var scale) {
  require_channel_vector(t, shift, "channel_tanh");
  require_channel_vector(t, scale, "channel_tanh");
  const std::size_t channels = t.shape()[0];
  const std::size_t inner = t.size() / channels;
  std::vector<double> out(t.size());
  auto tv = t.value();
  auto sv = shift.value();
  auto dv = scale.value();
  for (std::size_t c = 0; c < channels; ++c) {
    const double inv = 1.0 / dv[c];
    for (std::size_t i = 0; i < inner; ++i) {
      out[c * inner + i] = std::tanh((tv[c * inner + i] - sv[c]) * inv);
    }
  }
  const Var parents[] = {t, shift, scale};
  return t.tape().record(
      t.shape(), std::move(out), parents,
      [it = t.id(), is = shift.id(), id = scale.id(), channels, inner](Tape& tp,
                                                                       std::size_t self) {
        auto g = tp.grad(self);
        const auto& y = tp.value(self);
        const auto& x = tp.value(it);
        const auto& sv = tp.value(is);
        const auto& dv = tp.value(id);
        const bool want_t = tp.requires_grad(it);
        const bool want_s = tp.requires_grad(is);
        const bool want_d = tp.requires_grad(id);
        std::span<double> gt = want_t ? tp.grad_buffer(it) : std::span<double>{};
        for (std::size_t c = 0; c < channels; ++c) {
          const double inv = 1.0 / dv[c];
          double sum_u = 0.0;
          double sum_ux = 0.0;
          for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t k = c * inner + i;
            const double u = g[k] * (1.0 - y[k] * y[k]) * inv;
            if (want_t) gt[k] += u;
            sum_u += u;
            sum_ux += u * (x[k] - sv[c]);
          }
          if (want_s) tp.grad_buffer(is)[c] -= sum_u;
          if (want_d) tp.grad_buffer(id)[c] -= sum_ux * inv;
        }
      });
}

Var mode_multiply(Var t, Var a, int mode) {
  if (mode < 1 || mode > 3) throw std::invalid_argument("mode_multiply: mode must be 1, 2 or 3");
  const Dims3 td = dims3(t.shape(), "mode_multiply");
  if (a.shape().size() != 2 || a.shape()[1] != td[mode - 1]) {
    throw std::invalid_argument("mode_multiply: matrix columns must equal the tensor mode size");
  }
  Dims3 od = td;
  od[mode - 1] = a.shape()[0];
  std::vector<double> out(od[0] * od[1] * od[2]);
  detail::mode_multiply(t.value().data(), td, a.value().data(), a.shape()[0], mode, out.data());
  const Var parents[] = {t, a};
  return t.tape().record(
      {od[0], od[1], od[2]}, std::move(out), parents,
      [it = t.id(), ia = a.id(), td, od, mode](Tape& tp, std::size_t self) {
        const double* g = tp.grad(self).data();
        if (tp.requires_grad(ia)) {
          detail::mode_multiply_grad_matrix(g, od, tp.value(it).data(), td, mode,
                                            tp.grad_buffer(ia).data(), true);
        }
        if (tp.requires_grad(it)) {
          detail::mode_multiply_grad_tensor(g, od, tp.value(ia).data(), td, mode,
                                            tp.grad_buffer(it).data());
        }
      });
}

Var conv3x3(Var z, Var weight, Var bias) {
  const Dims3 d = dims3(z.shape(), "conv3x3");
  const Shape wshape{d[0], d[0], 3, 3};
  if (weight.shape() != wshape) {
    throw std::invalid_argument("conv3x3: weight must have shape (C, C, 3, 3)");
  }
  if (bias.shape() != Shape{d[0]}) throw std::invalid_argument("conv3x3: bias must have length C");
  std::vector<double> out(z.size());
  detail::conv3x3_forward(z.value().data(), d, weight.value().data(), bias.value().data(),
                          out.data());
  const Var parents[] = {z, weight, bias};
  return z.tape().record(
      z.shape(), std::move(out), parents,
      [iz = z.id(), iw = weight.id(), ib = bias.id(), d](Tape& tp, std::size_t self) {
        double* gz = tp.requires_grad(iz) ? tp.grad_buffer(iz).data() : nullptr;
        double* gw = tp.requires_grad(iw) ? tp.grad_buffer(iw).data() : nullptr;
        double* gb = tp.requires_grad(ib) ? tp.grad_buffer(ib).data() : nullptr;
        detail::conv3x3_backward(tp.value(iz).data(), d, tp.value(iw).data(),
                                 tp.grad(self).data(), gz, gw, gb);
      });
}

Var frobenius_distance(Var a, Var b) {
  require_same_shape(a, b, "frobenius_distance");
  auto av = a.value();
  auto bv = b.value();
  double s = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    s += d * d;
  }
  const double norm = std::sqrt(s);
  const Var parents[] = {a, b};
  return a.tape().record({1}, {norm}, parents,
                         [ia = a.id(), ib = b.id(), norm](Tape& tp, std::size_t self) {
                           if (norm == 0.0) return;
                           const double g = tp.grad(self)[0] / norm;
                           const auto& va = tp.value(ia);
                           const auto& vb = tp.value(ib);
                           if (tp.requires_grad(ia)) {
                             auto ga = tp.grad_buffer(ia);
                             for (std::size_t i = 0; i < va.size(); ++i) ga[i] += g * (va[i] - vb[i]);
                           }
                           if (tp.requires_grad(ib)) {
                             auto gb = tp.grad_buffer(ib);
                             for (std::size_t i = 0; i < va.size(); ++i) gb[i] -= g * (va[i] - vb[i]);
                           }
                         });
}

Var softmax_entropy(Var v) {
  if (v.shape().size() != 1 || v.size() == 0) {
    throw std::invalid_argument("softmax_entropy: expected a non-empty vector");
  }
  auto x = v.value();
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double xi : x) z += std::exp(xi - mx);
  const double log_z = std::log(z) + mx;
  std::vector<double> log_p(x.size());
  double h = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    log_p[i] = x[i] - log_z;
    h -= std::exp(log_p[i]) * log_p[i];
  }
  const Var parents[] = {v};
  return v.tape().record({1}, {h}, parents,
                         [iv = v.id(), log_p = std::move(log_p), h](Tape& tp, std::size_t self) {
                           // dH/dx_i = -p_i (log p_i + H)
                           const double g = tp.grad(self)[0];
                           auto gv = tp.grad_buffer(iv);
                           for (std::size_t i = 0; i < log_p.size(); ++i) {
                             gv[i] -= g * std::exp(log_p[i]) * (log_p[i] + h);
                           }
                         });
}

GradCheckResult finite_diff_check(const LossBuilder& build, std::vector<Parameter> params,
                                  double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_check: step must be positive");

  auto evaluate = [&](bool with_grad, std::vector<std::vector<double>>* grads) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(params.size());
    for (const auto& p : params) vars.push_back(tape.parameter(p.shape, p.value));
    Var loss = build(tape, vars);
    if (with_grad) {
      tape.backward(loss);
      grads->clear();
      for (const Var& v : vars) grads->push_back(v.grad());
    }
    return loss.item();
  };

  std::vector<std::vector<double>> analytic;
  evaluate(true, &analytic);

  GradCheckResult result;
  result.per_parameter.assign(params.size(), 0.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k].value.size(); ++i) {
      const double orig = params[k].value[i];
      params[k].value[i] = orig + step;
      const double up = evaluate(false, nullptr);
      params[k].value[i] = orig - step;
      const double down = evaluate(false, nullptr);
      params[k].value[i] = orig;
      const double numeric = (up - down) / (2.0 * step);
      const double err = std::abs(analytic[k][i] - numeric) / std::max(1e-8, std::abs(numeric));
      result.per_parameter[k] = std::max(result.per_parameter[k], err);
    }
    result.max_rel_error = std::max(result.max_rel_error, result.per_parameter[k]);
  }
  return result;
}

}  // namespace dasdn::grad
