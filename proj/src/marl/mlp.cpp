#include "marlot/marl/mlp.hpp"

#include <cassert>
#include <cmath>

namespace marlot::marl {

namespace {

// y[b, j] = sum_k x[b, k] * w[j, k] + bias[j]
// The dot product runs over eight independent accumulators so the compiler
// can vectorize the reduction without relaxing FP semantics; the summation
// order is fixed, so results stay bit-reproducible.
void linear_forward(const double* x, int batch, int in, int out,
                    const std::vector<double>& w, const std::vector<double>& b,
                    double* y) {
  constexpr int kLanes = 8;
  for (int i = 0; i < batch; ++i) {
    const double* xi = x + static_cast<std::size_t>(i) * in;
    double* yi = y + static_cast<std::size_t>(i) * out;
    for (int j = 0; j < out; ++j) {
      const double* wj = w.data() + static_cast<std::size_t>(j) * in;
      double lanes[kLanes] = {};
      int k = 0;
      for (; k + kLanes <= in; k += kLanes) {
        for (int l = 0; l < kLanes; ++l) {
          lanes[l] += xi[k + l] * wj[k + l];
        }
      }
      double acc = b[j];
      for (; k < in; ++k) acc += xi[k] * wj[k];
      acc += ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
             ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
      yi[j] = acc;
    }
  }
}

void relu_inplace(double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] < 0.0) y[i] = 0.0;
  }
}

// Given dL/dy and the post-relu activations h (mask h > 0), accumulates dW,
// db and optionally dL/dx.
void linear_backward(const double* x, const double* dy, int batch, int in,
                     int out, const std::vector<double>& w,
                     std::vector<double>* dw, std::vector<double>* db,
                     double* dx) {
  if (dw != nullptr) {
    for (int i = 0; i < batch; ++i) {
      const double* xi = x + static_cast<std::size_t>(i) * in;
      const double* di = dy + static_cast<std::size_t>(i) * out;
      for (int j = 0; j < out; ++j) {
        const double g = di[j];
        if (g == 0.0) continue;
        double* dwj = dw->data() + static_cast<std::size_t>(j) * in;
        for (int k = 0; k < in; ++k) dwj[k] += g * xi[k];
        (*db)[j] += g;
      }
    }
  }
  if (dx != nullptr) {
    for (int i = 0; i < batch; ++i) {
      const double* di = dy + static_cast<std::size_t>(i) * out;
      double* dxi = dx + static_cast<std::size_t>(i) * in;
      for (int k = 0; k < in; ++k) dxi[k] = 0.0;
      for (int j = 0; j < out; ++j) {
        const double g = di[j];
        if (g == 0.0) continue;
        const double* wj = w.data() + static_cast<std::size_t>(j) * in;
        for (int k = 0; k < in; ++k) dxi[k] += g * wj[k];
      }
    }
  }
}

void relu_mask(const double* h, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (h[i] <= 0.0) grad[i] = 0.0;
  }
}

}  // namespace

Mlp Mlp::create(int in, int hidden, int out, Rng& rng) {
  Mlp net;
  net.in = in;
  net.hidden = hidden;
  net.out = out;
  const auto fill = [&rng](std::vector<double>& v, std::size_t n, double bound) {
    v.resize(n);
    for (auto& x : v) x = rng.uniform(-bound, bound);
  };
  fill(net.w1, static_cast<std::size_t>(hidden) * in, 1.0 / std::sqrt(in));
  fill(net.b1, hidden, 1.0 / std::sqrt(in));
  fill(net.w2, static_cast<std::size_t>(hidden) * hidden,
       1.0 / std::sqrt(hidden));
  fill(net.b2, hidden, 1.0 / std::sqrt(hidden));
  fill(net.w3, static_cast<std::size_t>(out) * hidden, 3e-3);
  fill(net.b3, out, 3e-3);
  return net;
}

std::size_t Mlp::param_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

std::array<std::vector<double>*, 6> Mlp::tensors() {
  return {&w1, &b1, &w2, &b2, &w3, &b3};
}

std::array<const std::vector<double>*, 6> Mlp::tensors() const {
  return {&w1, &b1, &w2, &b2, &w3, &b3};
}

void MlpGrads::match(const Mlp& net) {
  w1.assign(net.w1.size(), 0.0);
  b1.assign(net.b1.size(), 0.0);
  w2.assign(net.w2.size(), 0.0);
  b2.assign(net.b2.size(), 0.0);
  w3.assign(net.w3.size(), 0.0);
  b3.assign(net.b3.size(), 0.0);
}

void MlpGrads::zero() {
  for (auto* t : tensors()) {
    for (auto& x : *t) x = 0.0;
  }
}

std::array<std::vector<double>*, 6> MlpGrads::tensors() {
  return {&w1, &b1, &w2, &b2, &w3, &b3};
}

std::array<const std::vector<double>*, 6> MlpGrads::tensors() const {
  return {&w1, &b1, &w2, &b2, &w3, &b3};
}

void mlp_forward(const Mlp& net, const double* x, int batch, MlpCache& cache) {
  cache.batch = batch;
  cache.x.assign(x, x + static_cast<std::size_t>(batch) * net.in);
  cache.h1.resize(static_cast<std::size_t>(batch) * net.hidden);
  cache.h2.resize(static_cast<std::size_t>(batch) * net.hidden);
  cache.y.resize(static_cast<std::size_t>(batch) * net.out);
  linear_forward(x, batch, net.in, net.hidden, net.w1, net.b1, cache.h1.data());
  relu_inplace(cache.h1.data(), cache.h1.size());
  linear_forward(cache.h1.data(), batch, net.hidden, net.hidden, net.w2,
                 net.b2, cache.h2.data());
  relu_inplace(cache.h2.data(), cache.h2.size());
  linear_forward(cache.h2.data(), batch, net.hidden, net.out, net.w3, net.b3,
                 cache.y.data());
}

void mlp_backward(const Mlp& net, const MlpCache& cache, const double* dy,
                  MlpGrads& grads, double* dx) {
  const int batch = cache.batch;
  std::vector<double> dh2(static_cast<std::size_t>(batch) * net.hidden);
  std::vector<double> dh1(static_cast<std::size_t>(batch) * net.hidden);
  linear_backward(cache.h2.data(), dy, batch, net.hidden, net.out, net.w3,
                  &grads.w3, &grads.b3, dh2.data());
  relu_mask(cache.h2.data(), dh2.data(), dh2.size());
  linear_backward(cache.h1.data(), dh2.data(), batch, net.hidden, net.hidden,
                  net.w2, &grads.w2, &grads.b2, dh1.data());
  relu_mask(cache.h1.data(), dh1.data(), dh1.size());
  linear_backward(cache.x.data(), dh1.data(), batch, net.in, net.hidden,
                  net.w1, &grads.w1, &grads.b1, dx);
}

void mlp_input_grad(const Mlp& net, const MlpCache& cache, const double* dy,
                    double* dx) {
  const int batch = cache.batch;
  std::vector<double> dh2(static_cast<std::size_t>(batch) * net.hidden);
  std::vector<double> dh1(static_cast<std::size_t>(batch) * net.hidden);
  linear_backward(nullptr, dy, batch, net.hidden, net.out, net.w3, nullptr,
                  nullptr, dh2.data());
  relu_mask(cache.h2.data(), dh2.data(), dh2.size());
  linear_backward(nullptr, dh2.data(), batch, net.hidden, net.hidden, net.w2,
                  nullptr, nullptr, dh1.data());
  relu_mask(cache.h1.data(), dh1.data(), dh1.size());
  linear_backward(nullptr, dh1.data(), batch, net.in, net.hidden, net.w1,
                  nullptr, nullptr, dx);
}

void AdamState::match(const Mlp& net) {
  m.clear();
  v.clear();
  for (const auto* tensor : net.tensors()) {
    m.emplace_back(tensor->size(), 0.0);
    v.emplace_back(tensor->size(), 0.0);
  }
  t = 0;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr) {
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  auto params = net.tensors();
  auto gs = grads.tensors();
  for (std::size_t ti = 0; ti < params.size(); ++ti) {
    auto& p = *params[ti];
    const auto& g = *gs[ti];
    auto& m = state.m[ti];
    auto& v = state.v[ti];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

void clip_grad_norm(MlpGrads& grads, double max_norm) {
  double norm_sq = 0.0;
  for (const auto* t : grads.tensors()) {
    for (double g : *t) norm_sq += g * g;
  }
  const double norm = std::sqrt(norm_sq);
  if (norm <= max_norm || norm <= 0.0) return;
  const double scale = max_norm / norm;
  for (auto* t : grads.tensors()) {
    for (auto& g : *t) g *= scale;
  }
}

void soft_update(const Mlp& online, Mlp& target, double tau) {
  auto src = online.tensors();
  auto dst = target.tensors();
  for (std::size_t ti = 0; ti < src.size(); ++ti) {
    const auto& s = *src[ti];
    auto& d = *dst[ti];
    for (std::size_t i = 0; i < s.size(); ++i) {
      d[i] = tau * s[i] + (1.0 - tau) * d[i];
    }
  }
}

bool all_finite(const Mlp& net) {
  for (const auto* t : net.tensors()) {
    for (double x : *t) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

}  // namespace marlot::marl
