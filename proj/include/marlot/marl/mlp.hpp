#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "marlot/rng.hpp"

namespace marlot::marl {

/// Fully-connected net with two rectifier hidden layers, batched forward and
/// backward passes on flat row-major buffers. Actors and critics are both
/// this shape; output squashing lives with the action box, not here.
struct Mlp {
  int in = 0;
  int hidden = 0;
  int out = 0;
  std::vector<double> w1, b1, w2, b2, w3, b3;

  /// Hidden layers: uniform(-1/sqrt(fan_in), ..); output layer: uniform
  /// (-3e-3, 3e-3) so initial policies sit near the squash midpoint.
  static Mlp create(int in, int hidden, int out, Rng& rng);

  std::size_t param_count() const;
  std::array<std::vector<double>*, 6> tensors();
  std::array<const std::vector<double>*, 6> tensors() const;
};

struct MlpCache {
  int batch = 0;
  std::vector<double> x, h1, h2, y;
};

struct MlpGrads {
  std::vector<double> w1, b1, w2, b2, w3, b3;

  void match(const Mlp& net);
  void zero();
  std::array<std::vector<double>*, 6> tensors();
  std::array<const std::vector<double>*, 6> tensors() const;
};

/// y (batch x out) into cache; x is batch x in.
void mlp_forward(const Mlp& net, const double* x, int batch, MlpCache& cache);

/// Accumulates parameter gradients for dL/dy (batch x out); when dx is given
/// also produces dL/dx (batch x in).
void mlp_backward(const Mlp& net, const MlpCache& cache, const double* dy,
                  MlpGrads& grads, double* dx = nullptr);

/// dL/dx only, parameters untouched (actor updates backpropagate through a
/// frozen critic).
void mlp_input_grad(const Mlp& net, const MlpCache& cache, const double* dy,
                    double* dx);

struct AdamState {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long t = 0;
  std::vector<std::vector<double>> m, v;

  void match(const Mlp& net);
};

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double lr);

/// Scales the gradient set so its global L2 norm is at most `max_norm`.
void clip_grad_norm(MlpGrads& grads, double max_norm);

/// target <- tau * online + (1 - tau) * target
void soft_update(const Mlp& online, Mlp& target, double tau);

bool all_finite(const Mlp& net);

}  // namespace marlot::marl
