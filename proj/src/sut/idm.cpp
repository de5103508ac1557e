#include "marlot/sut/idm.hpp"

#include <algorithm>
#include <cmath>

namespace marlot::sut {

std::optional<double> idm_acceleration(double v, double gap,
                                       double approach_rate,
                                       const IdmParams& params) {
  if (gap <= 0.0) return std::nullopt;
  const double free_term = std::pow(v / params.v0, params.delta);
  double interaction = 0.0;
  if (std::isfinite(gap)) {
    const double s_star =
        params.s0 + std::max(0.0, v * params.T + v * approach_rate /
                                      (2.0 * std::sqrt(params.a * params.b)));
    interaction = (s_star / gap) * (s_star / gap);
  }
  return params.a * (1.0 - free_term - interaction);
}

}  // namespace marlot::sut
