#pragma once

#include <optional>

namespace marlot::sut {

/// Intelligent Driver Model parameters. Defaults are the standard published
/// values for passenger cars.
struct IdmParams {
  double v0 = 20.0;    // desired speed, m/s
  double T = 1.5;      // time headway, s
  double a = 2.0;      // max acceleration, m/s^2
  double b = 2.0;      // comfortable deceleration, m/s^2
  double delta = 4.0;  // acceleration exponent
  double s0 = 2.0;     // jam distance, m
};

/// Car-following acceleration a*[1 - (v/v0)^delta - (s*/gap)^2] with
/// s* = s0 + max(0, v*T + v*dv/(2*sqrt(a*b))).
/// `gap` may be infinite (free road). Returns nullopt when gap <= 0, which
/// the caller treats as "already overlapping".
std::optional<double> idm_acceleration(double v, double gap,
                                       double approach_rate,
                                       const IdmParams& params);

}  // namespace marlot::sut
