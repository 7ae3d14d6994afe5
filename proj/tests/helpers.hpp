#pragma once

#include "wavetank/wavetank.hpp"

namespace wavetank::test {

inline PhysicalParams<double> lab(double k0, double a0, double t0, double omega = 0, double force = 0,
                                  double g = 9.81) {
  ParamValues<double> v;
  v.k0 = k0;
  v.g = g;
  v.a0 = a0;
  v.t0 = t0;
  v.epsilon = k0 * a0;
  v.omega_detuning = omega;
  v.force = force;
  return PhysicalParams<double>(v);
}

// Tank settings of the two published experiments.
inline PhysicalParams<double> fig1_params(double omega = 0, double force = 0) {
  return lab(20, 0.003, 0.8, omega, force);
}
inline PhysicalParams<double> fig2_params(double omega = 0, double force = 0) {
  return lab(20, 0.006, 0.8, omega, force);
}

}  // namespace wavetank::test
