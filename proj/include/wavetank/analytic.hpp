#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Core>

#include "wavetank/core_model.hpp"
#include "wavetank/errors.hpp"

namespace wavetank {

/// Gaussian envelope launched with momentum p0 into a constant force F.
///
/// A(tau, 0) = exp(-tau^2 / tau0^2) exp(-i p0 tau); everything below is the
/// closed-form solution of  i dA/dxi = (d^2/dtau^2 + F tau) A  for that input.
/// No grids live here: these functions are the reference the numerics are
/// checked against.
template <typename Scalar = double>
class GaussianState {
public:
  GaussianState(DimensionlessFrame<Scalar> frame, Scalar p0, Scalar force)
      : frame_(std::move(frame)), p0_(p0), force_(force) {}

  /// Momentum and force taken from the frame's physical parameters.
  explicit GaussianState(DimensionlessFrame<Scalar> frame)
      : GaussianState(frame, effective_momentum(frame.params()), frame.params().force()) {}

  const DimensionlessFrame<Scalar>& frame() const noexcept { return frame_; }
  Scalar p0() const noexcept { return p0_; }
  Scalar force() const noexcept { return force_; }
  Scalar tau0() const noexcept { return frame_.tau0(); }
  Scalar xi_s() const noexcept { return frame_.xi_s(); }

  GaussianState at_rest() const { return GaussianState(frame_, Scalar(0), force_); }

private:
  DimensionlessFrame<Scalar> frame_;
  Scalar p0_;
  Scalar force_;
};

/// Classical trajectory of the envelope maximum: tau_cm = 2 p0 xi + F xi^2.
template <typename Scalar>
Scalar peak_location(const GaussianState<Scalar>& s, Scalar xi) {
  return Scalar(2) * s.p0() * xi + s.force() * xi * xi;
}

/// Width growth factor 1 + xi^2 / xi_s^2.
template <typename Scalar>
Scalar spreading(const GaussianState<Scalar>& s, Scalar xi) {
  const Scalar r = xi / s.xi_s();
  return Scalar(1) + r * r;
}

template <typename Scalar>
Scalar envelope_magnitude(const GaussianState<Scalar>& s, Scalar tau, Scalar xi) {
  const Scalar sp = spreading(s, xi);
  const Scalar u = tau - peak_location(s, xi);
  return std::pow(sp, Scalar(-0.25)) * std::exp(-u * u / (s.tau0() * s.tau0() * sp));
}

/// Unwrapped phase of the envelope. The terms are, in order: Gouy, chirp,
/// force-momentum coupling, Kennard (F^2 xi^3 / 3), initial momentum, free
/// momentum phase, and the p0 F cross term.
template <typename Scalar>
Scalar envelope_phase(const GaussianState<Scalar>& s, Scalar tau, Scalar xi) {
  const Scalar p0 = s.p0();
  const Scalar F = s.force();
  const Scalar ratio = xi / s.xi_s();
  const Scalar sp = Scalar(1) + ratio * ratio;
  const Scalar u = tau - peak_location(s, xi);
  return Scalar(0.5) * std::atan(ratio)                     //
         - ratio * u * u / (s.tau0() * s.tau0() * sp)       //
         - F * (tau - Scalar(2) * p0 * xi) * xi             //
         + F * F * xi * xi * xi / Scalar(3)                 //
         - p0 * tau                                         //
         + p0 * p0 * xi                                     //
         - p0 * F * xi * xi;
}

template <typename Scalar>
std::complex<Scalar> envelope(const GaussianState<Scalar>& s, Scalar tau, Scalar xi) {
  return std::polar(envelope_magnitude(s, tau, xi), envelope_phase(s, tau, xi));
}

/// Envelope sampled on an array of tau values at fixed xi.
template <typename Derived>
Eigen::Array<std::complex<typename Derived::Scalar>, Eigen::Dynamic, 1> envelope(
    const GaussianState<typename Derived::Scalar>& s, const Eigen::ArrayBase<Derived>& tau,
    typename Derived::Scalar xi) {
  using Scalar = typename Derived::Scalar;
  Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> out(tau.size());
  for (Eigen::Index i = 0; i < tau.size(); ++i) out(i) = envelope(s, Scalar(tau(i)), xi);
  return out;
}

/// Phase at the envelope maximum, split into its physical contributions.
template <typename Scalar>
struct PhaseDecomposition {
  Scalar gouy;             ///< (1/2) atan(xi / xi_s)
  Scalar kennard;          ///< -(2/3) F^2 xi^3
  Scalar momentum_linear;  ///< -p0^2 xi
  Scalar cross;            ///< -2 p0 F xi^2
  Scalar total;
};

template <typename Scalar>
PhaseDecomposition<Scalar> decompose_phase_at_maximum(const GaussianState<Scalar>& s, Scalar xi) {
  const Scalar F = s.force();
  const Scalar p0 = s.p0();
  PhaseDecomposition<Scalar> d{};
  d.gouy = Scalar(0.5) * std::atan(xi / s.xi_s());
  d.kennard = -Scalar(2) / Scalar(3) * F * F * xi * xi * xi;
  d.momentum_linear = -p0 * p0 * xi;
  d.cross = -Scalar(2) * p0 * F * xi * xi;
  d.total = d.gouy + d.kennard + d.momentum_linear + d.cross;
  return d;
}

/// Reduced expression for envelope_phase(s, peak_location(s, xi), xi).
template <typename Scalar>
Scalar phase_at_maximum(const GaussianState<Scalar>& s, Scalar xi) {
  return decompose_phase_at_maximum(s, xi).total;
}

/// The phase contributions that are switched on by the force.
template <typename Scalar>
Scalar force_induced_phase(Scalar p0, Scalar force, Scalar xi) {
  return -Scalar(2) / Scalar(3) * force * force * xi * xi * xi - Scalar(2) * p0 * force * xi * xi;
}

namespace detail {

template <typename Scalar>
void require_galilean_pair(const GaussianState<Scalar>& moving, const GaussianState<Scalar>& rest) {
  const Scalar tau_mismatch = std::abs(moving.tau0() - rest.tau0());
  if (!(tau_mismatch <= Scalar(1e-12) * moving.tau0()) || moving.force() != rest.force()) {
    throw InvalidComparison("Galilean comparison needs states with the same frame and force");
  }
  if (rest.p0() != Scalar(0)) {
    throw InvalidComparison("reference state must have zero initial momentum");
  }
}

}  // namespace detail

/// |A(tau, xi)| - |A0(tau - 2 p0 xi, xi)|; zero for a boosted Gaussian.
template <typename Scalar>
Scalar galilean_amplitude_shift(const GaussianState<Scalar>& moving, const GaussianState<Scalar>& rest,
                                Scalar tau, Scalar xi) {
  detail::require_galilean_pair(moving, rest);
  const Scalar shifted = tau - Scalar(2) * moving.p0() * xi;
  return envelope_magnitude(moving, tau, xi) - envelope_magnitude(rest, shifted, xi);
}

/// phi(tau, xi) - [phi0(tau - 2 p0 xi, xi) - p0 tau + p0^2 xi - p0 F xi^2].
template <typename Scalar>
Scalar galilean_phase_relation(const GaussianState<Scalar>& moving, const GaussianState<Scalar>& rest,
                               Scalar tau, Scalar xi) {
  detail::require_galilean_pair(moving, rest);
  const Scalar p0 = moving.p0();
  const Scalar F = moving.force();
  const Scalar shifted = tau - Scalar(2) * p0 * xi;
  const Scalar boosted = envelope_phase(rest, shifted, xi) - p0 * tau + p0 * p0 * xi - p0 * F * xi * xi;
  return envelope_phase(moving, tau, xi) - boosted;
}

}  // namespace wavetank
