#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "wavetank/errors.hpp"

namespace wavetank {

/// Raw laboratory inputs; validated by `PhysicalParams`.
template <typename Scalar = double>
struct ParamValues {
  Scalar k0{};                    ///< carrier wavenumber [1/m]
  Scalar g = Scalar(9.81);        ///< gravitational acceleration [m/s^2]
  Scalar a0{};                    ///< peak envelope amplitude [m]
  Scalar t0{};                    ///< initial pulse duration [s]
  Scalar omega_detuning{};        ///< wave-maker detuning from the carrier [rad/s]
  Scalar epsilon{};               ///< steepness k0 * a0
  Scalar force{};                 ///< dimensionless effective force
};

/// Laboratory-frame constants of one deep-water experiment.
///
/// The carrier frequency and group velocity are always derived from k0 and g,
/// so the dispersion relation cannot be violated by a stale copy.
template <typename Scalar = double>
class PhysicalParams {
public:
  static constexpr Scalar kMaxSteepness = Scalar(0.3);
  static constexpr Scalar kSteepnessWarning = Scalar(0.15);
  static constexpr Scalar kSteepnessConsistency = Scalar(1e-9);

  explicit PhysicalParams(const ParamValues<Scalar>& v) : v_(v) {
    require_positive("k0", v.k0);
    require_positive("g", v.g);
    require_positive("a0", v.a0);
    require_positive("t0", v.t0);
    if (!std::isfinite(v.omega_detuning)) {
      throw InvalidParameter("omega_detuning", "must be finite");
    }
    if (!std::isfinite(v.force)) {
      throw InvalidParameter("force", "must be finite");
    }
    if (!(v.epsilon > 0) || !(v.epsilon < kMaxSteepness)) {
      throw InvalidParameter("epsilon", "steepness must lie in (0, 0.3) for the linear regime");
    }
    const Scalar mismatch = std::abs(v.epsilon - v.k0 * v.a0) / v.epsilon;
    if (!(mismatch < kSteepnessConsistency)) {
      throw InvalidParameter("epsilon", "inconsistent with k0 * a0 = " +
                                            std::to_string(static_cast<double>(v.k0 * v.a0)));
    }
  }

  Scalar k0() const noexcept { return v_.k0; }
  Scalar g() const noexcept { return v_.g; }
  Scalar a0() const noexcept { return v_.a0; }
  Scalar t0() const noexcept { return v_.t0; }
  Scalar omega_detuning() const noexcept { return v_.omega_detuning; }
  Scalar epsilon() const noexcept { return v_.epsilon; }
  Scalar force() const noexcept { return v_.force; }

  Scalar omega0() const noexcept { return std::sqrt(v_.k0 * v_.g); }
  Scalar group_velocity() const noexcept { return omega0() / (Scalar(2) * v_.k0); }

  /// Steepness above 0.15 is accepted but leaves the well-tested linear range.
  bool high_steepness() const noexcept { return v_.epsilon > kSteepnessWarning; }

  const ParamValues<Scalar>& values() const noexcept { return v_; }

  PhysicalParams with_detuning(Scalar omega) const {
    auto v = v_;
    v.omega_detuning = omega;
    return PhysicalParams(v);
  }

  PhysicalParams with_force(Scalar force) const {
    auto v = v_;
    v.force = force;
    return PhysicalParams(v);
  }

private:
  static void require_positive(const char* field, Scalar value) {
    if (!(value > 0) || !std::isfinite(value)) {
      throw InvalidParameter(field, "must be positive and finite");
    }
  }

  ParamValues<Scalar> v_;
};

template <typename Scalar>
struct Frequencies {
  Scalar omega0;          ///< carrier angular frequency [rad/s]
  Scalar group_velocity;  ///< [m/s]
};

/// Deep-water dispersion: omega0^2 = k0 g and c_g = omega0 / (2 k0).
template <typename Scalar>
Frequencies<Scalar> derive_frequencies(Scalar k0, Scalar g) {
  if (!(k0 > 0)) throw InvalidParameter("k0", "must be positive");
  if (!(g > 0)) throw InvalidParameter("g", "must be positive");
  const Scalar omega0 = std::sqrt(k0 * g);
  return {omega0, omega0 / (Scalar(2) * k0)};
}

template <typename Scalar>
Frequencies<Scalar> derive_frequencies(const PhysicalParams<Scalar>& params) {
  return derive_frequencies(params.k0(), params.g());
}

/// Dimensionless initial momentum p0 = Omega0 / (epsilon omega0).
template <typename Scalar>
Scalar effective_momentum(const PhysicalParams<Scalar>& params) {
  return params.omega_detuning() / (params.epsilon() * params.omega0());
}

/// Comoving dimensionless frame attached to a set of physical parameters.
template <typename Scalar = double>
class DimensionlessFrame {
public:
  explicit DimensionlessFrame(PhysicalParams<Scalar> params) : params_(std::move(params)) {}

  const PhysicalParams<Scalar>& params() const noexcept { return params_; }

  /// tau0 = epsilon omega0 t0
  Scalar tau0() const noexcept { return params_.epsilon() * params_.omega0() * params_.t0(); }
  /// xi_s = tau0^2 / 4
  Scalar xi_s() const noexcept { return tau0() * tau0() / Scalar(4); }

  Scalar xi_per_metre() const noexcept {
    return params_.epsilon() * params_.epsilon() * params_.k0();
  }
  Scalar tau_per_second() const noexcept { return params_.epsilon() * params_.omega0(); }

private:
  PhysicalParams<Scalar> params_;
};

template <typename Scalar>
struct ComovingPoint {
  Scalar xi;
  Scalar tau;
};

template <typename Scalar>
struct LabPoint {
  Scalar x;  ///< [m]
  Scalar t;  ///< [s]
};

/// xi = eps^2 k0 x,  tau = eps omega0 (x / c_g - t)
template <typename Scalar>
ComovingPoint<Scalar> to_dimensionless(const DimensionlessFrame<Scalar>& frame, Scalar x, Scalar t) {
  const auto& p = frame.params();
  return {frame.xi_per_metre() * x, frame.tau_per_second() * (x / p.group_velocity() - t)};
}

template <typename Scalar>
LabPoint<Scalar> from_dimensionless(const DimensionlessFrame<Scalar>& frame, Scalar xi, Scalar tau) {
  const auto& p = frame.params();
  const Scalar x = xi / frame.xi_per_metre();
  return {x, x / p.group_velocity() - tau / frame.tau_per_second()};
}

}  // namespace wavetank
