#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "wavetank/analytic.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/phase.hpp"

namespace wavetank {

/// Periodic tau grid: tau_j = tau_min + j * (tau_max - tau_min) / n, j = 0..n-1.
template <typename Scalar = double>
struct GridSpec {
  Scalar tau_min{};
  Scalar tau_max{};
  Eigen::Index n{};

  Scalar spacing() const { return (tau_max - tau_min) / Scalar(n); }

  void validate() const {
    if (n < 16 || (n & (n - 1)) != 0) {
      throw InvalidParameter("n", "grid size must be a power of two >= 16");
    }
    if (!(tau_max > tau_min) || !std::isfinite(tau_min) || !std::isfinite(tau_max)) {
      throw InvalidParameter("tau_max", "grid bounds must satisfy tau_min < tau_max");
    }
  }

  Eigen::Array<Scalar, Eigen::Dynamic, 1> taus() const {
    return Eigen::Array<Scalar, Eigen::Dynamic, 1>::LinSpaced(n, Scalar(0), Scalar(n - 1)) * spacing() +
           tau_min;
  }
};

/// Complex envelope A(tau, xi) sampled on a periodic grid at one xi.
template <typename Scalar = double>
class EnvelopeField {
public:
  using Complex = std::complex<Scalar>;
  using Values = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  EnvelopeField(GridSpec<Scalar> grid, Scalar xi, Values values)
      : grid_(grid), xi_(xi), values_(std::move(values)) {
    grid_.validate();
    if (values_.size() != grid_.n) {
      throw InvalidParameter("values", "sample count does not match the grid size");
    }
    const Scalar nrm = norm();
    if (!std::isfinite(nrm)) throw NumericalInstability("envelope norm is not finite");
    if (!(nrm > 0)) throw EmptyField("envelope is identically zero");
  }

  const GridSpec<Scalar>& grid() const noexcept { return grid_; }
  Eigen::Index size() const noexcept { return grid_.n; }
  Scalar xi() const noexcept { return xi_; }
  Scalar spacing() const { return grid_.spacing(); }
  Scalar tau(Eigen::Index j) const { return grid_.tau_min + Scalar(j) * spacing(); }
  Eigen::Array<Scalar, Eigen::Dynamic, 1> taus() const { return grid_.taus(); }
  const Values& values() const noexcept { return values_; }

  /// Discrete norm sum |A|^2 dtau.
  Scalar norm() const { return values_.squaredNorm() * spacing(); }

private:
  GridSpec<Scalar> grid_;
  Scalar xi_;
  Values values_;
};

template <typename Scalar = double>
struct SolverConfig {
  Scalar d_xi{};
  Scalar boundary_margin = Scalar(0.05);  ///< fraction of the grid at each edge kept near zero
  Scalar norm_drift_tol = Scalar(1e-10);  ///< relative drift allowed over one propagation
  int max_halvings = 3;                   ///< step halvings tried on norm drift before giving up

  void validate() const {
    if (!(d_xi > 0) || !std::isfinite(d_xi)) throw InvalidParameter("d_xi", "must be positive");
    if (!(boundary_margin >= 0) || !(boundary_margin < Scalar(0.5))) {
      throw InvalidParameter("boundary_margin", "must lie in [0, 0.5)");
    }
    if (!(norm_drift_tol > 0)) throw InvalidParameter("norm_drift_tol", "must be positive");
  }
};

/// d_xi = xi_s / 2000.
template <typename Scalar>
SolverConfig<Scalar> default_solver_config(const DimensionlessFrame<Scalar>& frame) {
  SolverConfig<Scalar> cfg;
  cfg.d_xi = frame.xi_s() / Scalar(2000);
  return cfg;
}

/// Largest |2 p0 xi + F xi^2| over xi in [0, xi_max].
template <typename Scalar>
Scalar max_travel(Scalar p0, Scalar force, Scalar xi_max) {
  auto tau_cm = [&](Scalar xi) { return Scalar(2) * p0 * xi + force * xi * xi; };
  Scalar travel = std::max(std::abs(tau_cm(Scalar(0))), std::abs(tau_cm(xi_max)));
  if (force != Scalar(0)) {
    const Scalar turning = -p0 / force;
    if (turning > 0 && turning < xi_max) travel = std::max(travel, std::abs(tau_cm(turning)));
  }
  return travel;
}

/// Symmetric grid holding 8 widths of the spread packet plus its travel on
/// each side, with the smallest power-of-two size giving dtau <= tau0 / 32.
template <typename Scalar>
GridSpec<Scalar> default_grid(const DimensionlessFrame<Scalar>& frame, Scalar p0, Scalar force,
                              Scalar xi_max) {
  const Scalar tau0 = frame.tau0();
  const Scalar stretch = std::sqrt(Scalar(1) + (xi_max / frame.xi_s()) * (xi_max / frame.xi_s()));
  const Scalar half = Scalar(8) * tau0 * stretch + max_travel(p0, force, xi_max);
  Eigen::Index n = 16;
  while (Scalar(2) * half / Scalar(n) > tau0 / Scalar(32)) n *= 2;
  return {-half, half, n};
}

/// A(tau, 0) = exp(-tau^2 / tau0^2) exp(-i p0 tau) on `grid`.
template <typename Scalar>
EnvelopeField<Scalar> init_gaussian(const DimensionlessFrame<Scalar>& frame, Scalar p0,
                                    const GridSpec<Scalar>& grid) {
  grid.validate();
  const GaussianState<Scalar> state(frame, p0, Scalar(0));
  const auto taus = grid.taus();
  typename EnvelopeField<Scalar>::Values values(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const Scalar t = taus(j);
    values(j) = std::polar(std::exp(-t * t / (frame.tau0() * frame.tau0())), -p0 * t);
  }
  const Scalar edge = std::max(std::abs(values(0)), std::abs(values(grid.n - 1)));
  if (!(edge < Scalar(1e-8))) {
    throw BoundaryLeak("initial Gaussian is not contained in the grid (edge amplitude " +
                       std::to_string(static_cast<double>(edge)) + ")");
  }
  return EnvelopeField<Scalar>(grid, Scalar(0), std::move(values));
}

/// Strang split-step integrator for  i dA/dxi = (d^2/dtau^2 + F tau) A.
///
/// One step is exp(-i F tau h/2) . IFFT exp(+i Omega^2 h) FFT . exp(-i F tau h/2).
/// The potential uses the true (non-periodic) tau values; the packet must stay
/// away from the grid edges, which `check_boundary` enforces.
template <typename Scalar = double>
class SplitStepPropagator {
public:
  using Complex = std::complex<Scalar>;
  using Values = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  SplitStepPropagator(const GridSpec<Scalar>& grid, Scalar force, Scalar h)
      : grid_(grid), force_(force), h_(h) {
    grid_.validate();
    const Eigen::Index n = grid_.n;
    taus_ = grid_.taus();
    omega_sq_.resize(n);
    const Scalar dw = Scalar(2) * std::numbers::pi_v<Scalar> / (Scalar(n) * grid_.spacing());
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index signed_k = k <= n / 2 ? k : k - n;
      const Scalar w = dw * Scalar(signed_k);
      omega_sq_(k) = w * w;
    }
    build(h_, half_potential_, kinetic_);
    spectrum_.resize(n);
  }

  Scalar step_size() const noexcept { return h_; }

  /// Advance by the configured step.
  void advance(Values& a) { apply(a, half_potential_, kinetic_); }

  /// Advance by an arbitrary step h (used for the final partial step).
  void advance(Values& a, Scalar h) {
    Values half_potential, kinetic;
    build(h, half_potential, kinetic);
    apply(a, half_potential, kinetic);
  }

private:
  void build(Scalar h, Values& half_potential, Values& kinetic) const {
    const Eigen::Index n = grid_.n;
    half_potential.resize(n);
    kinetic.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      half_potential(j) = std::polar(Scalar(1), -force_ * taus_(j) * h / Scalar(2));
      kinetic(j) = std::polar(Scalar(1), omega_sq_(j) * h);
    }
  }

  void apply(Values& a, const Values& half_potential, const Values& kinetic) {
    a.array() *= half_potential.array();
    fft_.fwd(spectrum_, a);
    spectrum_.array() *= kinetic.array();
    fft_.inv(a, spectrum_);
    a.array() *= half_potential.array();
  }

  GridSpec<Scalar> grid_;
  Scalar force_;
  Scalar h_;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> taus_;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> omega_sq_;
  Values half_potential_;
  Values kinetic_;
  Values spectrum_;
  Eigen::FFT<Scalar> fft_;
};

namespace detail {

inline constexpr double kStepNormTol = 1e-12;
inline constexpr double kBoundaryLeakTol = 1e-6;

template <typename Scalar>
void check_boundary(const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& a, Scalar margin,
                    Scalar xi) {
  const Eigen::Index n = a.size();
  const Eigen::Index edge = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(margin * Scalar(n))));
  const Scalar peak = a.cwiseAbs().maxCoeff();
  const Scalar lo = a.head(edge).cwiseAbs().maxCoeff();
  const Scalar hi = a.tail(edge).cwiseAbs().maxCoeff();
  if (std::max(lo, hi) > Scalar(kBoundaryLeakTol) * peak) {
    throw BoundaryLeak("envelope reached the grid margin at xi = " + std::to_string(static_cast<double>(xi)) +
                       " (relative edge amplitude " + std::to_string(static_cast<double>(std::max(lo, hi) / peak)) +
                       ")");
  }
}

template <typename Scalar>
void check_step_norm(Scalar before, Scalar after, Scalar xi) {
  if (!(std::abs(after - before) <= Scalar(kStepNormTol) * before)) {
    throw NumericalInstability("norm drift above 1e-12 in a single step at xi = " +
                               std::to_string(static_cast<double>(xi)));
  }
}

template <typename Scalar>
EnvelopeField<Scalar> propagate_once(const EnvelopeField<Scalar>& field, Scalar force, Scalar xi_target,
                                     const SolverConfig<Scalar>& config) {
  const Scalar distance = xi_target - field.xi();
  if (distance == Scalar(0)) return field;
  SplitStepPropagator<Scalar> prop(field.grid(), force, config.d_xi);
  auto a = field.values();
  const Scalar norm0 = a.squaredNorm();
  Scalar prev = norm0;
  const auto full_steps = static_cast<long long>(std::floor(distance / config.d_xi));
  Scalar xi = field.xi();
  auto after_step = [&](Scalar new_xi) {
    const Scalar now = a.squaredNorm();
    check_step_norm(prev, now, new_xi);
    if (!(std::abs(now - norm0) <= config.norm_drift_tol * norm0)) {
      throw NumericalInstability("cumulative norm drift above tolerance at xi = " +
                                 std::to_string(static_cast<double>(new_xi)));
    }
    prev = now;
    check_boundary(a, config.boundary_margin, new_xi);
  };
  for (long long s = 0; s < full_steps; ++s) {
    prop.advance(a);
    xi = field.xi() + Scalar(s + 1) * config.d_xi;
    after_step(xi);
  }
  const Scalar rest = xi_target - xi;
  if (rest > distance * std::numeric_limits<Scalar>::epsilon() * Scalar(16)) {
    prop.advance(a, rest);
    after_step(xi_target);
  }
  return EnvelopeField<Scalar>(field.grid(), xi_target, std::move(a));
}

}  // namespace detail

/// One Strang step of size config.d_xi.
template <typename Scalar>
EnvelopeField<Scalar> step(const EnvelopeField<Scalar>& field, Scalar force, const SolverConfig<Scalar>& config) {
  config.validate();
  return detail::propagate_once(field, force, field.xi() + config.d_xi, config);
}

/// Advance to xi_target, shortening the last step to land on it exactly.
/// On norm drift the step is halved (up to config.max_halvings times) and the
/// run restarted from `field`.
template <typename Scalar>
EnvelopeField<Scalar> propagate(const EnvelopeField<Scalar>& field, Scalar force, Scalar xi_target,
                                const SolverConfig<Scalar>& config) {
  config.validate();
  if (xi_target < field.xi()) {
    throw InvalidParameter("xi_target", "cannot propagate backwards");
  }
  auto cfg = config;
  for (int attempt = 0;; ++attempt) {
    try {
      return detail::propagate_once(field, force, xi_target, cfg);
    } catch (const NumericalInstability&) {
      if (attempt >= config.max_halvings) throw;
      cfg.d_xi /= Scalar(2);
    }
  }
}

template <typename Scalar>
struct FieldObservables {
  Scalar peak_tau;
  Scalar peak_magnitude;
  Scalar centroid_tau;
  Scalar rms_width;
  Scalar peak_phase;  ///< in (-pi, pi]; unwrapped locally around the peak
};

/// Peak by a 3-point parabola through log|A| (exact for Gaussians), phase by a
/// 3-point quadratic through the locally unwrapped phase.
template <typename Scalar>
FieldObservables<Scalar> sample_observables(const EnvelopeField<Scalar>& field) {
  const auto& a = field.values();
  const auto mag2 = a.cwiseAbs2().array().eval();
  const Scalar total = mag2.sum();
  if (!(total > 0)) throw EmptyField("envelope is identically zero");
  const auto taus = field.taus();
  FieldObservables<Scalar> obs{};
  obs.centroid_tau = (taus * mag2).sum() / total;
  obs.rms_width = std::sqrt(((taus - obs.centroid_tau).square() * mag2).sum() / total);

  Eigen::Index jmax = 0;
  mag2.maxCoeff(&jmax);
  const Scalar dtau = field.spacing();
  Scalar offset = 0;
  Scalar log_peak = Scalar(0.5) * std::log(mag2(jmax));
  Scalar phase = std::arg(a(jmax));
  if (jmax > 0 && jmax + 1 < field.size() && mag2(jmax - 1) > 0 && mag2(jmax + 1) > 0) {
    const Scalar lm = Scalar(0.5) * std::log(mag2(jmax - 1));
    const Scalar l0 = log_peak;
    const Scalar lp = Scalar(0.5) * std::log(mag2(jmax + 1));
    const Scalar curvature = lm - Scalar(2) * l0 + lp;
    if (curvature < 0) {
      offset = Scalar(0.5) * (lm - lp) / curvature;
      log_peak = l0 - Scalar(0.25) * (lm - lp) * offset;
    }
    const Scalar p0 = std::arg(a(jmax));
    const Scalar pm = nearest_branch(std::arg(a(jmax - 1)), p0);
    const Scalar pp = nearest_branch(std::arg(a(jmax + 1)), p0);
    // Lagrange quadratic through (-1, pm), (0, p0), (1, pp).
    phase = p0 + Scalar(0.5) * (pp - pm) * offset + Scalar(0.5) * (pp - Scalar(2) * p0 + pm) * offset * offset;
  }
  obs.peak_tau = field.tau(jmax) + offset * dtau;
  obs.peak_magnitude = std::exp(log_peak);
  obs.peak_phase = wrap_phase(phase);
  return obs;
}

}  // namespace wavetank
