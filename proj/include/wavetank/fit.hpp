#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wavetank/analytic.hpp"
#include "wavetank/core_model.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/phase.hpp"

namespace wavetank {

/// Mean arrival time of the packet at one gauge.
template <typename Scalar = double>
struct TrajectoryPoint {
  Scalar x;       ///< [m]
  Scalar t_mean;  ///< [s]
  Scalar weight = Scalar(1);
};

template <typename Scalar = double>
struct FitOptions {
  bool weighted = false;        ///< use TrajectoryPoint::weight
  bool with_intercept = false;  ///< diagnostic: add a constant term
};

template <typename Scalar = double>
struct TrajectoryFit {
  Scalar a1{};            ///< [s/m]
  Scalar a2{};            ///< [s/m^2]
  Scalar intercept{};     ///< [s], zero unless FitOptions::with_intercept
  Scalar residual_rms{};  ///< [s], against the fitted model
  Scalar c_g_recovered{};
  Scalar F_recovered{};
  Scalar omega_detuning{};
  std::size_t points{};
};

/// c_g = 1 / (a1 + 2 Omega0 / g)
template <typename Scalar>
Scalar group_velocity_from_a1(Scalar a1, Scalar omega_detuning, Scalar g) {
  const Scalar denom = a1 + Scalar(2) * omega_detuning / g;
  if (!(denom > 0)) throw DegenerateFit("linear coefficient gives a non-positive group velocity");
  return Scalar(1) / denom;
}

/// F = -(omega0 / (eps^3 k0^2)) a2
template <typename Scalar>
Scalar force_from_a2(Scalar a2, const PhysicalParams<Scalar>& params) {
  const Scalar eps = params.epsilon();
  return -(params.omega0() / (eps * eps * eps * params.k0() * params.k0())) * a2;
}

/// Least-squares fit of <t>(x) = a1 x + a2 x^2, then
/// c_g = 1 / (a1 + 2 Omega0 / g) and F = -(omega0 / (eps^3 k0^2)) a2.
template <typename Scalar>
TrajectoryFit<Scalar> fit_trajectory(std::span<const TrajectoryPoint<Scalar>> points, Scalar omega_detuning,
                                     const PhysicalParams<Scalar>& params, const FitOptions<Scalar>& opts = {}) {
  std::vector<Scalar> xs;
  for (const auto& p : points) xs.push_back(p.x);
  std::sort(xs.begin(), xs.end());
  const auto distinct = std::unique(xs.begin(), xs.end()) - xs.begin();
  if (distinct < 3) throw DegenerateFit("trajectory fit needs at least 3 distinct gauge positions");

  // Columns are scaled by the largest |x| to keep the normal matrix well conditioned.
  Scalar scale = 0;
  for (const auto& p : points) scale = std::max(scale, std::abs(p.x));
  const Eigen::Index cols = opts.with_intercept ? 3 : 2;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto n = static_cast<Eigen::Index>(points.size());
  Mat design(n, cols);
  Vec rhs(n), w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    const Scalar u = p.x / scale;
    design(i, 0) = u;
    design(i, 1) = u * u;
    if (opts.with_intercept) design(i, 2) = 1;
    rhs(i) = p.t_mean;
    w(i) = opts.weighted ? p.weight : Scalar(1);
    if (!(w(i) >= 0)) throw InvalidParameter("weight", "fit weights must be non-negative");
  }
  const Mat normal = design.transpose() * w.asDiagonal() * design;
  const Vec moment = design.transpose() * w.asDiagonal() * rhs;
  const Eigen::LDLT<Mat> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().cwiseAbs().minCoeff() > Scalar(1e-12) * normal.trace())) {
    throw DegenerateFit("trajectory design matrix is rank deficient");
  }
  const Vec b = ldlt.solve(moment);
  const Vec resid = rhs - design * b;

  TrajectoryFit<Scalar> fit;
  fit.a1 = b(0) / scale;
  fit.a2 = b(1) / (scale * scale);
  fit.intercept = opts.with_intercept ? b(2) : Scalar(0);
  fit.residual_rms = std::sqrt(resid.squaredNorm() / Scalar(n));
  fit.omega_detuning = omega_detuning;
  fit.c_g_recovered = group_velocity_from_a1(fit.a1, omega_detuning, params.g());
  fit.F_recovered = force_from_a2(fit.a2, params);
  fit.points = points.size();
  return fit;
}

template <typename Scalar>
TrajectoryFit<Scalar> fit_trajectory(std::span<const TrajectoryPoint<Scalar>> points,
                                     const PhysicalParams<Scalar>& params, const FitOptions<Scalar>& opts = {}) {
  return fit_trajectory(points, params.omega_detuning(), params, opts);
}

/// Phase measured at the envelope maximum of one gauge (any 2 pi branch).
template <typename Scalar = double>
struct GaugePhase {
  Scalar x;      ///< [m]
  Scalar phase;  ///< [rad]
};

/// Unwrap gauge phases along xi starting from phase 0 at xi = 0.
///
/// Each gauge takes the 2 pi branch nearest to the linear extrapolation of
/// the two previous points, so gauges must be dense enough that the phase
/// curvature between neighbours stays well below pi. A gauge at x = 0 is
/// taken as the zero reference and subtracted from every value.
template <typename Scalar>
std::vector<Scalar> unwrap_along_xi(std::span<const GaugePhase<Scalar>> gauges) {
  std::vector<Scalar> out(gauges.size());
  std::vector<std::pair<Scalar, Scalar>> anchors{{Scalar(0), Scalar(0)}};
  Scalar reference = 0;
  for (std::size_t i = 0; i < gauges.size(); ++i) {
    const Scalar x = gauges[i].x;
    if (i > 0 && !(x > gauges[i - 1].x)) throw InvalidParameter("x", "gauge positions must be strictly increasing");
    if (x < Scalar(0)) throw InvalidParameter("x", "gauge positions must be non-negative");
    if (x == Scalar(0)) {
      out[i] = reference = wrap_phase(gauges[i].phase);
      anchors = {{Scalar(0), reference}};
      continue;
    }
    Scalar predicted = anchors.back().second;
    if (anchors.size() >= 2) {
      const auto& [x1, p1] = anchors[anchors.size() - 2];
      const auto& [x2, p2] = anchors.back();
      predicted = p2 + (p2 - p1) * (x - x2) / (x2 - x1);
    }
    out[i] = nearest_branch(gauges[i].phase, predicted);
    anchors.emplace_back(x, out[i]);
  }
  for (auto& v : out) v -= reference;
  return out;
}

template <typename Scalar = double>
struct PhaseCurve {
  std::vector<Scalar> x;
  std::vector<Scalar> xi;
  std::vector<Scalar> phi_with_flow;
  std::vector<Scalar> phi_without_flow;
  std::vector<Scalar> phi_difference;
  std::vector<Scalar> model_difference;  ///< -(2/3) F^2 xi^3 - 2 p0 F xi^2
  std::vector<Scalar> deviation;         ///< phi_difference - model_difference
  Scalar max_abs_deviation{};
};

/// Per-gauge phase at the maximum with and without the force, referenced to
/// xi = 0, and their difference against the force-induced closed form.
template <typename Scalar>
PhaseCurve<Scalar> build_phase_curves(std::span<const GaugePhase<Scalar>> with_flow,
                                      std::span<const GaugePhase<Scalar>> without_flow,
                                      const DimensionlessFrame<Scalar>& frame, Scalar p0, Scalar force) {
  if (with_flow.size() != without_flow.size()) {
    throw InvalidComparison("gauge sets with and without flow differ in size");
  }
  for (std::size_t i = 0; i < with_flow.size(); ++i) {
    const Scalar a = with_flow[i].x;
    const Scalar b = without_flow[i].x;
    if (std::abs(a - b) > Scalar(1e-12) * std::max(Scalar(1), std::abs(a))) {
      throw InvalidComparison("gauge sets with and without flow are at different positions");
    }
  }
  PhaseCurve<Scalar> c;
  c.phi_with_flow = unwrap_along_xi(with_flow);
  c.phi_without_flow = unwrap_along_xi(without_flow);
  for (std::size_t i = 0; i < with_flow.size(); ++i) {
    const Scalar x = with_flow[i].x;
    const Scalar xi = frame.xi_per_metre() * x;
    c.x.push_back(x);
    c.xi.push_back(xi);
    c.phi_difference.push_back(c.phi_with_flow[i] - c.phi_without_flow[i]);
    c.model_difference.push_back(force_induced_phase(p0, force, xi));
    c.deviation.push_back(c.phi_difference.back() - c.model_difference.back());
    c.max_abs_deviation = std::max(c.max_abs_deviation, std::abs(c.deviation.back()));
  }
  return c;
}

template <typename Scalar = double>
struct MomentumPhaseEstimate {
  Scalar p0_squared{};
  Scalar ci_half_width{};  ///< 95 % normal-approximation half width
  Scalar residual_rms{};
  std::size_t gauges{};
};

/// Slope of the Gouy-subtracted free-propagation phase against -xi.
template <typename Scalar>
MomentumPhaseEstimate<Scalar> recover_momentum_phase(std::span<const GaugePhase<Scalar>> gauges,
                                                     const DimensionlessFrame<Scalar>& frame) {
  if (frame.params().force() != Scalar(0)) {
    throw InvalidParameter("force", "momentum phase recovery needs a force-free gauge set");
  }
  std::size_t usable = 0;
  for (const auto& g : gauges) usable += g.x > 0 ? 1 : 0;
  if (usable < 3) throw DegenerateFit("momentum phase recovery needs at least 3 gauges away from x = 0");
  const auto phi = unwrap_along_xi(gauges);
  Scalar sxx = 0, sxy = 0;
  std::vector<Scalar> xi(gauges.size()), y(gauges.size());
  for (std::size_t i = 0; i < gauges.size(); ++i) {
    xi[i] = frame.xi_per_metre() * gauges[i].x;
    y[i] = phi[i] - Scalar(0.5) * std::atan(xi[i] / frame.xi_s());
    sxx += xi[i] * xi[i];
    sxy += xi[i] * y[i];
  }
  MomentumPhaseEstimate<Scalar> est;
  est.p0_squared = -sxy / sxx;
  Scalar rss = 0;
  for (std::size_t i = 0; i < gauges.size(); ++i) {
    const Scalar r = y[i] + est.p0_squared * xi[i];
    rss += r * r;
  }
  const auto n = static_cast<Scalar>(gauges.size());
  est.residual_rms = std::sqrt(rss / n);
  est.ci_half_width = Scalar(1.96) * std::sqrt(rss / (n - Scalar(1)) / sxx);
  est.gauges = gauges.size();
  return est;
}

}  // namespace wavetank
