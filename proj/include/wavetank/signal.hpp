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
#include "wavetank/core_model.hpp"
#include "wavetank/errors.hpp"
#include "wavetank/phase.hpp"

namespace wavetank {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Surface elevation eta(t) at a gauge located x metres from the wave maker.
template <typename Scalar = double>
class GaugeRecord {
public:
  GaugeRecord(Scalar x, ArrayX<Scalar> t, ArrayX<Scalar> eta) : x_(x), t_(std::move(t)), eta_(std::move(eta)) {
    if (t_.size() != eta_.size()) throw SamplingError("time and elevation columns differ in length");
    if (t_.size() < 4) throw SamplingError("gauge record needs at least 4 samples");
  }

  Scalar x() const noexcept { return x_; }
  const ArrayX<Scalar>& t() const noexcept { return t_; }
  const ArrayX<Scalar>& eta() const noexcept { return eta_; }
  Eigen::Index size() const noexcept { return t_.size(); }
  Scalar sample_period() const { return (t_(t_.size() - 1) - t_(0)) / Scalar(t_.size() - 1); }
  Scalar sample_rate() const { return Scalar(1) / sample_period(); }

  /// Throws SamplingError unless the time stamps are increasing and evenly spaced.
  void require_uniform() const {
    const Scalar dt = sample_period();
    if (!(dt > 0)) throw SamplingError("time stamps must increase");
    const Scalar tol = Scalar(1e-9) * dt + Scalar(64) * std::numeric_limits<Scalar>::epsilon() *
                                                  std::max(std::abs(t_(0)), std::abs(t_(t_.size() - 1)));
    for (Eigen::Index i = 1; i < t_.size(); ++i) {
      if (std::abs((t_(i) - t_(i - 1)) - dt) > tol) {
        throw SamplingError("non-uniform sampling at sample " + std::to_string(i));
      }
    }
  }

private:
  Scalar x_;
  ArrayX<Scalar> t_;
  ArrayX<Scalar> eta_;
};

template <typename Scalar = double>
struct SamplingSpec {
  Scalar fs{};       ///< [Hz]
  Scalar t_start{};  ///< [s]
  Eigen::Index n{};
};

namespace detail {

inline bool is_five_smooth(Eigen::Index n) {
  for (Eigen::Index p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

inline Eigen::Index next_five_smooth(Eigen::Index n) {
  while (!is_five_smooth(n)) ++n;
  return n;
}

}  // namespace detail

/// fs = fs_factor * omega0 / (2 pi), record centred on the predicted packet
/// arrival and spanning +- halfspan_t0 * t0 * stretch(xi). The sample count is
/// rounded up to a 2-3-5 smooth length for the transform.
template <typename Scalar>
SamplingSpec<Scalar> default_sampling(const GaussianState<Scalar>& state, Scalar x,
                                      Scalar halfspan_t0 = Scalar(6), Scalar fs_factor = Scalar(40)) {
  const auto& frame = state.frame();
  const auto& p = frame.params();
  const Scalar fs = fs_factor * p.omega0() / (Scalar(2) * std::numbers::pi_v<Scalar>);
  const Scalar xi = frame.xi_per_metre() * x;
  const Scalar centre = from_dimensionless(frame, xi, peak_location(state, xi)).t;
  const Scalar half = halfspan_t0 * p.t0() * std::sqrt(spreading(state, xi));
  const auto n = detail::next_five_smooth(static_cast<Eigen::Index>(std::ceil(Scalar(2) * half * fs)) + 1);
  return {fs, centre - Scalar(n - 1) / (Scalar(2) * fs), n};
}

/// eta(t) = a0 |A(tau, xi)| cos(k0 x - omega0 t + phi(tau, xi)) for the
/// closed-form Gaussian envelope.
template <typename Scalar>
GaugeRecord<Scalar> synthesize_gauge(const GaussianState<Scalar>& state, Scalar x, const SamplingSpec<Scalar>& spec) {
  const auto& frame = state.frame();
  const auto& p = frame.params();
  if (!(x >= 0)) throw InvalidParameter("x", "gauge position must be non-negative");
  if (spec.n < 4) throw SamplingError("record needs at least 4 samples");
  const Scalar detuning = std::abs(state.p0()) * frame.tau_per_second();
  const Scalar nyquist_floor = Scalar(4) * (p.omega0() + detuning) / (Scalar(2) * std::numbers::pi_v<Scalar>);
  if (!(spec.fs > nyquist_floor)) {
    throw SamplingError("sample rate " + std::to_string(static_cast<double>(spec.fs)) +
                        " Hz undersamples the carrier (need > " + std::to_string(static_cast<double>(nyquist_floor)) +
                        " Hz)");
  }
  ArrayX<Scalar> t(spec.n), eta(spec.n), env(spec.n);
  const Scalar xi = frame.xi_per_metre() * x;
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    t(i) = spec.t_start + Scalar(i) / spec.fs;
    const Scalar tau = to_dimensionless(frame, x, t(i)).tau;
    env(i) = p.a0() * envelope_magnitude(state, tau, xi);
    eta(i) = env(i) * std::cos(p.k0() * x - p.omega0() * t(i) + envelope_phase(state, tau, xi));
  }
  const Scalar peak = env.maxCoeff();
  if (!(std::max(env(0), env(spec.n - 1)) < Scalar(1e-4) * peak)) {
    throw SamplingError("record does not cover the packet at x = " + std::to_string(static_cast<double>(x)));
  }
  return GaugeRecord<Scalar>(x, std::move(t), std::move(eta));
}

/// One-sided spectrum construction: zero negative frequencies, double the
/// positive ones, keep DC and Nyquist as they are.
template <typename Scalar>
ArrayX<std::complex<Scalar>> analytic_signal(const GaugeRecord<Scalar>& record) {
  record.require_uniform();
  const Eigen::Index n = record.size();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> input = record.eta().matrix().template cast<std::complex<Scalar>>();
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> spectrum(n), out(n);
  Eigen::FFT<Scalar> fft;
  fft.fwd(spectrum, input);
  const Eigen::Index positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;  // exclusive
  for (Eigen::Index k = 1; k < positive_end; ++k) spectrum(k) *= Scalar(2);
  for (Eigen::Index k = (n % 2 == 0) ? n / 2 + 1 : positive_end; k < n; ++k) spectrum(k) = 0;
  fft.inv(out, spectrum);
  return out.array();
}

template <typename Scalar = double>
struct DemodulatedRecord {
  Scalar x{};
  ArrayX<Scalar> t;
  ArrayX<Scalar> envelope;        ///< [m]
  ArrayX<Scalar> phase_total;     ///< unwrapped analytic-signal phase
  ArrayX<Scalar> phase_residual;  ///< phase_total minus the carrier k0 x - omega0 t
  Eigen::Array<bool, Eigen::Dynamic, 1> confidence;
};

/// Envelope gate below which phase samples are bridged and flagged.
inline constexpr double kEnvelopeGate = 0.1;

/// Envelope and carrier-free phase from the analytic signal.
///
/// The residual phase is unwrapped outward from the envelope maximum (where it
/// is taken in (-pi, pi]) over samples above 10 % of the peak envelope; outside
/// that gate it is extended linearly with the last confident slope and marked
/// low-confidence.
template <typename Scalar>
DemodulatedRecord<Scalar> demodulate(const GaugeRecord<Scalar>& record, const DimensionlessFrame<Scalar>& frame) {
  const auto z = analytic_signal(record);
  const auto& p = frame.params();
  const Eigen::Index n = record.size();
  DemodulatedRecord<Scalar> out;
  out.x = record.x();
  out.t = record.t();
  out.envelope = z.abs();
  out.phase_residual.resize(n);
  out.confidence.resize(n);

  ArrayX<Scalar> carrier(n), wrapped(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    carrier(i) = p.k0() * record.x() - p.omega0() * record.t()(i);
    // cos(k0 x - omega0 t + phi) is a positive-frequency signal with argument -(k0 x - omega0 t + phi).
    wrapped(i) = wrap_phase(-std::arg(z(i)) - wrap_phase(carrier(i)));
  }
  Eigen::Index imax = 0;
  const Scalar peak = out.envelope.maxCoeff(&imax);
  if (!(peak > 0)) throw EmptyField("gauge record carries no signal");
  const Scalar gate = Scalar(kEnvelopeGate) * peak;
  for (Eigen::Index i = 0; i < n; ++i) out.confidence(i) = out.envelope(i) >= gate;

  auto& res = out.phase_residual;
  res(imax) = wrapped(imax);
  auto sweep = [&](Eigen::Index dir) {
    Scalar slope = 0;
    Eigen::Index confident_run = 1;
    for (Eigen::Index i = imax + dir; i >= 0 && i < n; i += dir) {
      if (out.confidence(i)) {
        res(i) = nearest_branch(wrapped(i), res(i - dir));
        if (out.confidence(i - dir)) {
          slope = res(i) - res(i - dir);
          ++confident_run;
        }
      } else {
        res(i) = res(i - dir) + (confident_run > 1 ? slope : Scalar(0));
      }
    }
  };
  sweep(1);
  sweep(-1);
  out.phase_total = res + carrier;
  return out;
}

template <typename Scalar>
struct PacketStatistics {
  Scalar t_mean;         ///< centre of mass of the squared envelope [s]
  Scalar t_peak;         ///< [s]
  Scalar phase_at_peak;  ///< residual phase at t_peak [rad]
  Scalar peak_envelope;  ///< [m]
};

/// Secondary lobes above this fraction of the main peak make the packet ambiguous.
inline constexpr double kSecondaryLobeLimit = 0.5;

template <typename Scalar>
PacketStatistics<Scalar> packet_statistics(const DemodulatedRecord<Scalar>& d) {
  const Eigen::Index n = d.envelope.size();
  if (n < 3) throw EmptyField("demodulated record is too short");
  const ArrayX<Scalar> e2 = d.envelope.square();
  Eigen::Index imax = 0;
  const Scalar peak = d.envelope.maxCoeff(&imax);
  if (!(peak > 0)) throw EmptyField("demodulated record carries no signal");

  // A lobe counts when a local maximum above the limit is separated from the
  // main peak by a dip of at least 5 %.
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (i == imax) continue;
    const Scalar v = d.envelope(i);
    if (v < Scalar(kSecondaryLobeLimit) * peak || v < d.envelope(i - 1) || v < d.envelope(i + 1)) continue;
    const Eigen::Index lo = std::min(i, imax);
    const Eigen::Index hi = std::max(i, imax);
    const Scalar dip = d.envelope.segment(lo, hi - lo + 1).minCoeff();
    if (dip < Scalar(0.95) * v) {
      throw AmbiguousPacket("envelope has a secondary lobe of " +
                            std::to_string(static_cast<double>(v / peak)) + " of the peak at t = " +
                            std::to_string(static_cast<double>(d.t(i))));
    }
  }

  PacketStatistics<Scalar> s{};
  ArrayX<Scalar> w = ArrayX<Scalar>::Ones(n);
  w(0) = w(n - 1) = Scalar(0.5);
  s.t_mean = (w * d.t * e2).sum() / (w * e2).sum();

  const Scalar dt = (d.t(n - 1) - d.t(0)) / Scalar(n - 1);
  Scalar offset = 0;
  Scalar log_peak = std::log(peak);
  if (imax > 0 && imax + 1 < n && d.envelope(imax - 1) > 0 && d.envelope(imax + 1) > 0) {
    const Scalar lm = std::log(d.envelope(imax - 1));
    const Scalar lp = std::log(d.envelope(imax + 1));
    const Scalar curvature = lm - Scalar(2) * log_peak + lp;
    if (curvature < 0) {
      offset = Scalar(0.5) * (lm - lp) / curvature;
      log_peak -= Scalar(0.25) * (lm - lp) * offset;
    }
  }
  s.t_peak = d.t(imax) + offset * dt;
  s.peak_envelope = std::exp(log_peak);
  const auto& ph = d.phase_residual;
  if (imax > 0 && imax + 1 < n) {
    s.phase_at_peak = ph(imax) + Scalar(0.5) * (ph(imax + 1) - ph(imax - 1)) * offset +
                      Scalar(0.5) * (ph(imax + 1) - Scalar(2) * ph(imax) + ph(imax - 1)) * offset * offset;
  } else {
    s.phase_at_peak = ph(imax);
  }
  return s;
}

}  // namespace wavetank
