#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace wavetank {

/// Wrap to (-pi, pi].
template <typename Scalar>
Scalar wrap_phase(Scalar phase) {
  constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar r = std::remainder(phase, two_pi);
  if (r <= -std::numbers::pi_v<Scalar>) r += two_pi;
  return r;
}

/// The representative of `phase` (mod 2 pi) closest to `reference`.
template <typename Scalar>
Scalar nearest_branch(Scalar phase, Scalar reference) {
  return reference + wrap_phase(phase - reference);
}

/// Sequential unwrap: every jump larger than pi is folded by a multiple of 2 pi.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> unwrap(const Eigen::DenseBase<Derived>& wrapped) {
  using Scalar = typename Derived::Scalar;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(wrapped.size());
  if (wrapped.size() == 0) return out;
  out(0) = wrapped(0);
  for (Eigen::Index i = 1; i < wrapped.size(); ++i) {
    out(i) = nearest_branch(Scalar(wrapped(i)), out(i - 1));
  }
  return out;
}

}  // namespace wavetank
