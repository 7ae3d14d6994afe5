#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"

using namespace wavetank;
using wavetank::test::fig1_params;
using wavetank::test::fig2_params;

namespace {

GaussianState<double> state(double p0, double F) { return {DimensionlessFrame<double>(fig2_params()), p0, F}; }

}  // namespace

TEST_CASE("envelope magnitude") {
  const auto s = state(2.38, -3.86);
  CHECK(envelope_magnitude(state(0, 0), 0.0, 0.0) == 1.0);
  const double xi = s.xi_s();
  CHECK(envelope_magnitude(s, peak_location(s, xi), xi) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-14));
}

TEST_CASE("peak location law on arbitrary grids") {
  for (double p0 : {0.0, 2.38, -2.38}) {
    for (double F : {0.0, -3.86, 5.0}) {
      const auto s = state(p0, F);
      for (double xi : {0.1, 0.45, 1.2}) {
        const double centre = peak_location(s, xi);
        CHECK(centre == doctest::Approx(2 * p0 * xi + F * xi * xi));
        const double dtau = 0.0137;
        double best = -1, arg = 0;
        for (double tau = centre - 5.003; tau < centre + 5; tau += dtau) {
          const double m = envelope_magnitude(s, tau, xi);
          if (m > best) {
            best = m;
            arg = tau;
          }
        }
        CHECK(std::abs(arg - centre) <= dtau / 2 + 1e-12);
      }
    }
  }
}

TEST_CASE("width law by quadrature") {
  const auto s = state(2.38, -3.86);
  auto rms = [&](double xi) {
    const double c = peak_location(s, xi);
    const double half = 12 * s.tau0() * std::sqrt(spreading(s, xi));
    const int n = 20000;
    const double h = 2 * half / n;
    double m0 = 0, m1 = 0, m2 = 0;
    for (int j = 0; j <= n; ++j) {
      const double tau = c - half + j * h;
      const double w = (j == 0 || j == n ? 0.5 : 1.0) * std::pow(envelope_magnitude(s, tau, xi), 2);
      m0 += w;
      m1 += w * tau;
      m2 += w * tau * tau;
    }
    const double mean = m1 / m0;
    return std::sqrt(m2 / m0 - mean * mean);
  };
  const double w0 = rms(0.0);
  CHECK(w0 == doctest::Approx(s.tau0() / 2).epsilon(1e-10));
  for (double xi : {0.2, 0.452, 1.0, 1.44}) {
    CHECK(rms(xi) / w0 == doctest::Approx(std::sqrt(spreading(s, xi))).epsilon(1e-10));
  }
}

TEST_CASE("envelope phase special values") {
  const auto rest = state(0, 0);
  for (double tau : {-1.3, 0.0, 2.7}) CHECK(envelope_phase(rest, tau, 0.0) == 0.0);
  const auto moving = state(2.38, -3.86);
  for (double tau : {-1.3, 0.0, 2.7}) CHECK(envelope_phase(moving, tau, 0.0) == doctest::Approx(-2.38 * tau));
  CHECK(envelope_phase(rest, 0.0, rest.xi_s()) == doctest::Approx(std::numbers::pi / 8).epsilon(1e-15));
}

TEST_CASE("envelope solves the governing equation") {
  // Finite-difference residual of i dA/dxi - d2A/dtau2 - F tau A.
  const auto s = state(1.1, -3.86);
  const double h = 1e-4;
  for (double xi : {0.2, 0.7}) {
    for (double tau : {-0.5, 0.3, 1.1}) {
      const auto a = envelope(s, tau, xi);
      const auto d_xi = (envelope(s, tau, xi + h) - envelope(s, tau, xi - h)) / (2 * h);
      const auto d2 = (envelope(s, tau + h, xi) - 2.0 * a + envelope(s, tau - h, xi)) / (h * h);
      const auto residual = std::complex<double>(0, 1) * d_xi - d2 - s.force() * tau * a;
      CHECK(std::abs(residual) < 1e-5);
    }
  }
}

TEST_CASE("phase at the maximum") {
  CHECK(phase_at_maximum(state(2.38, -3.86), 0.0) == 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(-3, 3), f(-25, 25), x(0, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const auto s = state(p(rng), f(rng));
    const double xi = x(rng);
    const double direct = envelope_phase(s, peak_location(s, xi), xi);
    CHECK(std::abs(direct - phase_at_maximum(s, xi)) <= 1e-12 * (1 + std::abs(direct)));
  }
}

TEST_CASE("parity of the phase at the maximum") {
  for (double xi : {0.1, 0.5, 1.4}) {
    CHECK(phase_at_maximum(state(2.38, 0), xi) == phase_at_maximum(state(-2.38, 0), xi));
    CHECK(phase_at_maximum(state(2.38, -3.86), xi) != doctest::Approx(phase_at_maximum(state(-2.38, -3.86), xi)));
  }
}

TEST_CASE("Gouy phase saturates at pi/4") {
  const auto s = state(0, 0);
  double prev = -1;
  for (double xi = 0; xi < 1e4; xi = xi * 2 + 0.01) {
    const double g = decompose_phase_at_maximum(s, xi).gouy;
    CHECK(g > prev);
    CHECK(g < std::numbers::pi / 4);
    prev = g;
  }
  CHECK(decompose_phase_at_maximum(s, 1e9).gouy == doctest::Approx(std::numbers::pi / 4).epsilon(1e-9));
}

TEST_CASE("phase decomposition") {
  const auto free = decompose_phase_at_maximum(state(2.38, 0), 0.8);
  CHECK(free.kennard == 0.0);
  CHECK(free.cross == 0.0);

  const auto cross = decompose_phase_at_maximum(state(2.380, -3.86), 0.5);
  CHECK(cross.cross == doctest::Approx(4.5934).epsilon(1e-12));

  for (double p0 : {0.0, 2.38, -2.38}) {
    for (double xi : {0.3, 1.44}) {
      const double diff = phase_at_maximum(state(p0, -3.86), xi) - phase_at_maximum(state(p0, 0), xi);
      CHECK(diff == doctest::Approx(force_induced_phase(p0, -3.86, xi)).epsilon(1e-13));
    }
  }
  // The two momenta differ only through the sign of the cross term.
  const double xi = 0.9;
  CHECK(force_induced_phase(2.38, -3.86, xi) - force_induced_phase(-2.38, -3.86, xi) ==
        doctest::Approx(-4 * 2.38 * -3.86 * xi * xi));
}

TEST_CASE("Galilean identities") {
  for (double F : {0.0, -3.86}) {
    const auto moving = state(2.380, F);
    const auto rest = moving.at_rest();
    double worst_amp = 0, worst_phase = 0;
    for (double xi = 0; xi <= 1.5; xi += 0.05) {
      for (double tau = -6; tau <= 6; tau += 0.1) {
        worst_amp = std::max(worst_amp, std::abs(galilean_amplitude_shift(moving, rest, tau, xi)));
        worst_phase = std::max(worst_phase, std::abs(galilean_phase_relation(moving, rest, tau, xi)));
      }
    }
    CHECK(worst_amp < 1e-12);
    CHECK(worst_phase < 1e-11);
  }
  const auto rest = state(0, -3.86);
  CHECK(galilean_amplitude_shift(rest, rest, 0.7, 0.3) == 0.0);
  CHECK(galilean_phase_relation(rest, rest, 0.7, 0.3) == 0.0);
  const auto moving = state(2.38, -3.86);
  CHECK(envelope_phase(moving, 1.2, 0.0) == doctest::Approx(envelope_phase(rest, 1.2, 0.0) - 2.38 * 1.2));
}

TEST_CASE("Galilean comparison rejects mismatched states") {
  const auto moving = state(2.38, -3.86);
  CHECK_THROWS_AS(galilean_amplitude_shift(moving, state(0, 0), 0.0, 0.1), InvalidComparison);
  CHECK_THROWS_AS(galilean_phase_relation(moving, state(1, -3.86), 0.0, 0.1), InvalidComparison);
  const GaussianState<double> other_frame(DimensionlessFrame<double>(fig1_params()), 0, -3.86);
  CHECK_THROWS_AS(galilean_amplitude_shift(moving, other_frame, 0.0, 0.1), InvalidComparison);
}
