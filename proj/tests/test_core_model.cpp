#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"

using namespace wavetank;
using wavetank::test::fig1_params;
using wavetank::test::fig2_params;
using wavetank::test::lab;

TEST_CASE("deep-water dispersion") {
  const auto unit = derive_frequencies(1.0, 1.0);
  CHECK(unit.omega0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(unit.group_velocity == doctest::Approx(0.5).epsilon(1e-15));

  const auto f5 = derive_frequencies(5.0, 9.81);
  CHECK(f5.omega0 == doctest::Approx(7.003570517957251).epsilon(1e-14));
  CHECK(f5.group_velocity == doctest::Approx(0.7003570517957252).epsilon(1e-14));

  const auto f20 = derive_frequencies(fig1_params());
  CHECK(f20.omega0 == doctest::Approx(14.007141035914502).epsilon(1e-14));
  CHECK(f20.group_velocity == doctest::Approx(0.3501785258978626).epsilon(1e-14));

  CHECK_THROWS_AS(derive_frequencies(0.0, 9.81), InvalidParameter);
  CHECK_THROWS_AS(derive_frequencies(20.0, -1.0), InvalidParameter);
}

TEST_CASE("dispersion relation holds for every constructed parameter set") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> k(0.5, 80), g(1, 20);
  for (int i = 0; i < 1000; ++i) {
    const auto p = lab(k(rng), 0.05 / 80, 1.0, 0, 0, g(rng));
    const double w = p.omega0();
    CHECK(std::abs(w * w - p.k0() * p.g()) <= 4 * std::numeric_limits<double>::epsilon() * p.k0() * p.g());
  }
}

TEST_CASE("parameter validation names the offending field") {
  ParamValues<double> v;
  v.k0 = 20;
  v.a0 = 0.003;
  v.t0 = 0.8;
  v.epsilon = 0.06;
  CHECK_NOTHROW(PhysicalParams<double>{v});

  auto field_of = [](ParamValues<double> bad) {
    try {
      PhysicalParams<double> p(bad);
    } catch (const InvalidParameter& e) {
      return e.field();
    }
    return std::string("none");
  };
  auto bad = v;
  bad.k0 = -1;
  CHECK(field_of(bad) == "k0");
  bad = v;
  bad.t0 = 0;
  CHECK(field_of(bad) == "t0");
  bad = v;
  bad.a0 = 0.05;
  bad.epsilon = 1.0;
  CHECK(field_of(bad) == "epsilon");
  bad = v;
  bad.epsilon = 0.061;
  CHECK(field_of(bad) == "epsilon");
  bad = v;
  bad.force = std::numeric_limits<double>::quiet_NaN();
  CHECK(field_of(bad) == "force");
  bad = v;
  bad.g = std::numeric_limits<double>::infinity();
  CHECK(field_of(bad) == "g");
}

TEST_CASE("steepness warning threshold") {
  CHECK_FALSE(fig2_params().high_steepness());
  CHECK(lab(20, 0.0085, 0.8).high_steepness());
}

TEST_CASE("effective momentum") {
  CHECK(effective_momentum(fig1_params(0)) == 0.0);
  CHECK(effective_momentum(fig1_params(2)) == doctest::Approx(2.3797385382117744).epsilon(1e-14));
  CHECK(effective_momentum(fig2_params(-4)) == doctest::Approx(-2.3797385382117744).epsilon(1e-14));
  for (double omega : {0.3, 1.7, 4.0, 9.5}) {
    CHECK(effective_momentum(fig1_params(-omega)) == -effective_momentum(fig1_params(omega)));
  }
  const double p0 = effective_momentum(fig2_params(4));
  CHECK(p0 * p0 == doctest::Approx(5.663155510250313).epsilon(1e-13));
}

TEST_CASE("dimensionless frame") {
  const DimensionlessFrame<double> frame(fig1_params());
  CHECK(frame.tau0() == doctest::Approx(0.6723427697238962).epsilon(1e-14));
  CHECK(frame.xi_s() == doctest::Approx(0.6723427697238962 * 0.6723427697238962 / 4).epsilon(1e-14));

  const auto origin = to_dimensionless(frame, 0.0, 0.0);
  CHECK(origin.xi == 0.0);
  CHECK(origin.tau == 0.0);
  CHECK(to_dimensionless(frame, 5.0, 0.0).xi == doctest::Approx(0.36).epsilon(1e-14));
  CHECK(to_dimensionless(frame, 0.0, 0.8).tau == doctest::Approx(-0.6723427697238962).epsilon(1e-14));

  const auto lab_origin = from_dimensionless(frame, 0.0, 0.0);
  CHECK(lab_origin.x == 0.0);
  CHECK(lab_origin.t == 0.0);
  const auto far = from_dimensionless(frame, 0.36, 0.0);
  CHECK(far.x == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(far.t == doctest::Approx(14.278431229270645).epsilon(1e-13));

  const auto round = from_dimensionless(frame, to_dimensionless(frame, 3.7, 1.2).xi, to_dimensionless(frame, 3.7, 1.2).tau);
  CHECK(std::abs(round.x / 3.7 - 1) < 1e-12);
  CHECK(std::abs(round.t / 1.2 - 1) < 1e-12);
}

TEST_CASE("frame maps round-trip over fuzzed parameters and tau falls with t") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double k0 = 1 + 60 * u(rng);
    const double eps = 0.01 + 0.28 * u(rng);
    const DimensionlessFrame<double> frame(lab(k0, eps / k0, 0.2 + 2 * u(rng)));
    const double x = 0.01 + 10 * u(rng);
    const double t = 0.01 + 100 * u(rng);
    const auto c = to_dimensionless(frame, x, t);
    const auto back = from_dimensionless(frame, c.xi, c.tau);
    CHECK(std::abs(back.x / x - 1) < 1e-12);
    CHECK(std::abs(back.t / t - 1) < 1e-12);
    CHECK(to_dimensionless(frame, x, t + 0.01).tau < c.tau);
  }
}
