// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavetank/app/config.hpp"
#include "wavetank/app/scenario.hpp"
#include "wavetank/wavetank.hpp"

namespace fs = std::filesystem;
using namespace wavetank;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PhysicalParams<double> lab(double k0, double a0, double t0, double omega = 0, double force = 0) {
  ParamValues<double> v;
  v.k0 = k0;
  v.a0 = a0;
  v.t0 = t0;
  v.epsilon = k0 * a0;
  v.omega_detuning = omega;
  v.force = force;
  return PhysicalParams<double>(v);
}

app::Scenario bundled(const std::string& name) {
  return app::load_scenario(fs::path(WAVETANK_SCENARIO_DIR) / (name + ".cfg"));
}

Outcome group_velocity() {
  const double cg = derive_frequencies(20.0, 9.81).group_velocity;
  const double rel = std::abs(cg - 0.35) / 0.35;
  return {rel < 0.005, "c_g = " + fmt("%.6f", cg) + " m/s, rel. deviation " + fmt("%.2e", rel)};
}

Outcome coefficient_inversion() {
  const auto p = lab(20, 0.003, 0.8);
  const double a1[] = {2.44, 2.86, 3.23};
  const double omega[] = {2, 0, -2};
  const double expected[] = {0.351, 0.350, 0.354};
  double worst = 0;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double cg = group_velocity_from_a1(a1[i], omega[i], p.g());
    worst = std::max(worst, std::abs(cg - expected[i]) / expected[i]);
    detail += fmt("c_g=%.5f ", cg);
  }
  const double F = force_from_a2(0.15, p);
  const double rel_F = std::abs(F + 24.4) / 24.4;
  detail += fmt("F=%.3f", F) + fmt(" (worst c_g rel %.1e,", worst) + fmt(" F rel %.1e)", rel_F);
  return {worst < 0.005 && rel_F < 0.015, detail};
}

struct SolverSweep {
  double envelope_error = 0;
  double phase_error = 0;
  double norm_drift = 0;
  int runs = 0;
  double seconds = 0;
};

// Peak-referenced phase error over the part of the packet above 1e-3 of its maximum.
void compare_to_closed_form(const EnvelopeField<double>& field, const GaussianState<double>& state, double& env_err,
                            double& phase_err) {
  const auto exact = envelope(state, field.taus(), field.xi());
  const Eigen::ArrayXd mag = exact.abs();
  Eigen::Index jmax = 0;
  const double peak = mag.maxCoeff(&jmax);
  const auto num = field.values().array();
  env_err = std::max(env_err, (num.abs() - mag).abs().maxCoeff());
  const double ref = std::arg(num(jmax) * std::conj(exact(jmax)));
  for (Eigen::Index j = 0; j < field.size(); ++j) {
    if (mag(j) < 1e-3 * peak) continue;
    const double d = wrap_phase(std::arg(num(j) * std::conj(exact(j))) - ref);
    phase_err = std::max(phase_err, std::abs(d));
  }
}

const SolverSweep& solver_sweep() {
  static const SolverSweep sweep = [] {
    SolverSweep s;
    const auto t_start = std::chrono::steady_clock::now();
    for (const auto& params : {lab(20, 0.003, 0.8), lab(20, 0.006, 0.8)}) {
      const DimensionlessFrame<double> frame(params);
      for (double p0 : {0.0, 2.38, -2.38}) {
        for (double F : {0.0, -3.86, -24.4}) {
          const double xi_end = 2 * frame.xi_s();
          const auto grid = default_grid(frame, p0, F, xi_end);
          const auto cfg = default_solver_config(frame);
          const auto start = init_gaussian(frame, p0, grid);
          const auto end = propagate(start, F, xi_end, cfg);
          compare_to_closed_form(end, GaussianState<double>(frame, p0, F), s.envelope_error, s.phase_error);
          s.norm_drift = std::max(s.norm_drift, std::abs(end.norm() - start.norm()) / start.norm());
          ++s.runs;
        }
      }
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return s;
  }();
  return sweep;
}

Outcome solver_oracle() {
  const auto& s = solver_sweep();
  return {s.envelope_error < 1e-6 && s.phase_error < 1e-4 && s.seconds < 30,
          std::to_string(s.runs) + " runs, max envelope error " + fmt("%.2e", s.envelope_error) +
              ", max phase error " + fmt("%.2e", s.phase_error) + " rad, " + fmt("%.1f s", s.seconds)};
}

Outcome norm_conservation() {
  const auto& s = solver_sweep();
  return {s.norm_drift < 1e-10, "max relative norm drift " + fmt("%.2e", s.norm_drift)};
}

Outcome identities() {
  const auto t_start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20241018);
  std::uniform_real_distribution<double> u(0, 1);
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  double worst_peak = 0, worst_amp = 0, worst_phase = 0;
  for (int i = 0; i < 10000; ++i) {
    const double k0 = in(2, 40);
    const double eps = in(0.01, 0.29);
    const auto params = lab(k0, eps / k0, in(0.3, 2.0), in(-6, 6), in(-30, 30));
    const DimensionlessFrame<double> frame(params);
    const GaussianState<double> moving(frame);
    const double xi = in(0, 3) * frame.xi_s();
    const double tau = peak_location(moving, xi) + in(-3, 3) * frame.tau0() * std::sqrt(spreading(moving, xi));
    // Phases grow like F^2 xi^3; compare relative to the largest term.
    const auto d = decompose_phase_at_maximum(moving, xi);
    const double scale = 1 + std::abs(d.gouy) + std::abs(d.kennard) + std::abs(d.momentum_linear) +
                         std::abs(d.cross) + std::abs(moving.p0() * tau) + std::abs(moving.force() * tau * xi);
    const double at_peak = envelope_phase(moving, peak_location(moving, xi), xi);
    worst_peak = std::max(worst_peak, std::abs(at_peak - phase_at_maximum(moving, xi)) / scale);
    const auto rest = moving.at_rest();
    worst_amp = std::max(worst_amp, std::abs(galilean_amplitude_shift(moving, rest, tau, xi)));
    worst_phase = std::max(worst_phase, std::abs(galilean_phase_relation(moving, rest, tau, xi)) / scale);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {worst_peak < 1e-12 && worst_amp < 1e-12 && worst_phase < 1e-12 && seconds < 5,
          "10000 tuples: peak phase " + fmt("%.1e", worst_peak) + ", Galilean |A| " + fmt("%.1e", worst_amp) +
              ", Galilean phase " + fmt("%.1e", worst_phase) + fmt(" (relative), %.2f s", seconds)};
}

Outcome pipeline_closure() {
  const auto t_start = std::chrono::steady_clock::now();
  double worst_cg = 0, worst_F = 0;
  int fits = 0;
  for (const char* name : {"fig1a", "fig1b", "fig1c"}) {
    auto s = bundled(name);
    s.flow = app::FlowSelection::with_flow;
    const auto result = app::run_scenario(s, app::Mode::full_pipeline);
    for (const auto& c : result.cases) {
      if (!c.fit) return {false, std::string(name) + ": no fit"};
      worst_cg = std::max(worst_cg, std::abs(c.fit->c_g_recovered / c.spec.params.group_velocity() - 1));
      worst_F = std::max(worst_F, std::abs(c.fit->F_recovered / c.spec.force - 1));
      ++fits;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {fits == 3 && worst_cg < 0.01 && worst_F < 0.02 && seconds < 60,
          std::to_string(fits) + " fits, worst c_g rel " + fmt("%.2e", worst_cg) + ", worst F rel " +
              fmt("%.2e", worst_F) + fmt(", %.2f s", seconds)};
}

Outcome phase_curves() {
  const auto s = bundled("fig2");
  const auto result = app::run_scenario(s, app::Mode::full_pipeline);
  double worst = 0;
  const app::PhaseCurveResult* plus = nullptr;
  const app::PhaseCurveResult* minus = nullptr;
  for (const auto& c : result.curves) {
    worst = std::max(worst, c.curve.max_abs_deviation);
    if (c.omega_detuning == 4) plus = &c;
    if (c.omega_detuning == -4) minus = &c;
  }
  if (result.curves.size() != 3 || !plus || !minus) return {false, "expected three curves for +4, 0, -4 rad/s"};
  double free_gap = 0;
  for (std::size_t i = 0; i < plus->curve.x.size(); ++i) {
    free_gap = std::max(free_gap, std::abs(plus->curve.phi_without_flow[i] - minus->curve.phi_without_flow[i]));
  }
  const double xi_max = plus->curve.xi.back();
  return {worst < 5e-2 && free_gap < 1e-3,
          "max |difference - model| " + fmt("%.2e", worst) + " rad up to xi = " + fmt("%.3f", xi_max) +
              ", free curves +4/-4 differ by " + fmt("%.2e", free_gap) + " rad"};
}

Outcome convergence() {
  const auto t_start = std::chrono::steady_clock::now();
  const DimensionlessFrame<double> frame(lab(20, 0.006, 0.8));
  const double p0 = 2.38, F = -3.86;
  const double xi_end = 2 * frame.xi_s();
  const auto grid = default_grid(frame, p0, F, xi_end);
  const auto start = init_gaussian(frame, p0, grid);
  const GaussianState<double> state(frame, p0, F);
  const auto exact = envelope(state, grid.taus(), xi_end);
  std::vector<double> log_h, log_e;
  std::string detail;
  for (int divisions : {25, 50, 100, 200}) {
    auto cfg = default_solver_config(frame);
    cfg.d_xi = frame.xi_s() / divisions;
    cfg.max_halvings = 0;
    const auto end = propagate(start, F, xi_end, cfg);
    const double err = (end.values().array() - exact).abs().maxCoeff();
    log_h.push_back(std::log(cfg.d_xi));
    log_e.push_back(std::log(err));
    detail += fmt("%.2e ", err);
  }
  const double n = static_cast<double>(log_h.size());
  double mh = 0, me = 0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    mh += log_h[i] / n;
    me += log_e[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < log_h.size(); ++i) {
    sxy += (log_h[i] - mh) * (log_e[i] - me);
    sxx += (log_h[i] - mh) * (log_h[i] - mh);
  }
  const double slope = sxy / sxx;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::abs(slope - 2) <= 0.1 && seconds < 60,
          "errors " + detail + "-> slope " + fmt("%.3f", slope) + fmt(", %.2f s", seconds)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "wavetank_determinism";
  fs::remove_all(root);
  std::size_t compared = 0;
  struct Job {
    const char* name;
    app::Mode mode;
  };
  for (const Job job : {Job{"fig1", app::Mode::full_pipeline}, Job{"fig2", app::Mode::full_pipeline},
                        Job{"fig1b", app::Mode::numeric}, Job{"fig2b", app::Mode::analytic}}) {
    const auto s = bundled(job.name);
    const auto a = root / (std::string(job.name) + "_a");
    const auto b = root / (std::string(job.name) + "_b");
    const auto first = app::run_and_write(s, job.mode, a);
    const auto second = app::run_and_write(s, job.mode, b);
    if (first.files != second.files) return {false, std::string(job.name) + ": file lists differ"};
    for (const auto& f : first.files) {
      if (slurp(a / f) != slurp(b / f)) return {false, std::string(job.name) + ": " + f.string() + " differs"};
      ++compared;
    }
  }
  fs::remove_all(root);
  return {compared > 0, std::to_string(compared) + " file pairs byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"group velocity from dispersion", group_velocity},
      {"fit coefficient inversion", coefficient_inversion},
      {"solver matches closed form", solver_oracle},
      {"norm conservation", norm_conservation},
      {"algebraic identities", identities},
      {"full-pipeline trajectory closure", pipeline_closure},
      {"force-induced phase curves", phase_curves},
      {"second-order convergence", convergence},
      {"determinism", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
