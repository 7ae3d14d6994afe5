#include "wavetank/app/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wavetank/app/csv_io.hpp"
#include "wavetank/wavetank.hpp"

namespace wavetank::app {
namespace {

/// Runs fn(0..n-1) on a small thread pool. The exception of the lowest failing
/// index is rethrown so failures are reported deterministically.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::size_t next = 0;
  std::mutex m;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(m);
        if (next >= n) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string signed_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+g", v);
  return buf;
}

std::string position_label(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "x%.3f", x);
  return buf;
}

using Artifacts = std::vector<std::pair<std::filesystem::path, std::string>>;

bool keep_record(const Scenario& s, std::size_t gauge_index) {
  return s.record_stride > 0 && gauge_index % static_cast<std::size_t>(s.record_stride) == 0;
}

SolverConfig<double> solver_config(const Scenario& s, const DimensionlessFrame<double>& frame) {
  auto cfg = default_solver_config(frame);
  if (s.d_xi) cfg.d_xi = *s.d_xi;
  cfg.boundary_margin = s.boundary_margin;
  cfg.norm_drift_tol = s.norm_drift_tol;
  return cfg;
}

std::vector<GaugeResult> analytic_gauges(const Scenario& s, const Case& c) {
  const DimensionlessFrame<double> frame(c.params);
  const GaussianState<double> state(frame, c.p0(), c.force);
  std::vector<GaugeResult> out;
  for (double x : s.gauge_positions) {
    GaugeResult g;
    g.x = x;
    g.xi = frame.xi_per_metre() * x;
    g.tau_peak = peak_location(state, g.xi);
    g.t_mean = g.t_peak = from_dimensionless(frame, g.xi, g.tau_peak).t;
    g.abs_peak = envelope_magnitude(state, g.tau_peak, g.xi);
    g.phase_at_peak = phase_at_maximum(state, g.xi);
    out.push_back(g);
  }
  return out;
}

std::vector<GaugeResult> numeric_gauges(const Scenario& s, const Case& c, Artifacts& artifacts) {
  const DimensionlessFrame<double> frame(c.params);
  const GaussianState<double> state(frame, c.p0(), c.force);
  const double xi_max = frame.xi_per_metre() * s.gauge_positions.back();
  const auto grid = default_grid(frame, c.p0(), c.force, xi_max);
  const auto cfg = solver_config(s, frame);
  auto field = init_gaussian(frame, c.p0(), grid);
  const auto taus = grid.taus();
  std::vector<GaugeResult> out;
  for (std::size_t i = 0; i < s.gauge_positions.size(); ++i) {
    const double x = s.gauge_positions[i];
    GaugeResult g;
    g.x = x;
    g.xi = frame.xi_per_metre() * x;
    field = propagate(field, c.force, g.xi, cfg);
    const auto obs = sample_observables(field);
    g.tau_peak = obs.peak_tau;
    g.t_mean = from_dimensionless(frame, g.xi, obs.centroid_tau).t;
    g.t_peak = from_dimensionless(frame, g.xi, obs.peak_tau).t;
    g.abs_peak = obs.peak_magnitude;
    g.phase_at_peak = obs.peak_phase;
    const auto exact = envelope(state, taus, g.xi);
    g.envelope_error = (field.values().array().abs() - exact.abs()).abs().maxCoeff();
    if (keep_record(s, i)) {
      std::ostringstream os;
      write_field_csv(os, field, c.force, c.p0());
      artifacts.emplace_back(std::filesystem::path("fields") / ("field_" + c.tag + "_" + position_label(x) + ".csv"),
                             os.str());
    }
    out.push_back(g);
  }
  return out;
}

std::vector<GaugeResult> pipeline_gauges(const Scenario& s, const Case& c, Artifacts& artifacts) {
  const DimensionlessFrame<double> frame(c.params);
  const GaussianState<double> state(frame, c.p0(), c.force);
  const std::size_t n = s.gauge_positions.size();
  std::vector<GaugeResult> out(n);
  std::vector<Artifacts> per_gauge(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = s.gauge_positions[i];
    const auto spec = default_sampling(state, x, s.record_halfspan_t0, s.sample_rate_factor);
    const auto record = synthesize_gauge(state, x, spec);
    const auto demod = demodulate(record, frame);
    const auto stats = packet_statistics(demod);
    GaugeResult g;
    g.x = x;
    g.xi = frame.xi_per_metre() * x;
    g.t_mean = stats.t_mean;
    g.t_peak = stats.t_peak;
    g.tau_peak = to_dimensionless(frame, x, stats.t_peak).tau;
    g.abs_peak = stats.peak_envelope / c.params.a0();
    g.phase_at_peak = stats.phase_at_peak;
    g.sample_period = record.sample_period();
    for (Eigen::Index k = 0; k < record.size(); ++k) {
      if (!demod.confidence(k)) continue;
      const double tau = to_dimensionless(frame, x, record.t()(k)).tau;
      const double err = std::abs(demod.envelope(k) / c.params.a0() - envelope_magnitude(state, tau, g.xi));
      g.envelope_error = std::max(g.envelope_error, err);
    }
    if (keep_record(s, i)) {
      const auto label = c.tag + "_" + position_label(x) + ".csv";
      std::ostringstream gauge_os, demod_os;
      write_gauge_csv(gauge_os, record, c.params);
      write_demodulated_csv(demod_os, record, demod, c.params);
      per_gauge[i].emplace_back(std::filesystem::path("records") / ("gauge_" + label), gauge_os.str());
      per_gauge[i].emplace_back(std::filesystem::path("records") / ("demod_" + label), demod_os.str());
    }
    out[i] = g;
  });
  for (auto& a : per_gauge) {
    for (auto& item : a) artifacts.push_back(std::move(item));
  }
  return out;
}

std::vector<GaugePhase<double>> phases_of(const CaseResult& r) {
  std::vector<GaugePhase<double>> out;
  for (const auto& g : r.gauges) out.push_back({g.x, g.phase_at_peak});
  return out;
}

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  for (double v : values) {
    if (!row.empty()) row += ',';
    row += format_number(v);
  }
  return row + '\n';
}

}  // namespace

std::vector<Case> expand_cases(const Scenario& s) {
  std::vector<Case> out;
  for (double omega : s.detunings) {
    for (bool flow : {false, true}) {
      if (flow && s.flow == FlowSelection::without_flow) continue;
      if (!flow && s.flow == FlowSelection::with_flow) continue;
      const double force = flow ? s.params.force() : 0.0;
      out.push_back(Case{"om" + signed_label(omega) + (flow ? "_flow" : "_noflow"), omega, force, flow,
                         s.params.with_detuning(omega).with_force(force)});
    }
  }
  return out;
}

CaseResult run_case(const Scenario& s, const Case& c, Mode mode, const ArtifactSink& sink) {
  CaseResult r{c, mode, {}, std::nullopt, std::nullopt};
  Artifacts artifacts;
  switch (mode) {
    case Mode::analytic: r.gauges = analytic_gauges(s, c); break;
    case Mode::numeric: r.gauges = numeric_gauges(s, c, artifacts); break;
    case Mode::full_pipeline: r.gauges = pipeline_gauges(s, c, artifacts); break;
  }
  if (sink) {
    for (const auto& [path, content] : artifacts) sink(path, content);
  }

  std::vector<TrajectoryPoint<double>> points;
  for (const auto& g : r.gauges) points.push_back({g.x, g.t_mean, g.abs_peak * g.abs_peak});
  try {
    r.fit = fit_trajectory<double>(points, c.params,
                                   FitOptions<double>{.weighted = s.fit_weighted, .with_intercept = s.fit_intercept});
  } catch (const DegenerateFit&) {
    r.fit.reset();
  }
  if (!c.with_flow) {
    const auto phases = phases_of(r);
    try {
      r.momentum = recover_momentum_phase<double>(phases, DimensionlessFrame<double>(c.params));
    } catch (const DegenerateFit&) {
      r.momentum.reset();
    }
  }
  return r;
}

RunResult run_scenario(const Scenario& s, Mode mode, const ArtifactSink& sink) {
  RunResult result;
  result.mode = mode;
  const auto cases = expand_cases(s);
  std::vector<std::optional<CaseResult>> slots(cases.size());
  std::vector<std::vector<std::pair<std::filesystem::path, std::string>>> buffered(cases.size());
  auto run_one = [&](std::size_t i) {
    ArtifactSink local;
    if (sink) local = [&buffered, i](const std::filesystem::path& p, const std::string& c) { buffered[i].emplace_back(p, c); };
    slots[i] = run_case(s, cases[i], mode, local);
  };
  if (mode == Mode::numeric) {
    parallel_for(cases.size(), run_one);
  } else {
    for (std::size_t i = 0; i < cases.size(); ++i) run_one(i);
  }
  for (std::size_t i = 0; i < cases.size(); ++i) {
    result.cases.push_back(std::move(*slots[i]));
    if (sink) {
      for (const auto& [p, c] : buffered[i]) sink(p, c);
    }
  }

  for (const double omega : s.detunings) {
    const CaseResult* with = nullptr;
    const CaseResult* without = nullptr;
    for (const auto& r : result.cases) {
      if (r.spec.omega_detuning != omega) continue;
      (r.spec.with_flow ? with : without) = &r;
    }
    if (!with || !without) continue;
    const auto a = phases_of(*with);
    const auto b = phases_of(*without);
    result.curves.push_back({omega, with->spec.p0(), with->spec.force,
                             build_phase_curves<double>(a, b, DimensionlessFrame<double>(with->spec.params),
                                                        with->spec.p0(), with->spec.force)});
  }
  return result;
}

RunResult run_and_write(const Scenario& s, Mode mode, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
    write_text_file(dir / rel, content);
    files.push_back(rel);
  };
  auto result = run_scenario(s, mode, emit);

  std::vector<std::string> trajectory_files;
  for (const auto& r : result.cases) {
    std::string table = "x,xi,tau_peak,t_mean,t_peak,abs_peak,phase_at_peak,envelope_error\n";
    for (const auto& g : r.gauges) {
      table += csv_row({g.x, g.xi, g.tau_peak, g.t_mean, g.t_peak, g.abs_peak, g.phase_at_peak, g.envelope_error});
    }
    const std::string name = "trajectory_" + r.spec.tag + ".csv";
    emit(name, table);
    trajectory_files.push_back(name);

    if (mode == Mode::analytic) {
      const GaussianState<double> state(DimensionlessFrame<double>(r.spec.params), r.spec.p0(), r.spec.force);
      std::string dec = "x,xi,abs_A,gouy,kennard,momentum_linear,cross,total\n";
      for (const auto& g : r.gauges) {
        const auto d = decompose_phase_at_maximum(state, g.xi);
        dec += csv_row({g.x, g.xi, g.abs_peak, d.gouy, d.kennard, d.momentum_linear, d.cross, d.total});
      }
      emit("decomposition_" + r.spec.tag + ".csv", dec);
    }
  }

  std::string fits =
      "case,omega_detuning,force_injected,epsilon,k0,g,a1,a2,intercept,residual_rms,c_g_recovered,F_recovered,"
      "c_g_dispersion,p0,p0_squared_phase,p0_squared_ci\n";
  for (const auto& r : result.cases) {
    if (!r.fit) continue;
    const auto& f = *r.fit;
    const auto& p = r.spec.params;
    fits += r.spec.tag + ',' +
            csv_row({r.spec.omega_detuning, r.spec.force, p.epsilon(), p.k0(), p.g(), f.a1, f.a2, f.intercept,
                     f.residual_rms, f.c_g_recovered, f.F_recovered, p.group_velocity(), r.spec.p0(),
                     r.momentum ? r.momentum->p0_squared : std::nan(""),
                     r.momentum ? r.momentum->ci_half_width : std::nan("")});
  }
  emit("fit_report.csv", fits);

  std::vector<std::string> curve_files;
  for (const auto& pc : result.curves) {
    std::string table = "x,xi,phi_no_flow,phi_flow,difference,model,deviation\n";
    const auto& c = pc.curve;
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      table += csv_row({c.x[i], c.xi[i], c.phi_without_flow[i], c.phi_with_flow[i], c.phi_difference[i],
                        c.model_difference[i], c.deviation[i]});
    }
    const std::string name = "phase_curve_om" + signed_label(pc.omega_detuning) + ".csv";
    emit(name, table);
    curve_files.push_back(name);
  }

  nlohmann::json manifest;
  manifest["scenario"] = s.name;
  manifest["mode"] = to_string(mode);
  manifest["plots"] = nlohmann::json::array();
  manifest["plots"].push_back({{"title", "Mean arrival time <t>(x)"},
                               {"kind", "scatter+fit"},
                               {"files", trajectory_files},
                               {"x", "x"},
                               {"y", "t_mean"},
                               {"fit_table", "fit_report.csv"}});
  manifest["plots"].push_back({{"title", "Phase at the envelope maximum"},
                               {"kind", "line"},
                               {"files", curve_files},
                               {"x", "xi"},
                               {"y", {"phi_no_flow", "phi_flow"}}});
  manifest["plots"].push_back({{"title", "Force-induced phase"},
                               {"kind", "scatter+line"},
                               {"files", curve_files},
                               {"x", "xi"},
                               {"y", {"difference", "model"}}});
  emit("manifest.json", manifest.dump(2) + "\n");
  emit("summary.txt", summary_text(s, result));

  std::sort(files.begin(), files.end());
  result.files = std::move(files);
  return result;
}

CompareReport compare_modes(const Scenario& s) {
  const auto analytic = run_scenario(s, Mode::analytic);
  const auto numeric = run_scenario(s, Mode::numeric);
  const auto pipeline = run_scenario(s, Mode::full_pipeline);
  CompareReport report;
  report.max.tag = "max";
  auto keep_max = [](double& slot, double v) { slot = std::max(slot, v); };
  for (std::size_t c = 0; c < analytic.cases.size(); ++c) {
    const auto& a = analytic.cases[c];
    const auto& n = numeric.cases[c];
    const auto& p = pipeline.cases[c];
    for (std::size_t i = 0; i < a.gauges.size(); ++i) {
      const auto& ga = a.gauges[i];
      const auto& gn = n.gauges[i];
      const auto& gp = p.gauges[i];
      CompareRow row;
      row.tag = a.spec.tag;
      row.x = ga.x;
      row.xi = ga.xi;
      row.envelope_analytic_numeric = gn.envelope_error;
      row.envelope_analytic_pipeline = gp.envelope_error;
      row.phase_analytic_numeric = std::abs(wrap_phase(gn.phase_at_peak - ga.phase_at_peak));
      row.phase_analytic_pipeline = std::abs(wrap_phase(gp.phase_at_peak - ga.phase_at_peak));
      row.phase_numeric_pipeline = std::abs(wrap_phase(gp.phase_at_peak - gn.phase_at_peak));
      row.t_mean_analytic_numeric = std::abs(gn.t_mean - ga.t_mean);
      row.t_mean_analytic_pipeline = std::abs(gp.t_mean - ga.t_mean);
      row.t_mean_numeric_pipeline = std::abs(gp.t_mean - gn.t_mean);
      row.sample_period = gp.sample_period;
      auto& m = report.max;
      keep_max(m.envelope_analytic_numeric, row.envelope_analytic_numeric);
      keep_max(m.envelope_analytic_pipeline, row.envelope_analytic_pipeline);
      keep_max(m.phase_analytic_numeric, row.phase_analytic_numeric);
      keep_max(m.phase_analytic_pipeline, row.phase_analytic_pipeline);
      keep_max(m.phase_numeric_pipeline, row.phase_numeric_pipeline);
      keep_max(m.t_mean_analytic_numeric, row.t_mean_analytic_numeric);
      keep_max(m.t_mean_analytic_pipeline, row.t_mean_analytic_pipeline);
      keep_max(m.t_mean_numeric_pipeline, row.t_mean_numeric_pipeline);
      keep_max(m.sample_period, row.sample_period);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_compare(const CompareReport& report, const std::filesystem::path& dir) {
  std::string table =
      "case,x,xi,envelope_analytic_numeric,envelope_analytic_pipeline,phase_analytic_numeric,"
      "phase_analytic_pipeline,phase_numeric_pipeline,t_mean_analytic_numeric,t_mean_analytic_pipeline,"
      "t_mean_numeric_pipeline,sample_period\n";
  for (const auto& r : report.rows) {
    table += r.tag + ',' +
             csv_row({r.x, r.xi, r.envelope_analytic_numeric, r.envelope_analytic_pipeline, r.phase_analytic_numeric,
                      r.phase_analytic_pipeline, r.phase_numeric_pipeline, r.t_mean_analytic_numeric,
                      r.t_mean_analytic_pipeline, r.t_mean_numeric_pipeline, r.sample_period});
  }
  write_text_file(dir / "compare.csv", table);
  write_text_file(dir / "compare_summary.txt", compare_text(report));
}

namespace {

std::string num(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string summary_text(const Scenario& s, const RunResult& result) {
  const auto& p = s.params;
  const DimensionlessFrame<double> frame(p);
  std::ostringstream os;
  os << "scenario: " << s.name << '\n';
  if (!s.description.empty()) os << "description: " << s.description << '\n';
  os << "mode: " << to_string(result.mode) << "\n\n";
  os << "inputs (config keys)\n"
     << "  k0 = " << num(p.k0()) << " 1/m, g = " << num(p.g()) << " m/s^2, a0 = " << num(p.a0())
     << " m, t0 = " << num(p.t0()) << " s, epsilon = " << num(p.epsilon()) << ", force_F = " << num(p.force())
     << '\n';
  os << "  omega_detuning =";
  for (double o : s.detunings) os << ' ' << num(o);
  os << " rad/s\n";
  os << "derived\n"
     << "  omega0 = sqrt(k0 g) = " << num(p.omega0()) << " rad/s\n"
     << "  c_g = omega0 / (2 k0) = " << num(p.group_velocity()) << " m/s\n"
     << "  tau0 = epsilon omega0 t0 = " << num(frame.tau0()) << ", xi_s = tau0^2 / 4 = " << num(frame.xi_s()) << '\n'
     << "  xi = epsilon^2 k0 x, tau = epsilon omega0 (x / c_g - t), p0 = omega_detuning / (epsilon omega0)\n\n";
  os << "trajectory fits  <t>(x) = a1 x + a2 x^2,  c_g = 1 / (a1 + 2 omega_detuning / g),"
        "  F = -(omega0 / (epsilon^3 k0^2)) a2\n";
  for (const auto& r : result.cases) {
    os << "  " << r.spec.tag << ": p0 = " << num(r.spec.p0()) << ", injected F = " << num(r.spec.force);
    if (r.fit) {
      os << ", a1 = " << num(r.fit->a1) << " s/m, a2 = " << num(r.fit->a2) << " s/m^2, c_g = "
         << num(r.fit->c_g_recovered) << " m/s, F = " << num(r.fit->F_recovered)
         << ", rms = " << num(r.fit->residual_rms) << " s";
    } else {
      os << ", fit skipped (fewer than 3 gauges)";
    }
    os << '\n';
    if (r.momentum) {
      os << "    p0^2 from free phase = " << num(r.momentum->p0_squared) << " +- " << num(r.momentum->ci_half_width)
         << " (expected " << num(r.spec.p0() * r.spec.p0()) << ")\n";
    }
  }
  if (!result.curves.empty()) {
    os << "\nforce-induced phase  difference vs -(2/3) F^2 xi^3 - 2 p0 F xi^2\n";
    for (const auto& c : result.curves) {
      os << "  omega_detuning = " << num(c.omega_detuning) << ": max |deviation| = "
         << num(c.curve.max_abs_deviation) << " rad over " << c.curve.x.size() << " gauges\n";
    }
  }
  return os.str();
}

std::string compare_text(const CompareReport& report) {
  const auto& m = report.max;
  std::ostringstream os;
  os << "maximum deviations over " << report.rows.size() << " gauges\n"
     << "  |A| analytic vs numeric:         " << num(m.envelope_analytic_numeric) << '\n'
     << "  |A| analytic vs pipeline:        " << num(m.envelope_analytic_pipeline) << '\n'
     << "  phase analytic vs numeric:       " << num(m.phase_analytic_numeric) << " rad\n"
     << "  phase analytic vs pipeline:      " << num(m.phase_analytic_pipeline) << " rad\n"
     << "  phase numeric vs pipeline:       " << num(m.phase_numeric_pipeline) << " rad\n"
     << "  t_mean analytic vs numeric:      " << num(m.t_mean_analytic_numeric) << " s\n"
     << "  t_mean analytic vs pipeline:     " << num(m.t_mean_analytic_pipeline) << " s\n"
     << "  t_mean numeric vs pipeline:      " << num(m.t_mean_numeric_pipeline) << " s\n"
     << "  sample period:                   " << num(m.sample_period) << " s\n";
  return os.str();
}

}  // namespace wavetank::app
