#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wavetank/app/config.hpp"
#include "wavetank/fit.hpp"

namespace wavetank::app {

/// One (detuning, force) combination of a scenario.
struct Case {
  std::string tag;  ///< e.g. "om+4_flow"
  double omega_detuning{};
  double force{};
  bool with_flow{};
  PhysicalParams<double> params;

  double p0() const { return effective_momentum(params); }
};

std::vector<Case> expand_cases(const Scenario& scenario);

/// Per-gauge measurement produced by any of the three modes.
struct GaugeResult {
  double x{};
  double xi{};
  double t_mean{};         ///< [s]
  double t_peak{};         ///< [s]
  double tau_peak{};       ///< comoving location of the maximum
  double abs_peak{};       ///< |A| at the maximum (normalised)
  double phase_at_peak{};  ///< [rad], any branch
  double envelope_error{}; ///< max deviation of |A| from the closed form (0 in analytic mode)
  double sample_period{};  ///< [s], pipeline only
};

struct CaseResult {
  Case spec;
  Mode mode{};
  std::vector<GaugeResult> gauges;
  std::optional<TrajectoryFit<double>> fit;
  std::optional<MomentumPhaseEstimate<double>> momentum;
};

struct PhaseCurveResult {
  double omega_detuning{};
  double p0{};
  double force{};
  PhaseCurve<double> curve;
};

struct RunResult {
  Mode mode{};
  std::vector<CaseResult> cases;
  std::vector<PhaseCurveResult> curves;
  std::vector<std::filesystem::path> files;  ///< relative to the output directory, sorted
};

/// Computes every case of `scenario` in `mode` without touching the disk.
/// `record_sink`, when set, receives per-gauge artifacts (records, snapshots)
/// as (relative path, content) pairs.
using ArtifactSink = std::function<void(const std::filesystem::path&, const std::string&)>;

CaseResult run_case(const Scenario& scenario, const Case& c, Mode mode, const ArtifactSink& sink = {});
RunResult run_scenario(const Scenario& scenario, Mode mode, const ArtifactSink& sink = {});

/// Runs `scenario` and writes tables, fit report, phase curves, records and
/// a plot manifest below `output_dir`. Output is byte-identical across runs.
RunResult run_and_write(const Scenario& scenario, Mode mode, const std::filesystem::path& output_dir);

struct CompareRow {
  std::string tag;
  double x{};
  double xi{};
  double envelope_analytic_numeric{};
  double envelope_analytic_pipeline{};
  double phase_analytic_numeric{};
  double phase_analytic_pipeline{};
  double phase_numeric_pipeline{};
  double t_mean_analytic_numeric{};
  double t_mean_analytic_pipeline{};
  double t_mean_numeric_pipeline{};
  double sample_period{};
};

struct CompareReport {
  std::vector<CompareRow> rows;
  CompareRow max;  ///< column-wise maxima (tag "max")
};

/// Runs all three modes and tabulates their per-gauge disagreement.
CompareReport compare_modes(const Scenario& scenario);
void write_compare(const CompareReport& report, const std::filesystem::path& output_dir);

std::string summary_text(const Scenario& scenario, const RunResult& result);
std::string compare_text(const CompareReport& report);

}  // namespace wavetank::app
