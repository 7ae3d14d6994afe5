#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavetank/core_model.hpp"
#include "wavetank/errors.hpp"

namespace wavetank::app {

/// Malformed or invalid scenario file. `line()` is 0 when no single line is at fault.
class ConfigError : public Error {
public:
  ConfigError(std::string source, int line, const std::string& message)
      : Error(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  int line() const noexcept { return line_; }

private:
  std::string source_;
  int line_;
};

/// Flat `key = value` text with `#` comments. Keys are unique.
class KeyValueFile {
public:
  struct Entry {
    std::string value;
    int line;
  };

  static KeyValueFile parse(std::string_view text, std::string source);
  static KeyValueFile load(const std::filesystem::path& path);

  const std::string& source() const noexcept { return source_; }
  const std::map<std::string, Entry>& entries() const noexcept { return entries_; }
  const Entry* find(const std::string& key) const;

private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

enum class Mode { analytic, numeric, full_pipeline };
enum class FlowSelection { both, with_flow, without_flow };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);  ///< throws InvalidParameter("mode", ...)

struct Scenario {
  std::string name{};
  std::string description{};
  std::string source{};
  PhysicalParams<double> params;       ///< first detuning, force = force_F
  std::vector<double> detunings{};     ///< omega_detuning may list several values
  std::vector<double> gauge_positions{};///< [m], strictly increasing
  Mode mode = Mode::full_pipeline;
  FlowSelection flow = FlowSelection::both;
  std::filesystem::path output_dir{};
  double max_gauge_x = 5.0;            ///< tank length [m]

  std::optional<double> d_xi{};        ///< defaults to xi_s / 2000
  double boundary_margin = 0.05;
  double norm_drift_tol = 1e-10;

  double sample_rate_factor = 40.0;    ///< fs = factor * omega0 / 2 pi
  double record_halfspan_t0 = 6.0;
  int record_stride = 1;               ///< write every n-th gauge record (0: none)

  bool fit_weighted = false;
  bool fit_intercept = false;
};

/// Every key a scenario file may contain.
const std::vector<std::string>& scenario_keys();

Scenario parse_scenario(const KeyValueFile& file);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace wavetank::app
