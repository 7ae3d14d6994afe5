// Command-line front end: run, compare, validate and list bundled scenarios.
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavetank/app/config.hpp"
#include "wavetank/app/scenario.hpp"
#include "wavetank/errors.hpp"

namespace fs = std::filesystem;
using namespace wavetank;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

fs::path scenario_dir() { return fs::path(WAVETANK_SCENARIO_DIR); }

// A bare name such as "fig1b" resolves to the bundled scenario file.
fs::path resolve_config(const std::string& arg) {
  const fs::path p(arg);
  if (fs::exists(p)) return p;
  if (!p.has_parent_path() && !p.has_extension()) {
    const auto bundled = scenario_dir() / (arg + ".cfg");
    if (fs::exists(bundled)) return bundled;
  }
  return p;
}

struct Options {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::string> mode;
  bool quiet = false;
};

app::Scenario load(const Options& o) {
  auto s = app::load_scenario(resolve_config(o.config));
  if (o.mode) {
    try {
      s.mode = app::parse_mode(*o.mode);
    } catch (const InvalidParameter& e) {
      throw app::ConfigError("--mode", 0, e.what());
    }
  }
  if (o.output_dir) s.output_dir = *o.output_dir;
  if (!o.quiet && s.params.high_steepness()) {
    std::cerr << "warning: epsilon = " << s.params.epsilon()
              << " exceeds 0.15; the linear envelope model is outside its comfortable range\n";
  }
  return s;
}

int cmd_run(const Options& o) {
  const auto s = load(o);
  const auto result = app::run_and_write(s, s.mode, s.output_dir);
  if (!o.quiet) {
    std::cout << app::summary_text(s, result);
    std::cout << "\nwrote " << result.files.size() << " files to " << s.output_dir.string() << '\n';
  }
  return kOk;
}

int cmd_compare(const Options& o) {
  const auto s = load(o);
  const auto report = app::compare_modes(s);
  app::write_compare(report, s.output_dir);
  if (!o.quiet) std::cout << app::compare_text(report);
  return kOk;
}

int cmd_validate(const Options& o) {
  const auto s = load(o);
  if (!o.quiet) {
    std::cout << s.source << ": ok (" << s.gauge_positions.size() << " gauges, " << app::expand_cases(s).size()
              << " cases, mode " << app::to_string(s.mode) << ")\n";
  }
  return kOk;
}

int cmd_list(bool quiet) {
  std::vector<fs::path> files;
  if (fs::is_directory(scenario_dir())) {
    for (const auto& e : fs::directory_iterator(scenario_dir())) {
      if (e.path().extension() == ".cfg") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::cout << f.stem().string();
    if (!quiet) {
      try {
        const auto s = app::load_scenario(f);
        if (!s.description.empty()) std::cout << "  " << s.description;
      } catch (const Error& e) {
        std::cout << "  (invalid: " << e.what() << ')';
      }
    }
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Water-wave packet lab: propagate, synthesize, demodulate and fit Gaussian envelopes"};
  cli.require_subcommand(1);

  Options opts;
  auto add_common = [&](CLI::App* sub, bool with_outputs) {
    sub->add_option("config", opts.config, "scenario file or bundled scenario name")->required();
    sub->add_option("--mode", opts.mode, "analytic, numeric or full-pipeline");
    if (with_outputs) sub->add_option("--output-dir", opts.output_dir, "override output_dir");
    sub->add_flag("--quiet,-q", opts.quiet, "print nothing on success");
  };
  auto* run = cli.add_subcommand("run", "run a scenario and write its artifacts");
  add_common(run, true);
  auto* compare = cli.add_subcommand("compare", "cross-check analytic, numeric and full-pipeline modes");
  add_common(compare, true);
  auto* validate = cli.add_subcommand("validate", "parse and validate a scenario file");
  add_common(validate, false);
  auto* list = cli.add_subcommand("list-scenarios", "list bundled scenarios");
  list->add_flag("--quiet,-q", opts.quiet, "names only");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(opts);
    if (compare->parsed()) return cmd_compare(opts);
    if (validate->parsed()) return cmd_validate(opts);
    return cmd_list(opts.quiet);
  } catch (const app::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}
