#include "wavetank/app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wavetank::app {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class Reader {
public:
  explicit Reader(const KeyValueFile& file) : file_(file) {}

  const KeyValueFile::Entry* entry(const std::string& key) const { return file_.find(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto* e = entry(key);
    throw ConfigError(file_.source(), e ? e->line : 0, message);
  }

  double number(const std::string& key, std::string_view text) const {
    text = trim(text);
    double value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
      fail(key, "'" + std::string(text) + "' is not a number for key '" + key + "'");
    }
    return value;
  }

  std::optional<double> optional_number(const std::string& key) const {
    const auto* e = entry(key);
    if (!e) return std::nullopt;
    return number(key, e->value);
  }

  double required_number(const std::string& key) const {
    const auto v = optional_number(key);
    if (!v) throw ConfigError(file_.source(), 0, "missing required key '" + key + "'");
    return *v;
  }

  std::vector<double> number_list(const std::string& key) const {
    std::vector<double> out;
    const auto* e = entry(key);
    if (!e) return out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) fail(key, "empty item in list for key '" + key + "'");
      out.push_back(number(key, item));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto* e = entry(key);
    if (!e) return fallback;
    const auto v = trim(e->value);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(key, "'" + std::string(v) + "' is not a boolean for key '" + key + "'");
  }

  std::string text(const std::string& key, std::string fallback) const {
    const auto* e = entry(key);
    return e ? std::string(trim(e->value)) : std::move(fallback);
  }

  const std::string& source() const { return file_.source(); }

private:
  const KeyValueFile& file_;
};

std::string param_key(const std::string& field) {
  if (field == "force") return "force_F";
  return field;
}

std::vector<double> gauge_range(const Reader& r) {
  const auto* e = r.entry("gauge_range");
  const std::string_view v = e->value;
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= v.size(); ++i) {
    if (i == v.size() || v[i] == ':') {
      parts.push_back(v.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 3) r.fail("gauge_range", "gauge_range must read start:stop:step");
  const double first = r.number("gauge_range", parts[0]);
  const double last = r.number("gauge_range", parts[1]);
  const double step = r.number("gauge_range", parts[2]);
  if (!(step > 0) || last < first) r.fail("gauge_range", "gauge_range needs step > 0 and stop >= start");
  const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9)) + 1;
  if (count > 100000) r.fail("gauge_range", "gauge_range expands to too many gauges");
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(first + static_cast<double>(i) * step);
  return out;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile file;
  file.source_ = std::move(source);
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(file.source_, line_no, "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(file.source_, line_no, "empty key");
    if (value.empty()) throw ConfigError(file.source_, line_no, "empty value for key '" + key + "'");
    const auto& known = scenario_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(file.source_, line_no, "unknown key '" + key + "'");
    }
    if (const auto* prev = file.find(key)) {
      throw ConfigError(file.source_, line_no,
                        "duplicate key '" + key + "' (first set on line " + std::to_string(prev->line) + ")");
    }
    file.entries_.emplace(key, Entry{value, line_no});
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueFile::Entry* KeyValueFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::analytic: return "analytic";
    case Mode::numeric: return "numeric";
    case Mode::full_pipeline: return "full-pipeline";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "analytic") return Mode::analytic;
  if (text == "numeric") return Mode::numeric;
  if (text == "full-pipeline") return Mode::full_pipeline;
  throw InvalidParameter("mode", "expected analytic, numeric or full-pipeline, got '" + std::string(text) + "'");
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys{
      "name",          "description",      "k0",           "g",
      "a0",            "t0",               "omega_detuning", "epsilon",
      "force_F",       "gauge_positions",  "gauge_range",  "max_gauge_x",
      "mode",          "with_flow",        "output_dir",   "d_xi",
      "boundary_margin", "norm_drift_tol", "sample_rate_factor", "record_halfspan_t0",
      "record_stride", "fit_weighted",     "fit_intercept",
  };
  return keys;
}

Scenario parse_scenario(const KeyValueFile& file) {
  const Reader r(file);

  std::vector<double> detunings = r.number_list("omega_detuning");
  if (detunings.empty()) detunings.push_back(0.0);

  ParamValues<double> v;
  v.k0 = r.required_number("k0");
  v.g = r.optional_number("g").value_or(9.81);
  v.a0 = r.required_number("a0");
  v.t0 = r.required_number("t0");
  v.epsilon = r.required_number("epsilon");
  v.force = r.optional_number("force_F").value_or(0.0);
  v.omega_detuning = detunings.front();

  auto build_params = [&](const ParamValues<double>& values) {
    try {
      return PhysicalParams<double>(values);
    } catch (const InvalidParameter& e) {
      r.fail(param_key(e.field()), e.what());
    }
  };
  Scenario s{.params = build_params(v)};
  for (double omega : detunings) {
    auto each = v;
    each.omega_detuning = omega;
    build_params(each);
  }
  s.detunings = detunings;
  s.source = file.source();
  s.name = r.text("name", std::filesystem::path(file.source()).stem().string());
  s.description = r.text("description", "");

  const bool has_list = r.entry("gauge_positions") != nullptr;
  const bool has_range = r.entry("gauge_range") != nullptr;
  if (has_list && has_range) r.fail("gauge_range", "set either gauge_positions or gauge_range, not both");
  if (has_list) s.gauge_positions = r.number_list("gauge_positions");
  if (has_range) s.gauge_positions = gauge_range(r);
  const std::string gauge_key = has_range ? "gauge_range" : "gauge_positions";
  if (s.gauge_positions.empty()) {
    throw ConfigError(file.source(), 0, "gauge list is empty (set gauge_positions or gauge_range)");
  }

  s.max_gauge_x = r.optional_number("max_gauge_x").value_or(5.0);
  if (!(s.max_gauge_x > 0)) r.fail("max_gauge_x", "max_gauge_x must be positive");
  for (std::size_t i = 0; i < s.gauge_positions.size(); ++i) {
    const double x = s.gauge_positions[i];
    if (x < 0) r.fail(gauge_key, "gauge positions must be >= 0");
    if (x > s.max_gauge_x * (1 + 1e-12)) {
      r.fail(gauge_key, "gauge at x = " + std::to_string(x) + " m lies beyond max_gauge_x");
    }
    if (i > 0 && !(x > s.gauge_positions[i - 1])) r.fail(gauge_key, "gauge positions must be strictly increasing");
  }

  try {
    s.mode = parse_mode(r.text("mode", "full-pipeline"));
  } catch (const InvalidParameter& e) {
    r.fail("mode", e.what());
  }
  const std::string flow = r.text("with_flow", "both");
  if (flow == "both") {
    s.flow = FlowSelection::both;
  } else if (flow == "on" || flow == "true") {
    s.flow = FlowSelection::with_flow;
  } else if (flow == "off" || flow == "false") {
    s.flow = FlowSelection::without_flow;
  } else {
    r.fail("with_flow", "with_flow must be both, on or off");
  }
  s.output_dir = r.text("output_dir", "out/" + s.name);

  s.d_xi = r.optional_number("d_xi");
  if (s.d_xi && !(*s.d_xi > 0)) r.fail("d_xi", "d_xi must be positive");
  s.boundary_margin = r.optional_number("boundary_margin").value_or(0.05);
  if (!(s.boundary_margin >= 0 && s.boundary_margin < 0.5)) {
    r.fail("boundary_margin", "boundary_margin must lie in [0, 0.5)");
  }
  s.norm_drift_tol = r.optional_number("norm_drift_tol").value_or(1e-10);
  if (!(s.norm_drift_tol > 0)) r.fail("norm_drift_tol", "norm_drift_tol must be positive");

  s.sample_rate_factor = r.optional_number("sample_rate_factor").value_or(40.0);
  if (!(s.sample_rate_factor > 0)) r.fail("sample_rate_factor", "sample_rate_factor must be positive");
  s.record_halfspan_t0 = r.optional_number("record_halfspan_t0").value_or(6.0);
  if (!(s.record_halfspan_t0 > 0)) r.fail("record_halfspan_t0", "record_halfspan_t0 must be positive");
  const double stride = r.optional_number("record_stride").value_or(1.0);
  if (stride < 0 || stride != std::floor(stride)) r.fail("record_stride", "record_stride must be a non-negative integer");
  s.record_stride = static_cast<int>(stride);

  s.fit_weighted = r.boolean("fit_weighted", false);
  s.fit_intercept = r.boolean("fit_intercept", false);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(KeyValueFile::load(path)); }

}  // namespace wavetank::app
