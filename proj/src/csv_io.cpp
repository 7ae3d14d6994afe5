#include "wavetank/app/csv_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "wavetank/phase.hpp"

namespace wavetank::app {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw Error(std::string("unexpected end of file while reading ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void expect_columns(const std::string& line, const std::vector<std::string>& names) {
  if (split(line) != names) throw Error("unexpected CSV header '" + line + "'");
}

GaugeHeader read_header(std::istream& is) {
  expect_columns(next_line(is, "header"), {"x", "fs", "k0", "omega0"});
  const auto v = split(next_line(is, "header values"));
  if (v.size() != 4) throw Error("header values must have 4 columns");
  return {parse_number(v[0]), parse_number(v[1]), parse_number(v[2]), parse_number(v[3])};
}

void write_header(std::ostream& os, const GaugeRecord<double>& record, const PhysicalParams<double>& params) {
  os << "x,fs,k0,omega0\n"
     << format_number(record.x()) << ',' << format_number(record.sample_rate()) << ',' << format_number(params.k0())
     << ',' << format_number(params.omega0()) << '\n';
}

std::vector<std::vector<double>> read_rows(std::istream& is, std::size_t columns) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) throw Error("row has " + std::to_string(cells.size()) + " columns, expected " +
                                             std::to_string(columns));
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), ptr);
}

double parse_number(const std::string& text) {
  double value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw Error("'" + text + "' is not a number");
  return value;
}

void write_gauge_csv(std::ostream& os, const GaugeRecord<double>& record, const PhysicalParams<double>& params) {
  write_header(os, record, params);
  os << "t,eta\n";
  for (Eigen::Index i = 0; i < record.size(); ++i) {
    os << format_number(record.t()(i)) << ',' << format_number(record.eta()(i)) << '\n';
  }
}

void write_demodulated_csv(std::ostream& os, const GaugeRecord<double>& record, const DemodulatedRecord<double>& demod,
                           const PhysicalParams<double>& params) {
  write_header(os, record, params);
  os << "t,eta,envelope,phase_total,phase_residual,confidence\n";
  for (Eigen::Index i = 0; i < record.size(); ++i) {
    os << format_number(record.t()(i)) << ',' << format_number(record.eta()(i)) << ','
       << format_number(demod.envelope(i)) << ',' << format_number(demod.phase_total(i)) << ','
       << format_number(demod.phase_residual(i)) << ',' << (demod.confidence(i) ? 1 : 0) << '\n';
  }
}

GaugeFile read_gauge_csv(std::istream& is) {
  const auto header = read_header(is);
  expect_columns(next_line(is, "column names"), {"t", "eta"});
  const auto rows = read_rows(is, 2);
  ArrayX<double> t(static_cast<Eigen::Index>(rows.size())), eta(t.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t(static_cast<Eigen::Index>(i)) = rows[i][0];
    eta(static_cast<Eigen::Index>(i)) = rows[i][1];
  }
  return {header, GaugeRecord<double>(header.x, std::move(t), std::move(eta))};
}

DemodulatedFile read_demodulated_csv(std::istream& is) {
  const auto header = read_header(is);
  expect_columns(next_line(is, "column names"), {"t", "eta", "envelope", "phase_total", "phase_residual", "confidence"});
  const auto rows = read_rows(is, 6);
  const auto n = static_cast<Eigen::Index>(rows.size());
  ArrayX<double> t(n), eta(n);
  DemodulatedRecord<double> d;
  d.x = header.x;
  d.envelope.resize(n);
  d.phase_total.resize(n);
  d.phase_residual.resize(n);
  d.confidence.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    t(i) = r[0];
    eta(i) = r[1];
    d.envelope(i) = r[2];
    d.phase_total(i) = r[3];
    d.phase_residual(i) = r[4];
    d.confidence(i) = r[5] != 0.0;
  }
  d.t = t;
  return {header, GaugeRecord<double>(header.x, std::move(t), std::move(eta)), std::move(d)};
}

void write_field_csv(std::ostream& os, const EnvelopeField<double>& field, double force, double p0) {
  const auto& g = field.grid();
  os << "# xi=" << format_number(field.xi()) << ",F=" << format_number(force) << ",p0=" << format_number(p0)
     << ",tau_min=" << format_number(g.tau_min) << ",tau_max=" << format_number(g.tau_max) << ",n=" << g.n << '\n';
  os << "tau,re_A,im_A,abs_A,phase_unwrapped\n";
  ArrayX<double> wrapped(field.size());
  for (Eigen::Index j = 0; j < field.size(); ++j) wrapped(j) = std::arg(field.values()(j));
  const auto phase = unwrap(wrapped);
  for (Eigen::Index j = 0; j < field.size(); ++j) {
    const auto a = field.values()(j);
    os << format_number(field.tau(j)) << ',' << format_number(a.real()) << ',' << format_number(a.imag()) << ','
       << format_number(std::abs(a)) << ',' << format_number(phase(j)) << '\n';
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace wavetank::app
