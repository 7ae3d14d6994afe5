#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "wavetank/core_model.hpp"
#include "wavetank/signal.hpp"
#include "wavetank/spectral.hpp"

namespace wavetank::app {

/// Shortest-round-trip-safe decimal form: 17 significant digits, locale independent.
std::string format_number(double value);
double parse_number(const std::string& text);

/// Header fields shared by gauge and demodulated record files.
struct GaugeHeader {
  double x{};
  double fs{};
  double k0{};
  double omega0{};
};

// Gauge record:          x,fs,k0,omega0 / values / t,eta / rows
// Demodulated record:    same header, then t,eta,envelope,phase_total,phase_residual,confidence
void write_gauge_csv(std::ostream& os, const GaugeRecord<double>& record, const PhysicalParams<double>& params);
void write_demodulated_csv(std::ostream& os, const GaugeRecord<double>& record, const DemodulatedRecord<double>& demod,
                           const PhysicalParams<double>& params);

struct GaugeFile {
  GaugeHeader header;
  GaugeRecord<double> record;
};

struct DemodulatedFile {
  GaugeHeader header;
  GaugeRecord<double> record;
  DemodulatedRecord<double> demod;
};

GaugeFile read_gauge_csv(std::istream& is);
DemodulatedFile read_demodulated_csv(std::istream& is);

/// Field snapshot: a `# xi=...,F=...,p0=...,tau_min=...,tau_max=...,n=...` line,
/// then tau,re_A,im_A,abs_A,phase_unwrapped rows.
void write_field_csv(std::ostream& os, const EnvelopeField<double>& field, double force, double p0);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Writes what `fn(std::ostream&)` produces to `path`, creating parent directories.
template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text_file(path, os.str());
}

}  // namespace wavetank::app
