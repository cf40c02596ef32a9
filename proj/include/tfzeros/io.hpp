#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfzeros/detect.hpp"
#include "tfzeros/pattern.hpp"
#include "tfzeros/signal.hpp"
#include "tfzeros/spatial.hpp"
#include "tfzeros/stft.hpp"

namespace tfz::io {

// CSV files carry a header row; '#' lines are metadata. Reals are written
// with 17 significant digits so a round trip is exact.

void write_signal_csv(std::ostream& out, const DiscreteSignal& s);           // t,re,im
DiscreteSignal read_signal_csv(std::istream& in);

void write_stft_csv(std::ostream& out, const TFMatrix& v);                   // t,omega,re,im
void write_spectrogram_csv(std::ostream& out, const Spectrogram& s);         // t,omega,value

/// Little-endian binary: u64 n_time, u64 n_freq, f64 t_start, f64 dt (row
/// spacing), f64 omega_start, f64 domega, then n_time * n_freq f64 row-major.
void write_spectrogram_bin(std::ostream& out, const Spectrogram& s);

struct SpectrogramBlock {
  std::size_t n_time = 0;
  std::size_t n_freq = 0;
  double t_start = 0.0;
  double dt = 0.0;
  double omega_start = 0.0;
  double domega = 0.0;
  std::vector<double> values;
};
SpectrogramBlock read_spectrogram_bin(std::istream& in);

void write_pattern_csv(std::ostream& out, const PointPattern& p);  // '# window ...' then x,y
PointPattern read_pattern_csv(std::istream& in);

void write_curve_csv(std::ostream& out, const SummaryCurve& c);    // '# kind/estimator/correction' then r,value
SummaryCurve read_curve_csv(std::istream& in);

/// Several curves on a shared r grid as r,<name1>,<name2>,...
void write_curves_csv(std::ostream& out, std::span<const SummaryCurve> curves, std::span<const std::string> names);

/// Minimal SVG line chart of one or more curves.
void write_curves_svg(std::ostream& out, std::span<const SummaryCurve> curves, std::span<const std::string> names);

nlohmann::json to_json(const TestReport& r);
nlohmann::json to_json(const PowerCell& c);
void write_power_csv(std::ostream& out, std::span<const PowerCell> cells);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tfz::io
