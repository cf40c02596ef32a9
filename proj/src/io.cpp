#include "tfzeros/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tfz::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary spectrogram format assumes a little-endian host");

struct Precise {
  explicit Precise(std::ostream& o) : out(o), flags(o.flags()), precision(o.precision()) {
    out << std::setprecision(17);
  }
  ~Precise() {
    out.flags(flags);
    out.precision(precision);
  }
  std::ostream& out;
  std::ios::fmtflags flags;
  std::streamsize precision;
};

std::vector<double> parse_row(const std::string& line, std::size_t expected) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    try {
      v.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw std::invalid_argument("csv: malformed number '" + cell + "'");
    }
  }
  if (v.size() != expected) throw std::invalid_argument("csv: expected " + std::to_string(expected) + " columns");
  return v;
}

// Calls on_meta for '#' lines and on_row for data rows after the header.
template <typename Meta, typename Row>
void scan_csv(std::istream& in, const std::string& header, Meta&& on_meta, Row&& on_row) {
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      on_meta(line);
      continue;
    }
    if (!seen_header) {
      if (line != header) throw std::invalid_argument("csv: expected header '" + header + "'");
      seen_header = true;
      continue;
    }
    on_row(line);
  }
  if (!seen_header) throw std::invalid_argument("csv: missing header '" + header + "'");
}

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw std::invalid_argument("binary spectrogram: truncated input");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

SummaryKind kind_from_string(const std::string& s) {
  if (s == "K") return SummaryKind::K;
  if (s == "L") return SummaryKind::L;
  if (s == "F") return SummaryKind::F;
  if (s == "pcf") return SummaryKind::Pcf;
  throw std::invalid_argument("csv: unknown summary kind '" + s + "'");
}

}  // namespace

void write_signal_csv(std::ostream& out, const DiscreteSignal& s) {
  Precise p(out);
  out << "t,re,im\n";
  for (std::size_t k = 0; k < s.samples.size(); ++k)
    out << s.grid.time(k) << ',' << s.samples[k].real() << ',' << s.samples[k].imag() << '\n';
}

DiscreteSignal read_signal_csv(std::istream& in) {
  std::vector<double> t;
  std::vector<cplx> x;
  scan_csv(in, "t,re,im", [](const std::string&) {}, [&](const std::string& line) {
    const auto v = parse_row(line, 3);
    t.push_back(v[0]);
    x.emplace_back(v[1], v[2]);
  });
  if (t.size() < 2) throw std::invalid_argument("signal csv: need at least 2 samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("signal csv: times are not uniformly spaced");
  return DiscreteSignal(TimeGrid{t.front(), dt, t.size()}, std::move(x));
}

void write_stft_csv(std::ostream& out, const TFMatrix& v) {
  Precise p(out);
  out << "t,omega,re,im\n";
  for (std::size_t k = 0; k < v.rows(); ++k)
    for (std::size_t l = 0; l < v.cols(); ++l)
      out << v.grid.time(k) << ',' << v.grid.omega(l) << ',' << v.at(k, l).real() << ',' << v.at(k, l).imag() << '\n';
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& s) {
  Precise p(out);
  out << "t,omega,value\n";
  for (std::size_t k = 0; k < s.rows(); ++k)
    for (std::size_t l = 0; l < s.cols(); ++l) out << s.grid.time(k) << ',' << s.grid.omega(l) << ',' << s.at(k, l) << '\n';
}

void write_spectrogram_bin(std::ostream& out, const Spectrogram& s) {
  put<std::uint64_t>(out, s.rows());
  put<std::uint64_t>(out, s.cols());
  put<double>(out, s.grid.time(0));
  put<double>(out, s.grid.time_step());
  put<double>(out, s.grid.omega_start);
  put<double>(out, s.grid.domega());
  for (double v : s.values) put<double>(out, v);
}

SpectrogramBlock read_spectrogram_bin(std::istream& in) {
  SpectrogramBlock b;
  b.n_time = get<std::uint64_t>(in);
  b.n_freq = get<std::uint64_t>(in);
  b.t_start = get<double>(in);
  b.dt = get<double>(in);
  b.omega_start = get<double>(in);
  b.domega = get<double>(in);
  if (b.n_freq != 0 && b.n_time > std::numeric_limits<std::size_t>::max() / 8 / b.n_freq)
    throw std::invalid_argument("binary spectrogram: implausible size");
  b.values.resize(b.n_time * b.n_freq);
  for (auto& v : b.values) v = get<double>(in);
  return b;
}

void write_pattern_csv(std::ostream& out, const PointPattern& p) {
  Precise pr(out);
  out << "# window " << p.window.x_min << ' ' << p.window.x_max << ' ' << p.window.y_min << ' ' << p.window.y_max << '\n';
  out << "x,y\n";
  for (const auto& z : p.points) out << z.real() << ',' << z.imag() << '\n';
}

PointPattern read_pattern_csv(std::istream& in) {
  PointPattern p;
  bool have_window = false;
  scan_csv(
      in, "x,y",
      [&](const std::string& line) {
        std::istringstream ss(line.substr(1));
        std::string tag;
        ss >> tag;
        if (tag != "window") return;
        if (!(ss >> p.window.x_min >> p.window.x_max >> p.window.y_min >> p.window.y_max))
          throw std::invalid_argument("pattern csv: malformed window line");
        have_window = true;
      },
      [&](const std::string& line) {
        const auto v = parse_row(line, 2);
        p.points.emplace_back(v[0], v[1]);
      });
  if (!have_window) throw std::invalid_argument("pattern csv: missing '# window' line");
  p.validate();
  return p;
}

void write_curve_csv(std::ostream& out, const SummaryCurve& c) {
  Precise p(out);
  out << "# kind " << to_string(c.kind) << '\n';
  out << "# estimator " << (c.estimator.empty() ? "-" : c.estimator) << '\n';
  out << "# correction " << (c.correction.empty() ? "-" : c.correction) << '\n';
  out << "r,value\n";
  for (std::size_t i = 0; i < c.r.size(); ++i) out << c.r[i] << ',' << c.values[i] << '\n';
}

SummaryCurve read_curve_csv(std::istream& in) {
  SummaryCurve c;
  scan_csv(
      in, "r,value",
      [&](const std::string& line) {
        std::istringstream ss(line.substr(1));
        std::string tag, value;
        ss >> tag >> value;
        if (tag == "kind") c.kind = kind_from_string(value);
        else if (tag == "estimator") c.estimator = value == "-" ? "" : value;
        else if (tag == "correction") c.correction = value == "-" ? "" : value;
      },
      [&](const std::string& line) {
        const auto v = parse_row(line, 2);
        c.r.push_back(v[0]);
        c.values.push_back(v[1]);
      });
  c.validate();
  return c;
}

void write_curves_csv(std::ostream& out, std::span<const SummaryCurve> curves, std::span<const std::string> names) {
  if (curves.empty() || curves.size() != names.size()) throw std::invalid_argument("curves csv: names/curves mismatch");
  for (const auto& c : curves)
    if (c.r != curves.front().r) throw std::invalid_argument("curves csv: curves must share the r grid");
  Precise p(out);
  out << 'r';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < curves.front().r.size(); ++i) {
    out << curves.front().r[i];
    for (const auto& c : curves) out << ',' << c.values[i];
    out << '\n';
  }
}

void write_curves_svg(std::ostream& out, std::span<const SummaryCurve> curves, std::span<const std::string> names) {
  if (curves.empty() || curves.size() != names.size()) throw std::invalid_argument("curves svg: names/curves mismatch");
  constexpr double W = 640, H = 400, pad = 48;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.r.size(); ++i) {
      x0 = std::min(x0, c.r[i]);
      x1 = std::max(x1, c.r[i]);
      if (std::isfinite(c.values[i])) {
        y0 = std::min(y0, c.values[i]);
        y1 = std::max(y1, c.values[i]);
      }
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto sx = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
  auto sy = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
  static constexpr const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  Precise p(out);
  out << std::setprecision(6);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << W - 2 * pad << "\" height=\"" << H - 2 * pad
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"" << H - pad / 3 << "\" font-size=\"11\">r in [" << x0 << ", " << x1
      << "], value in [" << y0 << ", " << y1 << "]</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* colour = colours[k % std::size(colours)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
    for (std::size_t i = 0; i < curves[k].r.size(); ++i)
      if (std::isfinite(curves[k].values[i])) out << sx(curves[k].r[i]) << ',' << sy(curves[k].values[i]) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << W - pad - 100 << "\" y=\"" << pad + 14 * (k + 1) << "\" font-size=\"11\" fill=\"" << colour
        << "\">" << names[k] << "</text>\n";
  }
  out << "</svg>\n";
}

nlohmann::json to_json(const TestReport& r) {
  return {{"config",
           {{"alpha", r.alpha},
            {"m", r.m},
            {"k", r.k},
            {"statistic", to_string(r.statistic)},
            {"summary", to_string(r.summary)},
            {"r_min", r.r_min},
            {"r_max", r.r_max},
            {"seed", r.seed.seed},
            {"stream_id", r.seed.stream_id}}},
          {"observed_statistic", r.observed_statistic},
          {"sorted_noise_statistics", r.sorted_noise_statistics},
          {"threshold", r.threshold},
          {"reject", r.reject}};
}

nlohmann::json to_json(const PowerCell& c) {
  return {{"snr", c.snr},         {"support_fraction", c.support_fraction},
          {"summary", to_string(c.summary)},
          {"r_max", c.r_max},     {"rejections", c.rejections},
          {"repeats", c.repeats}, {"power", c.power},
          {"ci_low", c.ci_low},   {"ci_high", c.ci_high}};
}

void write_power_csv(std::ostream& out, std::span<const PowerCell> cells) {
  Precise p(out);
  out << "snr,support_fraction,summary,r_max,rejections,repeats,power,ci_low,ci_high\n";
  for (const auto& c : cells)
    out << c.snr << ',' << c.support_fraction << ',' << to_string(c.summary) << ',' << c.r_max << ',' << c.rejections
        << ',' << c.repeats << ',' << c.power << ',' << c.ci_low << ',' << c.ci_high << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace tfz::io
