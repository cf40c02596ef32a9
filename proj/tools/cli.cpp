#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"
#include "tfzeros/detect.hpp"
#include "tfzeros/parallel.hpp"
#include "tfzeros/gaf.hpp"
#include "tfzeros/io.hpp"
#include "tfzeros/signal.hpp"
#include "tfzeros/spatial.hpp"
#include "tfzeros/stft.hpp"
#include "tfzeros/zeros.hpp"

namespace tfz::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

const json& defaults() {
  static const json d = {
      {"seed", 0},
      {"workers", 0},
      {"out", "tfzeros_out"},
      {"format", "csv"},
      {"grid", {{"n", 4096}, {"half_span", 64.0}}},
      {"signal",
       {{"type", "noise"},
        {"amplitude", 1.0},
        {"omega", 4.0},
        {"omega1", 6.0},
        {"omega2", 10.0},
        {"half_support", 64.0},
        {"k", 0},
        {"d", 1.0},
        {"phi", 0.0},
        {"t0", 0.0}}},
      {"noise", {{"model", "discrete"}, {"terms", 1024}}},
      {"snr", "inf"},
      {"spectrogram", {{"omega_min", 0.0}, {"omega_max", 16.0}, {"hop", 1}, {"norm", "unit"}}},
      {"zeros", {{"threshold", "none"}, {"epsilon", 1e-4}, {"margin", 3.0}}},
      {"stats", {{"summaries", {"L", "F"}}, {"r_max", 2.0}, {"n_r", 64}, {"f_query_spacing", 0.25}, {"svg", false}}},
      {"test",
       {{"alpha", 0.05},
        {"m", 199},
        {"k", 10},
        {"statistic", "S2"},
        {"summary", "F"},
        {"r_min", 0.0},
        {"r_max", 2.0},
        {"reference", "simulated"}}},
      {"gaf", {{"gamma", 1.0}, {"n_terms", 0}, {"window", {-5.0, 5.0, -5.0, 5.0}}}},
      {"theory", {{"kinds", {"pcf", "rho1", "hole"}}, {"gamma", 0.5}, {"r_min", 0.0}, {"r_max", 4.0}, {"n_r", 201}}},
      {"power",
       {{"snr_list", {1.0, 5.0, 10.0}},
        {"support_fractions", {1.0, 0.5}},
        {"r_max_list", {0.5, 1.0, 1.5, 2.0, 2.5}},
        {"summaries", {"L", "F"}},
        {"statistic", "S2"},
        {"n_repeats", 200},
        {"ci_level", 0.95}}},
  };
  return d;
}

void merge_into(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) throw std::invalid_argument("manifest: '" + path + "' must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!target.contains(key)) throw std::invalid_argument("manifest: unknown key '" + where + "'");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_into(slot, value, where);
      continue;
    }
    bool ok = false;
    if (where == "snr") ok = value.is_number() || value == "inf";
    else if (slot.is_number_integer()) ok = value.is_number_integer() && value.get<long long>() >= 0;
    else if (slot.is_number()) ok = value.is_number();
    else if (slot.is_string()) ok = value.is_string();
    else if (slot.is_boolean()) ok = value.is_boolean();
    else if (slot.is_array()) ok = value.is_array();
    if (!ok) throw std::invalid_argument("manifest: '" + where + "' has the wrong type");
    slot = value;
  }
}

SummaryKind summary_from(const std::string& s) {
  if (s == "K") return SummaryKind::K;
  if (s == "L") return SummaryKind::L;
  if (s == "F") return SummaryKind::F;
  if (s == "pcf") return SummaryKind::Pcf;
  throw std::invalid_argument("manifest: unknown summary '" + s + "'");
}

Statistic statistic_from(const std::string& s) {
  if (s == "S2" || s == "S_2") return Statistic::S2;
  if (s == "Sinf" || s == "S_inf") return Statistic::SInf;
  throw std::invalid_argument("manifest: unknown statistic '" + s + "'");
}

SeededStream root_stream(const json& m) { return {m.at("seed").get<std::uint64_t>(), 0}; }

// Independent streams for the parts of one run.
enum StreamSlot : std::uint64_t { kSignalNoise = 0, kTestNoise = 1, kGaf = 2 };

TimeGrid grid_of(const json& m) {
  const auto& g = m.at("grid");
  return TimeGrid::centered(g.at("half_span").get<double>(), g.at("n").get<std::size_t>());
}

DiscreteSignal noise_of(const json& m, const TimeGrid& grid) {
  const auto& n = m.at("noise");
  const auto model = n.at("model").get<std::string>();
  const SeededStream stream = derive(root_stream(m), kSignalNoise);
  if (model == "discrete") return sample_discrete_white_noise(grid, stream);
  if (model == "hermite") return sample_truncated_white_noise(n.at("terms").get<int>(), grid, stream);
  throw std::invalid_argument("manifest: noise.model must be 'discrete' or 'hermite'");
}

// Observed signal: pure noise, a clean template, or snr * template + noise.
DiscreteSignal signal_of(const json& m) {
  const TimeGrid grid = grid_of(m);
  const auto& s = m.at("signal");
  const auto type = s.at("type").get<std::string>();
  if (type == "noise") return noise_of(m, grid);

  DiscreteSignal clean;
  if (type == "sine") {
    clean = gen_sine(s.at("amplitude").get<double>(), s.at("omega").get<double>(), grid);
  } else if (type == "chirp") {
    clean = gen_chirp({s.at("omega1").get<double>(), s.at("omega2").get<double>(), s.at("half_support").get<double>(),
                       Envelope::TukeyBump},
                      grid);
  } else if (type == "wave") {
    clean = gen_wave({s.at("amplitude").get<double>(), s.at("d").get<double>(), s.at("phi").get<double>(),
                      s.at("t0").get<double>()},
                     grid);
  } else if (type == "hermite") {
    const int k = s.at("k").get<int>();
    std::vector<cplx> x(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) x[j] = hermite(k, grid.time(j));
    clean = DiscreteSignal(grid, std::move(x));
  } else {
    throw std::invalid_argument("manifest: unknown signal.type '" + type + "'");
  }

  const auto& snr = m.at("snr");
  if (snr.is_string()) return clean;
  return mix(normalize_energy(clean), noise_of(m, grid), snr.get<double>());
}

WindowNorm norm_of(const json& m) {
  const auto n = m.at("spectrogram").at("norm").get<std::string>();
  if (n == "unit") return WindowNorm::UnitEnergy;
  if (n == "pi-half") return WindowNorm::PiMinusHalf;
  throw std::invalid_argument("manifest: spectrogram.norm must be 'unit' or 'pi-half'");
}

PipelineConfig pipeline_of(const json& m) {
  PipelineConfig p;
  const auto& sp = m.at("spectrogram");
  p.omega_min = sp.at("omega_min").get<double>();
  p.omega_max = sp.at("omega_max").get<double>();
  p.hop = sp.at("hop").get<std::size_t>();
  const auto& z = m.at("zeros");
  const auto th = z.at("threshold").get<std::string>();
  if (th == "none") p.zeros.threshold_mode = ThresholdMode::None;
  else if (th == "relative") p.zeros.threshold_mode = ThresholdMode::Relative;
  else throw std::invalid_argument("manifest: zeros.threshold must be 'none' or 'relative'");
  p.zeros.epsilon = z.at("epsilon").get<double>();
  p.zeros.margin = z.at("margin").get<double>();
  const auto& st = m.at("stats");
  p.f_query_spacing = st.at("f_query_spacing").get<double>();
  p.n_r = st.at("n_r").get<std::size_t>();
  p.validate();
  return p;
}

Spectrogram spectrogram_of(const json& m, const DiscreteSignal& y) {
  const auto p = pipeline_of(m);
  const auto grid = TFGrid::band(y.grid, p.omega_min, p.omega_max, p.hop);
  StftOptions opts;
  opts.norm = norm_of(m);
  opts.workers = m.at("workers").get<unsigned>();
  return spectrogram(stft(y, grid, opts));
}

PointPattern zeros_of(const json& m) {
  return extract_zeros_mgn(spectrogram_of(m, signal_of(m)), pipeline_of(m).zeros);
}

unsigned workers_of(const json& m) {
  const auto w = m.at("workers").get<unsigned>();
  return w == 0 ? default_workers() : w;
}

std::string to_text(const auto& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

fs::path out_dir(const json& m) { return m.at("out").get<std::string>(); }

void cmd_gen(const json& m) {
  const auto y = signal_of(m);
  io::write_text_file(out_dir(m) / "signal.csv", to_text([&](std::ostream& o) { io::write_signal_csv(o, y); }));
}

void cmd_spec(const json& m) {
  const auto spec = spectrogram_of(m, signal_of(m));
  const auto format = m.at("format").get<std::string>();
  if (format == "bin") {
    io::write_text_file(out_dir(m) / "spectrogram.bin",
                        to_text([&](std::ostream& o) { io::write_spectrogram_bin(o, spec); }));
  } else if (format == "csv") {
    io::write_text_file(out_dir(m) / "spectrogram.csv",
                        to_text([&](std::ostream& o) { io::write_spectrogram_csv(o, spec); }));
  } else {
    throw std::invalid_argument("spec: --format must be csv or bin");
  }
}

void cmd_zeros(const json& m) {
  const auto p = zeros_of(m);
  io::write_text_file(out_dir(m) / "zeros.csv", to_text([&](std::ostream& o) { io::write_pattern_csv(o, p); }));
}

void cmd_stats(const json& m) {
  const auto p = zeros_of(m);
  const auto pipeline = pipeline_of(m);
  const auto& st = m.at("stats");
  const auto r = linear_r_grid(0.0, st.at("r_max").get<double>(), pipeline.n_r);
  io::write_text_file(out_dir(m) / "zeros.csv", to_text([&](std::ostream& o) { io::write_pattern_csv(o, p); }));
  for (const auto& name : st.at("summaries")) {
    const auto kind = summary_from(name.get<std::string>());
    const auto curve = summary_curve(p, kind, r, pipeline);
    const std::string stem = std::string("summary_") + to_string(kind);
    io::write_text_file(out_dir(m) / (stem + ".csv"), to_text([&](std::ostream& o) { io::write_curve_csv(o, curve); }));
    if (st.at("svg").get<bool>()) {
      const std::string label = to_string(kind);
      io::write_text_file(out_dir(m) / (stem + ".svg"), to_text([&](std::ostream& o) {
                            io::write_curves_svg(o, std::span(&curve, 1), std::span(&label, 1));
                          }));
    }
  }
}

void cmd_gafzeros(const json& m) {
  const auto& g = m.at("gaf");
  const auto w = g.at("window").get<std::vector<double>>();
  if (w.size() != 4) throw std::invalid_argument("manifest: gaf.window must be [x_min, x_max, y_min, y_max]");
  const Window window{w[0], w[1], w[2], w[3]};
  window.validate();
  const double gamma = g.at("gamma").get<double>();
  if (!(gamma > 0.0)) throw std::invalid_argument("manifest: gaf.gamma must be positive");
  auto n_terms = g.at("n_terms").get<std::size_t>();
  if (n_terms == 0) {
    // Smallest order whose validity disk covers the padded window.
    const double corner = std::max({std::abs(cplx(w[0], w[2])), std::abs(cplx(w[0], w[3])), std::abs(cplx(w[1], w[2])),
                                    std::abs(cplx(w[1], w[3]))}) + 0.2 / std::sqrt(gamma);
    n_terms = static_cast<std::size_t>(std::ceil(gamma * corner * corner / 0.64)) + 16;
  }
  const auto res = gaf_zeros(gamma, window, n_terms, derive(root_stream(m), kGaf));
  io::write_text_file(out_dir(m) / "gaf_zeros.csv",
                      to_text([&](std::ostream& o) { io::write_pattern_csv(o, res.pattern); }));
}

void cmd_theory(const json& m) {
  const auto& t = m.at("theory");
  const double gamma = t.at("gamma").get<double>();
  if (!(gamma > 0.0)) throw std::invalid_argument("manifest: theory.gamma must be positive");
  const auto r = linear_r_grid(t.at("r_min").get<double>(), t.at("r_max").get<double>(), t.at("n_r").get<std::size_t>());
  for (const auto& kind_json : t.at("kinds")) {
    const auto kind = kind_json.get<std::string>();
    SummaryCurve c{r, {}, SummaryKind::Pcf, "theory", "none"};
    if (kind == "pcf") {
      for (double x : r) c.values.push_back(pair_correlation_planar(x, gamma));
    } else if (kind == "hole") {
      for (double x : r) c.values.push_back(hole_probability_asymptote(x));
    } else if (kind == "rho1") {
      c.values.assign(r.size(), first_intensity(gamma));
    } else if (kind == "L") {
      if (gamma != 0.5) throw std::invalid_argument("theory: L is available for gamma = 0.5 only");
      c = theoretical_L(r);
    } else {
      throw std::invalid_argument("manifest: unknown theory kind '" + kind + "'");
    }
    // The kind line records the nearest summary type; the estimator line names the curve.
    c.estimator = "theory-" + kind;
    io::write_text_file(out_dir(m) / ("theory_" + kind + ".csv"),
                        to_text([&](std::ostream& o) { io::write_curve_csv(o, c); }));
  }
}

TestConfig test_config_of(const json& m) {
  const auto& t = m.at("test");
  TestConfig c;
  c.alpha = t.at("alpha").get<double>();
  c.m = t.at("m").get<std::size_t>();
  c.k = t.at("k").get<std::size_t>();
  c.statistic = statistic_from(t.at("statistic").get<std::string>());
  c.summary = summary_from(t.at("summary").get<std::string>());
  c.r_min = t.at("r_min").get<double>();
  c.r_max = t.at("r_max").get<double>();
  const auto ref = t.at("reference").get<std::string>();
  if (ref == "simulated") c.reference = ReferenceMode::Simulated;
  else if (ref == "theory") c.reference = ReferenceMode::Theory;
  else throw std::invalid_argument("manifest: test.reference must be 'simulated' or 'theory'");
  c.noise = m.at("noise").at("model") == "hermite" ? NoiseModel::HermiteTruncated : NoiseModel::Discrete;
  c.hermite_terms = m.at("noise").at("terms").get<int>();
  c.seed = derive(root_stream(m), kTestNoise);
  c.pipeline = pipeline_of(m);
  c.workers = workers_of(m);
  c.validate();
  return c;
}

void cmd_detect(const json& m) {
  const auto cfg = test_config_of(m);
  const auto report = envelope_test(signal_of(m), cfg);
  io::write_text_file(out_dir(m) / "report.json", io::to_json(report).dump(2) + "\n");
}

void cmd_power(const json& m) {
  const auto& p = m.at("power");
  const auto tc = test_config_of(m);
  PowerConfig c;
  c.snr_list = p.at("snr_list").get<std::vector<double>>();
  c.support_fractions = p.at("support_fractions").get<std::vector<double>>();
  c.r_max_list = p.at("r_max_list").get<std::vector<double>>();
  c.summaries.clear();
  for (const auto& s : p.at("summaries")) c.summaries.push_back(summary_from(s.get<std::string>()));
  c.statistic = statistic_from(p.at("statistic").get<std::string>());
  c.n_repeats = p.at("n_repeats").get<std::size_t>();
  c.ci_level = p.at("ci_level").get<double>();
  c.n_samples = m.at("grid").at("n").get<std::size_t>();
  c.half_span = m.at("grid").at("half_span").get<double>();
  c.omega1 = m.at("signal").at("omega1").get<double>();
  c.omega2 = m.at("signal").at("omega2").get<double>();
  c.alpha = tc.alpha;
  c.m = tc.m;
  c.k = tc.k;
  c.pipeline = tc.pipeline;
  c.seed = derive(root_stream(m), kTestNoise);
  c.workers = tc.workers;
  const auto cells = power_experiment(c, out_dir(m) / "power_cells");

  json arr = json::array();
  for (const auto& cell : cells) arr.push_back(io::to_json(cell));
  io::write_text_file(out_dir(m) / "power.json", arr.dump(2) + "\n");
  io::write_text_file(out_dir(m) / "power.csv", to_text([&](std::ostream& o) { io::write_power_csv(o, cells); }));
}

}  // namespace

json resolve_manifest(const json& manifest) {
  json resolved = defaults();
  merge_into(resolved, manifest, "");
  const auto format = resolved.at("format").get<std::string>();
  if (format != "csv" && format != "json" && format != "bin")
    throw std::invalid_argument("manifest: format must be csv, json or bin");
  return resolved;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeros of Gaussian spectrograms: simulation, statistics and detection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string manifest_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_flag;
  std::optional<unsigned> workers;
  std::optional<std::string> format;
  app.add_option("--manifest", manifest_path, "JSON experiment manifest")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Root seed (fallback: TFZEROS_SEED)");
  app.add_option("--out", out_flag, "Output directory");
  app.add_option("--workers", workers, "Worker threads (0 = all processors)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "bin"}));

  using Handler = void (*)(const json&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"gen", "Generate a signal or noise realization", cmd_gen},
      {"spec", "Compute a spectrogram", cmd_spec},
      {"zeros", "Extract spectrogram zeros", cmd_zeros},
      {"stats", "Summary curves of the spectrogram zeros", cmd_stats},
      {"gafzeros", "Zeros of one planar GAF sample", cmd_gafzeros},
      {"theory", "Closed-form curves", cmd_theory},
      {"detect", "Monte Carlo envelope test", cmd_detect},
      {"power", "Power experiment grid", cmd_power},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    json manifest = json::object();
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      manifest = json::parse(in, nullptr, false);
      if (manifest.is_discarded()) throw std::invalid_argument("manifest: not valid JSON");
    }
    json resolved = resolve_manifest(manifest);
    if (seed) {
      resolved["seed"] = *seed;
    } else if (!manifest.contains("seed")) {
      if (const char* env = std::getenv("TFZEROS_SEED")) {
        std::size_t used = 0;
        const std::string text(env);
        std::uint64_t v = 0;
        try {
          v = std::stoull(text, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != text.size()) throw std::invalid_argument("TFZEROS_SEED is not an unsigned integer");
        resolved["seed"] = v;
      }
    }
    if (out_flag) resolved["out"] = *out_flag;
    if (workers) resolved["workers"] = *workers;
    if (format) resolved["format"] = *format;

    const auto* sub = app.get_subcommands().front();
    for (const auto& [name, help, fn] : commands) {
      if (name != sub->get_name()) continue;
      fn(resolved);
      io::write_text_file(out_dir(resolved) / "manifest.json", resolved.dump(2) + "\n");
      out << "wrote " << out_dir(resolved).string() << '\n';
      return kOk;
    }
    err << "error: unknown subcommand\n";
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace tfz::cli
