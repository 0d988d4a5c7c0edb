#include "cgei/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>

#include "cgei/forward.hpp"
#include "cgei/pgm.hpp"
#include "cgei/phantom.hpp"

namespace cgei {

namespace {

constexpr std::string_view kPhantomPrefix = "phantom:";

std::string format_snr_bd(const std::optional<double>& snr) {
  return snr ? format_number(*snr) : "inf";
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    body(out);
    if (!out) throw Error("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// Readings of one repetition, acquired lazily per shift group.
class Acquisition {
 public:
  Acquisition(const PatternStack& stack, const Image& object, const ExperimentConfig& config,
              std::uint64_t noise_seed)
      : stack_(stack), object_(object), config_(config), noise_seed_(noise_seed) {}

  const BucketVector& group(Offset o) {
    const auto key = std::make_pair(o.dx, o.dy);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    NoiseSpec noise{config_.snr_bd_db, group_noise_seed(noise_seed_, o)};
    auto [pos, _] = cache_.emplace(key, acquire(shifted_group(stack_, o), object_, noise));
    return pos->second;
  }

  ChannelSet sobel_channels() {
    std::vector<BucketVector> raw;
    for (int l = 1; l <= 8; ++l) raw.push_back(group(group_shift(l)));
    SobelBuckets s = combine_sobel(raw);
    return ChannelSet(std::move(s.horizontal), std::move(s.vertical));
  }

  ChannelSet gradient_channel(int phi) {
    return ChannelSet(combine_gradient(group({0, 0}), group(gradient_group_shift(phi)), phi));
  }

 private:
  const PatternStack& stack_;
  const Image& object_;
  const ExperimentConfig& config_;
  std::uint64_t noise_seed_;
  std::map<std::pair<int, int>, BucketVector> cache_;
};

ReconstructionResult reconstruct_one(const MethodSpec& spec, Acquisition& acq,
                                     const PatternStack& stack, const MeasurementMatrix& a,
                                     const SolverOptions& solver) {
  switch (spec.method) {
    case Method::kGgi:
      return edge_by_correlation(acq.gradient_channel(spec.phi), stack);
    case Method::kSsgi:
      return edge_by_correlation(acq.sobel_channels(), stack);
    case Method::kCgei:
      return edge_by_cs(a, spec.sobel ? acq.sobel_channels() : acq.gradient_channel(spec.phi),
                        solver);
    case Method::kCsgi:
      return csgi_edge(a, acq.group({0, 0}),
                       spec.sobel ? EdgeOperator::sobel() : EdgeOperator::gradient(spec.phi),
                       solver);
  }
  throw Error("unknown method");
}

bool needs_matrix(const std::vector<MethodSpec>& methods) {
  return std::any_of(methods.begin(), methods.end(), [](const MethodSpec& m) {
    return m.method == Method::kCgei || m.method == Method::kCsgi;
  });
}

}  // namespace

std::string MethodSpec::label() const {
  return to_string(method) + "-" + (sobel ? std::string("So") : std::to_string(phi));
}

std::string MethodSpec::token() const {
  std::string name = to_string(method);
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (method == Method::kSsgi) return name;
  return name + ":" + (sobel ? std::string("sobel") : std::to_string(phi));
}

MethodSpec parse_method(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto parse_phi = [&](const std::string& s) {
    const int phi = static_cast<int>(parse_integer("method angle", s));
    gradient_offset(phi);  // validates
    return phi;
  };
  if (name == "ssgi") {
    if (!arg.empty() && arg != "sobel") throw Error("ssgi takes no angle: " + text);
    return {Method::kSsgi, true, 0};
  }
  if (name == "ggi") {
    if (arg.empty() || arg == "sobel") throw Error("ggi needs an angle, e.g. ggi:45");
    return {Method::kGgi, false, parse_phi(arg)};
  }
  if (name == "cgei" || name == "csgi") {
    const Method m = name == "cgei" ? Method::kCgei : Method::kCsgi;
    if (arg.empty() || arg == "sobel") return {m, true, 0};
    return {m, false, parse_phi(arg)};
  }
  throw Error("unknown method: " + text);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "object",         "rows",           "cols",        "patterns",     "ratio",
      "distribution",   "shift_mode",     "methods",     "mu",           "tv",
      "normalization",  "outer_tol",      "inner_tol",   "max_outer",    "max_inner",
      "beta0",          "beta_growth",    "beta_max",    "snr_bd_db",    "pattern_seed",
      "noise_seed",     "repetitions",    "output_dir",  "mask_threshold", "mask_dilation",
      "write_maps",
  };
  return keys;
}

void ExperimentConfig::validate() const {
  if (patterns.has_value() == ratio.has_value())
    throw Error("exactly one of patterns / ratio must be given");
  if (patterns && *patterns < 1) throw Error("patterns must be positive");
  if (ratio && !(*ratio > 0.0)) throw Error("ratio must be positive");
  if (rows < 3 || cols < 3) throw Error("object must be at least 3x3");
  if (methods.empty()) throw Error("method list is empty");
  if (repetitions < 1) throw Error("repetitions must be at least 1");
  if (snr_bd_db && !std::isfinite(*snr_bd_db)) throw Error("snr_bd_db must be finite or inf");
  solver.validate();
}

int ExperimentConfig::pattern_count() const {
  return patterns ? *patterns : patterns_for_ratio(*ratio, rows, cols);
}

double ExperimentConfig::compression() const {
  return compression_ratio(pattern_count(), rows, cols).value();
}

ExperimentConfig ExperimentConfig::from_key_values(const KeyValues& kv) {
  ExperimentConfig c;
  c.methods.clear();
  const auto& known = config_keys();
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error("unknown config key: " + key);
  }
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto get_int = [&](const std::string& key, auto& target) {
    if (auto v = get(key)) target = static_cast<std::decay_t<decltype(target)>>(parse_integer(key, *v));
  };
  auto get_double = [&](const std::string& key, double& target) {
    if (auto v = get(key)) target = parse_double(key, *v);
  };

  if (auto v = get("object")) c.object = *v;
  get_int("rows", c.rows);
  get_int("cols", c.cols);
  if (auto v = get("patterns")) c.patterns = static_cast<int>(parse_integer("patterns", *v));
  if (auto v = get("ratio")) c.ratio = parse_double("ratio", *v);
  if (auto v = get("distribution")) c.distribution = parse_distribution(*v);
  if (auto v = get("shift_mode")) c.shift_mode = parse_shift_mode(*v);
  if (auto v = get("methods"))
    for (const auto& item : split_list(*v)) c.methods.push_back(parse_method(item));
  get_double("mu", c.solver.mu);
  if (auto v = get("tv")) c.solver.tv = parse_tv_flavor(*v);
  if (auto v = get("normalization")) c.solver.normalization = parse_normalization(*v);
  get_double("outer_tol", c.solver.outer_tol);
  get_double("inner_tol", c.solver.inner_tol);
  get_int("max_outer", c.solver.max_outer);
  get_int("max_inner", c.solver.max_inner);
  get_double("beta0", c.solver.beta0);
  get_double("beta_growth", c.solver.beta_growth);
  get_double("beta_max", c.solver.beta_max);
  if (auto v = get("snr_bd_db")) {
    if (*v == "inf" || v->empty()) c.snr_bd_db.reset();
    else c.snr_bd_db = parse_double("snr_bd_db", *v);
  }
  get_int("pattern_seed", c.pattern_seed);
  get_int("noise_seed", c.noise_seed);
  get_int("repetitions", c.repetitions);
  if (auto v = get("output_dir")) c.output_dir = *v;
  get_double("mask_threshold", c.masks.threshold_fraction);
  get_int("mask_dilation", c.masks.dilation);
  if (auto v = get("write_maps")) c.write_maps = parse_bool("write_maps", *v);

  // A PGM object fixes the geometry.
  if (c.object.rfind(kPhantomPrefix, 0) != 0 && !c.object.empty()) {
    if (!get("rows") && !get("cols") && std::filesystem::exists(c.object)) {
      const Image img = read_pgm(c.object);
      c.rows = img.rows();
      c.cols = img.cols();
    }
  }
  c.validate();
  return c;
}

KeyValues ExperimentConfig::to_key_values() const {
  KeyValues kv;
  kv["object"] = object;
  kv["rows"] = std::to_string(rows);
  kv["cols"] = std::to_string(cols);
  if (patterns) kv["patterns"] = std::to_string(*patterns);
  if (ratio) kv["ratio"] = format_number(*ratio);
  kv["distribution"] = to_string(distribution);
  kv["shift_mode"] = to_string(shift_mode);
  std::string m;
  for (const auto& spec : methods) m += (m.empty() ? "" : ",") + spec.token();
  kv["methods"] = m;
  kv["mu"] = format_number(solver.mu);
  kv["tv"] = to_string(solver.tv);
  kv["normalization"] = to_string(solver.normalization);
  kv["outer_tol"] = format_number(solver.outer_tol);
  kv["inner_tol"] = format_number(solver.inner_tol);
  kv["max_outer"] = std::to_string(solver.max_outer);
  kv["max_inner"] = std::to_string(solver.max_inner);
  kv["beta0"] = format_number(solver.beta0);
  kv["beta_growth"] = format_number(solver.beta_growth);
  kv["beta_max"] = format_number(solver.beta_max);
  kv["snr_bd_db"] = format_snr_bd(snr_bd_db);
  kv["pattern_seed"] = std::to_string(pattern_seed);
  kv["noise_seed"] = std::to_string(noise_seed);
  kv["repetitions"] = std::to_string(repetitions);
  kv["output_dir"] = output_dir.string();
  kv["mask_threshold"] = format_number(masks.threshold_fraction);
  kv["mask_dilation"] = std::to_string(masks.dilation);
  kv["write_maps"] = write_maps ? "true" : "false";
  return kv;
}

bool RunReport::all_failed() const {
  return std::none_of(rows.begin(), rows.end(),
                      [](const RunRow& r) { return r.status.rfind("error", 0) != 0; });
}

const MethodSummary& RunReport::summary_for(const std::string& label) const {
  for (const auto& s : summary)
    if (s.method == label) return s;
  throw Error("no summary for method " + label);
}

double median_rank(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  return values[(values.size() + 1) / 2 - 1];
}

Image load_object(const ExperimentConfig& config) {
  if (config.object.rfind(kPhantomPrefix, 0) == 0)
    return make_phantom(config.object.substr(kPhantomPrefix.size()), config.rows, config.cols);
  Image img = read_pgm(config.object);
  if (img.rows() != config.rows || img.cols() != config.cols)
    throw Error("object size " + std::to_string(img.rows()) + "x" + std::to_string(img.cols()) +
                " does not match rows/cols");
  return img;
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Image object = load_object(config);
  const RegionMasks masks = make_masks(object, config.masks);
  const int m = config.pattern_count();
  const double ratio = config.compression();

  const bool write = !config.output_dir.empty();
  if (write) {
    std::filesystem::create_directories(config.output_dir);
    if (config.write_maps) std::filesystem::create_directories(config.output_dir / "maps");
    write_pgm(config.output_dir / "masks.pgm", mask_image(masks));
  }

  RunReport report;
  std::map<std::string, std::vector<double>> per_method;
  for (int rep = 0; rep < config.repetitions; ++rep) {
    const std::uint64_t pattern_seed = config.pattern_seed + static_cast<std::uint64_t>(rep);
    const std::uint64_t noise_seed = config.noise_seed + static_cast<std::uint64_t>(rep);
    const PatternStack stack =
        generate_patterns(config.rows, config.cols, m, pattern_seed, config.distribution,
                          config.shift_mode);
    std::optional<MeasurementMatrix> matrix;
    if (needs_matrix(config.methods)) matrix = assemble_matrix(stack);
    Acquisition acq(stack, object, config, noise_seed);

    for (const auto& spec : config.methods) {
      RunRow row;
      row.method = spec.label();
      row.rep = rep;
      row.patterns = m;
      row.ratio = ratio;
      row.snr_bd_db = config.snr_bd_db;
      row.pattern_seed = pattern_seed;
      row.noise_seed = noise_seed;
      row.snr = std::numeric_limits<double>::quiet_NaN();
      const auto start = std::chrono::steady_clock::now();
      try {
        const ReconstructionResult result = reconstruct_one(
            spec, acq, stack, matrix ? *matrix : MeasurementMatrix{}, config.solver);
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        row.solver_iterations = result.solver_iterations();
        row.snr = edge_snr(result.edge, masks);
        row.status = result.flagged ? "not_converged" : "ok";
        per_method[row.method].push_back(row.snr);
        if (write && config.write_maps) {
          const auto path = config.output_dir / "maps" /
                            (row.method + "_rep" + std::to_string(rep) + ".pgm");
          write_file_atomically(path, [&](std::ostream& out) {
            write_pgm(out, normalize_map(result.edge));
          });
        }
      } catch (const std::exception& e) {
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        row.status = std::string("error: ") + e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (const auto& spec : config.methods) {
    const std::string label = spec.label();
    if (std::any_of(report.summary.begin(), report.summary.end(),
                    [&](const MethodSummary& s) { return s.method == label; }))
      continue;
    const auto& snrs = per_method[label];
    report.summary.push_back({label, static_cast<int>(snrs.size()), median_rank(snrs)});
  }

  if (write) {
    write_file_atomically(config.output_dir / "runs.csv",
                          [&](std::ostream& out) { write_run_csv(out, config, report); });
    write_file_atomically(config.output_dir / "summary.csv",
                          [&](std::ostream& out) { write_summary_csv(out, report); });
  }
  return report;
}

std::vector<double> parse_axis_values(const std::string& text) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) {
    if (item == "inf") values.push_back(std::numeric_limits<double>::infinity());
    else values.push_back(parse_double("axis value", item));
  }
  if (values.empty()) throw Error("sweep axis needs at least one value");
  return values;
}

SweepReport run_sweep(const ExperimentConfig& config, SweepAxis axis,
                      const std::vector<double>& values) {
  if (values.empty()) throw Error("sweep axis needs at least one value");
  SweepReport sweep;
  sweep.axis = axis;
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig point = config;
    if (axis == SweepAxis::kRatio) {
      point.patterns.reset();
      point.ratio = values[i];
    } else if (std::isinf(values[i])) {
      point.snr_bd_db.reset();
    } else {
      point.snr_bd_db = values[i];
    }
    if (!config.output_dir.empty())
      point.output_dir = config.output_dir / ("point" + std::to_string(i));
    sweep.points.push_back({values[i], run_experiment(point)});
  }
  if (!config.output_dir.empty()) {
    write_file_atomically(config.output_dir / "sweep.csv",
                          [&](std::ostream& out) { write_sweep_csv(out, config, sweep); });
    write_file_atomically(config.output_dir / "sweep_summary.csv",
                          [&](std::ostream& out) { write_sweep_summary_csv(out, sweep); });
  }
  return sweep;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string run_csv_header() {
  return "method,rep,M,ratio,snr_bd_db,snr,solver_iters,wall_ms,seed,noise_seed,status,"
         "object,rows,cols,distribution,shift_mode,mu,tv,normalization,outer_tol,inner_tol,"
         "max_outer,max_inner,beta0,beta_growth,beta_max,mask_threshold,mask_dilation";
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_row(std::ostream& out, const ExperimentConfig& c, const RunRow& r) {
  const auto& s = c.solver;
  out << csv_escape(r.method) << ',' << r.rep << ',' << r.patterns << ',' << format_number(r.ratio)
      << ',' << format_snr_bd(r.snr_bd_db) << ',' << format_number(r.snr) << ','
      << r.solver_iterations << ',' << format_number(r.wall_ms) << ',' << r.pattern_seed << ','
      << r.noise_seed << ',' << csv_escape(r.status) << ',' << csv_escape(c.object) << ','
      << c.rows << ',' << c.cols << ',' << to_string(c.distribution) << ','
      << to_string(c.shift_mode) << ',' << format_number(s.mu) << ',' << to_string(s.tv) << ','
      << to_string(s.normalization) << ',' << format_number(s.outer_tol) << ','
      << format_number(s.inner_tol) << ',' << s.max_outer << ',' << s.max_inner << ','
      << format_number(s.beta0) << ',' << format_number(s.beta_growth) << ','
      << format_number(s.beta_max) << ',' << format_number(c.masks.threshold_fraction) << ','
      << c.masks.dilation << '\n';
}

}  // namespace

void write_run_csv(std::ostream& out, const ExperimentConfig& config, const RunReport& report) {
  out << run_csv_header() << '\n';
  for (const auto& r : report.rows) write_row(out, config, r);
}

void write_summary_csv(std::ostream& out, const RunReport& report) {
  out << "method,successes,median_rank_snr\n";
  for (const auto& s : report.summary)
    out << csv_escape(s.method) << ',' << s.successes << ',' << format_number(s.median_rank_snr)
        << '\n';
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config, const SweepReport& report) {
  const char* axis = report.axis == SweepAxis::kRatio ? "ratio" : "snr_bd_db";
  out << "axis,axis_value," << run_csv_header() << '\n';
  for (const auto& p : report.points) {
    ExperimentConfig point = config;
    if (report.axis == SweepAxis::kRatio) {
      point.patterns.reset();
      point.ratio = p.value;
    }
    for (const auto& r : p.report.rows) {
      out << axis << ',' << format_number(p.value) << ',';
      write_row(out, point, r);
    }
  }
}

void write_sweep_summary_csv(std::ostream& out, const SweepReport& report) {
  const char* axis = report.axis == SweepAxis::kRatio ? "ratio" : "snr_bd_db";
  out << "axis,axis_value,method,successes,median_rank_snr\n";
  for (const auto& p : report.points)
    for (const auto& s : p.report.summary)
      out << axis << ',' << format_number(p.value) << ',' << csv_escape(s.method) << ','
          << s.successes << ',' << format_number(s.median_rank_snr) << '\n';
}

}  // namespace cgei
