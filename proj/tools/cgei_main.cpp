// cgei: command-line harness for ghost edge imaging simulations.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cgei/config.hpp"
#include "cgei/experiment.hpp"
#include "cgei/forward.hpp"
#include "cgei/metrics.hpp"
#include "cgei/pgm.hpp"
#include "cgei/phantom.hpp"
#include "cgei/reconstruct.hpp"
#include "cgei/speckle.hpp"

namespace fs = std::filesystem;
using namespace cgei;

namespace {

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& c : f)
    if (c == '_') c = '-';
  return "--" + f;
}

// Every config key becomes a flag overriding the config file.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "key = value experiment config");
    for (const auto& key : config_keys()) cmd->add_option(flag_name(key), values[key], key);
  }

  ExperimentConfig resolve() const {
    KeyValues kv;
    if (!config_path.empty()) kv = read_key_values(config_path);
    for (const auto& [key, value] : values) {
      if (value.empty()) continue;
      kv[key] = value;
      // an explicit count or ratio on the command line replaces the other
      if (key == "patterns") kv.erase("ratio");
      if (key == "ratio") kv.erase("patterns");
    }
    return ExperimentConfig::from_key_values(kv);
  }
};

Image load_image_arg(const std::string& spec, int rows, int cols) {
  if (spec.rfind("phantom:", 0) == 0) return make_phantom(spec.substr(8), rows, cols);
  return read_pgm(spec);
}

void print_summary(std::FILE* out, const RunReport& report) {
  for (const auto& s : report.summary)
    std::fprintf(out, "%-10s median-rank SNR %s (%d runs)\n", s.method.c_str(),
                format_number(s.median_rank_snr).c_str(), s.successes);
}

void solver_flags(CLI::App* cmd, SolverOptions& o, std::string& tv, std::string& norm) {
  cmd->add_option("--mu", o.mu, "fidelity weight");
  cmd->add_option("--tv", tv, "anisotropic | isotropic");
  cmd->add_option("--normalization", norm, "spectral | none");
  cmd->add_option("--outer-tol", o.outer_tol);
  cmd->add_option("--inner-tol", o.inner_tol);
  cmd->add_option("--max-outer", o.max_outer);
  cmd->add_option("--max-inner", o.max_inner);
  cmd->add_option("--beta0", o.beta0);
  cmd->add_option("--beta-growth", o.beta_growth);
  cmd->add_option("--beta-max", o.beta_max);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed ghost edge imaging simulator"};
  app.require_subcommand(1);

  // gen-patterns
  auto* gen = app.add_subcommand("gen-patterns", "generate a speckle pattern stack");
  int gen_rows = 64, gen_cols = 64;
  std::optional<int> gen_count;
  std::optional<double> gen_ratio;
  std::uint64_t gen_seed = 1;
  std::string gen_dist = "bernoulli", gen_mode = "periodic", gen_out;
  gen->add_option("--rows", gen_rows);
  gen->add_option("--cols", gen_cols);
  auto* gen_count_opt = gen->add_option("--patterns", gen_count, "pattern count M");
  gen->add_option("--ratio", gen_ratio, "compression ratio M/(m n)")->excludes(gen_count_opt);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--distribution", gen_dist, "bernoulli | uniform");
  gen->add_option("--shift-mode", gen_mode, "periodic | master_crop");
  gen->add_option("-o,--out", gen_out, "output pattern stack")->required();

  // acquire
  auto* acq = app.add_subcommand("acquire", "simulate bucket detection");
  std::string acq_patterns, acq_object, acq_channels = "sobel", acq_out = ".";
  std::optional<double> acq_snr;
  std::uint64_t acq_noise_seed = 1;
  bool acq_csv = false;
  acq->add_option("-p,--patterns", acq_patterns, "pattern stack file")->required();
  acq->add_option("--object", acq_object, "PGM path or phantom:<name>")->required();
  acq->add_option("--channels", acq_channels, "sobel | gradient:<phi> | raw");
  acq->add_option("--snr-bd-db", acq_snr, "detector SNR in dB (omit for noiseless)");
  acq->add_option("--noise-seed", acq_noise_seed);
  acq->add_option("-o,--out-dir", acq_out);
  acq->add_flag("--csv", acq_csv, "also write CSV copies");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "recover an edge map from bucket channels");
  std::string rec_patterns, rec_method = "cs", rec_out = "edge.pgm", rec_diag, rec_truth;
  std::vector<std::string> rec_buckets;
  SolverOptions rec_solver;
  std::string rec_tv = "anisotropic", rec_norm = "spectral";
  MaskOptions rec_masks;
  rec->add_option("-p,--patterns", rec_patterns, "pattern stack file")->required();
  rec->add_option("-b,--buckets", rec_buckets, "bucket files (diff_h + diff_v, diff_phi, or raw)")
      ->required();
  rec->add_option("--method", rec_method, "correlation | cs | csgi-sobel | csgi-<phi>");
  rec->add_option("-o,--out", rec_out, "normalized edge map PGM");
  rec->add_option("--diag", rec_diag, "diagnostics CSV");
  rec->add_option("--ground-truth", rec_truth, "object for SNR scoring");
  rec->add_option("--mask-threshold", rec_masks.threshold_fraction);
  rec->add_option("--mask-dilation", rec_masks.dilation);
  solver_flags(rec, rec_solver, rec_tv, rec_norm);

  // run / sweep
  auto* run = app.add_subcommand("run", "run a configured experiment");
  ConfigFlags run_flags;
  run_flags.attach(run);

  auto* sweep = app.add_subcommand("sweep", "sweep compression ratio or detector noise");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep);
  std::string sweep_axis = "ratio", sweep_values;
  sweep->add_option("--axis", sweep_axis, "ratio | noise")->check(CLI::IsMember({"ratio", "noise"}));
  sweep->add_option("--values", sweep_values, "comma list; noise accepts inf")->required();

  // metrics
  auto* met = app.add_subcommand("metrics", "score an edge map or compute a compression ratio");
  std::string met_edge, met_truth, met_masks_out;
  MaskOptions met_masks;
  std::optional<long long> met_m;
  int met_rows = 0, met_cols = 0, met_l = 1;
  met->add_option("--edge", met_edge, "edge map PGM");
  met->add_option("--ground-truth", met_truth, "object PGM or phantom:<name>");
  met->add_option("--mask-threshold", met_masks.threshold_fraction);
  met->add_option("--mask-dilation", met_masks.dilation);
  met->add_option("--masks-out", met_masks_out, "write masks as PGM");
  met->add_option("--patterns", met_m, "pattern count for the compression ratio");
  met->add_option("--rows", met_rows);
  met->add_option("--cols", met_cols);
  met->add_option("--readings-per-pattern", met_l, "l: 2 for gradient, 8 for Sobel");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const int count = gen_count ? *gen_count
                                  : patterns_for_ratio(gen_ratio.value_or(0.4), gen_rows, gen_cols);
      const PatternStack stack = generate_patterns(gen_rows, gen_cols, count, gen_seed,
                                                   parse_distribution(gen_dist),
                                                   parse_shift_mode(gen_mode));
      write_patterns(gen_out, stack);
      std::printf("wrote %d patterns of %dx%d to %s\n", count, gen_rows, gen_cols, gen_out.c_str());
      return 0;
    }

    if (*acq) {
      const PatternStack stack = read_patterns(acq_patterns);
      const Image object = load_image_arg(acq_object, stack.rows(), stack.cols());
      fs::create_directories(acq_out);
      auto noise_for = [&](Offset o) {
        return NoiseSpec{acq_snr, group_noise_seed(acq_noise_seed, o)};
      };
      auto emit = [&](const BucketVector& v, const std::string& name) {
        write_buckets(fs::path(acq_out) / (name + ".bkt"), v);
        if (acq_csv) write_buckets_csv(fs::path(acq_out) / (name + ".csv"), v);
        std::printf("%s: %zu readings\n", name.c_str(), v.size());
      };
      if (acq_channels == "raw") {
        emit(acquire(stack, object, noise_for({0, 0})), "raw");
      } else if (acq_channels == "sobel") {
        std::vector<BucketVector> raw;
        for (int l = 1; l <= 8; ++l) {
          const Offset o = group_shift(l);
          raw.push_back(acquire(shifted_group(stack, o), object, noise_for(o)));
        }
        const SobelBuckets s = combine_sobel(raw);
        emit(s.horizontal, "diff_h");
        emit(s.vertical, "diff_v");
      } else if (acq_channels.rfind("gradient:", 0) == 0) {
        const int phi = static_cast<int>(parse_integer("phi", acq_channels.substr(9)));
        const BucketVector raw0 = acquire(stack, object, noise_for({0, 0}));
        const Offset d = gradient_group_shift(phi);
        const BucketVector shifted = acquire(shifted_group(stack, d), object, noise_for(d));
        emit(combine_gradient(raw0, shifted, phi), "diff_phi" + std::to_string(phi));
      } else {
        throw Error("unknown channel set: " + acq_channels);
      }
      return 0;
    }

    if (*rec) {
      rec_solver.tv = parse_tv_flavor(rec_tv);
      rec_solver.normalization = parse_normalization(rec_norm);
      const PatternStack stack = read_patterns(rec_patterns);
      std::vector<BucketVector> buckets;
      for (const auto& p : rec_buckets) buckets.push_back(read_buckets(p));

      ReconstructionResult result;
      if (rec_method.rfind("csgi-", 0) == 0) {
        if (buckets.size() != 1) throw Error("csgi needs exactly one raw bucket file");
        const std::string op = rec_method.substr(5);
        const EdgeOperator edge_op =
            op == "sobel" ? EdgeOperator::sobel()
                          : EdgeOperator::gradient(static_cast<int>(parse_integer("phi", op)));
        result = csgi_edge(assemble_matrix(stack), buckets[0], edge_op, rec_solver);
      } else {
        std::optional<ChannelSet> set;
        if (buckets.size() == 1) set.emplace(buckets[0]);
        else if (buckets.size() == 2) set.emplace(buckets[0], buckets[1]);
        else throw Error("expected one or two channel files");
        if (rec_method == "correlation") result = edge_by_correlation(*set, stack);
        else if (rec_method == "cs") result = edge_by_cs(assemble_matrix(stack), *set, rec_solver);
        else throw Error("unknown method: " + rec_method);
      }
      write_pgm(rec_out, normalize_map(result.edge));

      std::optional<double> snr;
      if (!rec_truth.empty()) {
        const Image truth = load_image_arg(rec_truth, stack.rows(), stack.cols());
        snr = edge_snr(result.edge, make_masks(truth, rec_masks));
      }
      const double ratio = compression_ratio(stack.count(), stack.rows(), stack.cols()).value();
      if (!rec_diag.empty()) {
        std::ofstream diag(rec_diag);
        diag << "method,M,ratio,snr,iterations,converged\n";
        diag << to_string(result.method) << ',' << stack.count() << ',' << format_number(ratio)
             << ',' << (snr ? format_number(*snr) : "nan") << ',' << result.solver_iterations()
             << ',' << (result.flagged ? "false" : "true") << '\n';
      }
      std::printf("%s edge map written to %s", to_string(result.method).c_str(), rec_out.c_str());
      if (snr) std::printf(", SNR %s", format_number(*snr).c_str());
      std::printf("\n");
      return result.flagged ? 3 : 0;
    }

    if (*run) {
      const ExperimentConfig config = run_flags.resolve();
      const RunReport report = run_experiment(config);
      const bool to_stdout = config.output_dir.empty();
      if (to_stdout) write_run_csv(std::cout, config, report);
      std::cout.flush();
      print_summary(to_stdout ? stderr : stdout, report);
      return report.all_failed() ? 1 : 0;
    }

    if (*sweep) {
      const ExperimentConfig config = sweep_flags.resolve();
      const SweepAxis axis = sweep_axis == "ratio" ? SweepAxis::kRatio : SweepAxis::kNoise;
      const SweepReport report = run_sweep(config, axis, parse_axis_values(sweep_values));
      if (config.output_dir.empty()) write_sweep_csv(std::cout, config, report);
      write_sweep_summary_csv(std::cerr, report);
      bool any_ok = false;
      for (const auto& p : report.points) any_ok = any_ok || !p.report.all_failed();
      return any_ok ? 0 : 1;
    }

    if (*met) {
      bool did_something = false;
      if (met_m) {
        if (met_rows <= 0 || met_cols <= 0) throw Error("--rows and --cols are required");
        const CompressionRatio cr = compression_ratio(*met_m, met_rows, met_cols, met_l);
        std::printf("compression_ratio=%s detector_readings=%lld\n",
                    format_number(cr.value()).c_str(),
                    static_cast<long long>(cr.detector_readings()));
        did_something = true;
      }
      if (!met_truth.empty()) {
        std::optional<Image> edge;
        if (!met_edge.empty()) edge = read_pgm(met_edge);
        const int r = edge ? edge->rows() : met_rows;
        const int c = edge ? edge->cols() : met_cols;
        const Image truth = load_image_arg(met_truth, r, c);
        const RegionMasks masks = make_masks(truth, met_masks);
        if (!met_masks_out.empty()) write_pgm(met_masks_out, mask_image(masks));
        if (edge) std::printf("snr=%s\n", format_number(edge_snr(*edge, masks)).c_str());
        did_something = true;
      }
      if (!did_something) throw Error("nothing to compute: pass --patterns or --ground-truth");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
