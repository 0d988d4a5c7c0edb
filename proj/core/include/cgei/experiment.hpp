#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgei/config.hpp"
#include "cgei/metrics.hpp"
#include "cgei/reconstruct.hpp"
#include "cgei/speckle.hpp"
#include "cgei/tv_solver.hpp"

namespace cgei {

/// One entry of the method list, e.g. "cgei:sobel" or "ggi:45".
struct MethodSpec {
  Method method = Method::kSsgi;
  bool sobel = true;  ///< Sobel pair, otherwise a phi-gradient
  int phi = 45;

  /// Display label: GGI-45, SSGI-So, CGEI-So, CGEI-45, CSGI-So, CSGI-45.
  std::string label() const;
  /// Config token, inverse of parse_method.
  std::string token() const;
  friend bool operator==(const MethodSpec&, const MethodSpec&) = default;
};

/// Accepts ggi:<phi>, ssgi, cgei:sobel, cgei:<phi>, csgi:sobel, csgi:<phi>.
MethodSpec parse_method(const std::string& text);

struct ExperimentConfig {
  /// PGM path, or "phantom:<name>" with rows/cols giving the size.
  std::string object = "phantom:shapes";
  int rows = 64;
  int cols = 64;
  std::optional<int> patterns;  ///< exactly one of patterns / ratio
  std::optional<double> ratio;
  Distribution distribution = Distribution::kBernoulli;
  ShiftMode shift_mode = ShiftMode::kPeriodic;
  std::vector<MethodSpec> methods;
  SolverOptions solver;
  std::optional<double> snr_bd_db;  ///< absent: noiseless ("inf")
  std::uint64_t pattern_seed = 1;
  std::uint64_t noise_seed = 1;
  int repetitions = 1;
  std::filesystem::path output_dir;  ///< empty: nothing written
  MaskOptions masks;
  bool write_maps = true;

  void validate() const;
  int pattern_count() const;
  double compression() const;

  static ExperimentConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
};

/// Recognized configuration keys, in documentation order.
const std::vector<std::string>& config_keys();

struct RunRow {
  std::string method;
  int rep = 0;
  int patterns = 0;
  double ratio = 0.0;
  std::optional<double> snr_bd_db;
  double snr = 0.0;  ///< NaN when the run failed
  int solver_iterations = 0;
  double wall_ms = 0.0;
  std::uint64_t pattern_seed = 0;
  std::uint64_t noise_seed = 0;
  std::string status;  ///< "ok", "not_converged", or "error: ..."
};

struct MethodSummary {
  std::string method;
  int successes = 0;
  double median_rank_snr = 0.0;  ///< ceil(R/2)-th smallest SNR; NaN if none
};

struct RunReport {
  std::vector<RunRow> rows;
  std::vector<MethodSummary> summary;

  bool all_failed() const;
  const MethodSummary& summary_for(const std::string& label) const;
};

/// ceil(n/2)-th smallest value (the 5th of 10).
double median_rank(std::vector<double> values);

/// Loads the object named by the config.
Image load_object(const ExperimentConfig& config);

/// Repetition r uses pattern seed pattern_seed + r and noise seed
/// noise_seed + r; within a repetition every method sees the same patterns and
/// the same noisy readings. Writes runs.csv, summary.csv, masks.pgm and edge
/// maps when output_dir is set.
RunReport run_experiment(const ExperimentConfig& config);

enum class SweepAxis { kRatio, kNoise };

struct SweepPoint {
  double value = 0.0;  ///< ratio, or SNR_BD in dB (infinity for noiseless)
  RunReport report;
};

struct SweepReport {
  SweepAxis axis = SweepAxis::kRatio;
  std::vector<SweepPoint> points;
};

/// Runs the whole method list at each axis point with shared seeds. NOISE
/// values accept "inf" for the noiseless sentinel.
SweepReport run_sweep(const ExperimentConfig& config, SweepAxis axis,
                      const std::vector<double>& values);

std::vector<double> parse_axis_values(const std::string& text);

// CSV writers; numeric columns are formatted deterministically.
std::string run_csv_header();
void write_run_csv(std::ostream& out, const ExperimentConfig& config, const RunReport& report);
void write_summary_csv(std::ostream& out, const RunReport& report);
void write_sweep_csv(std::ostream& out, const ExperimentConfig& config, const SweepReport& report);
void write_sweep_summary_csv(std::ostream& out, const SweepReport& report);

std::string format_number(double v);

}  // namespace cgei
