#pragma once

// Experiment configurations and the batch commands behind the CLI. Every
// command is a pure function of its configuration: it returns the tables
// and documents it would write, and write_result() persists them.

#include "fcs/analysis.hpp"
#include "fcs/csv.hpp"
#include "fcs/lemmas.hpp"
#include "fcs/noise.hpp"
#include "fcs/serialize.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fcs {

enum class Command { Aklt, RankScan, Nonhomog, LemmaCheck, Robustness, Reconstruct };

/// Throws FormatError for an unknown command name.
Command parse_command(const std::string& name);
const char* command_name(Command c);

struct ModelSpec {
  enum class Kind { Aklt, Random, Product, Chain };
  Kind kind = Kind::Aklt;
  double theta = 0.0;         // aklt
  int d_a = 0;                // random, product, chain
  int d_b = 0;                // random, chain
  std::uint64_t seed = 0;     // random, chain
  ComplexMatrix state;        // product: single-site density matrix
  int n = 0;                  // chain

  /// Identifier used in the CSV model column (no commas).
  [[nodiscard]] std::string id() const;
};

struct NoiseSpec {
  enum class Mode { GaussianMatrix, ShotGaussian, ShotMultinomial };
  Mode mode = Mode::GaussianMatrix;
  /// omega_dot slices are perturbed at epsilon * epsilon_prime_ratio.
  double epsilon_prime_ratio = 1.0;
  NoiseNorm norm = NoiseNorm::Frobenius;
  /// Interpret the epsilon list as multiples of sigma_m(Omega).
  bool relative_to_sigma_m = false;
  /// Shot counts swept in the shot modes (replaces the epsilon list).
  std::vector<std::int64_t> shots;
};

struct ExperimentConfig {
  Command command = Command::Aklt;
  ModelSpec model;
  int s_left = 1;
  int s_right = 1;
  int l = 2;  // nonhomog windows
  int r = 2;
  /// Empty: fixed rank equal to the numerical rank of the exact Omega.
  std::optional<TruncationMode> truncation;
  NoiseSpec noise;
  std::vector<int> sites;
  std::vector<double> epsilons;
  std::vector<double> xis;
  int trials = 1;
  std::uint64_t seed = 1;
  int workers = 1;
  std::int64_t dense_cap = kDefaultDenseCap;
  int max_block = 2;
  bool record_wall_time = false;
  bool svg = false;
  bool project_psd = false;
  int appendix_b_instances = 1000;
  int appendix_b_max_dim = 30;
  std::filesystem::path marginals;
};

/// Validates a JSON configuration for the given command. Unknown keys, keys
/// that do not apply to the command and out-of-range values raise
/// FormatError. Relative marginal paths resolve against base_dir.
ExperimentConfig parse_config(Command command, const Json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(Command command, const std::filesystem::path& path);

/// Files produced by a command, keyed by file name.
struct ExperimentResult {
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::pair<std::string, Json>> documents;
  std::vector<std::pair<std::string, std::string>> texts;
};

/// Column order of the experiment record; commands append extra columns.
const std::vector<std::string>& record_columns();

ExperimentResult cmd_aklt(const ExperimentConfig& cfg);
ExperimentResult cmd_rank_scan(const ExperimentConfig& cfg);
ExperimentResult cmd_nonhomog(const ExperimentConfig& cfg);
ExperimentResult cmd_lemma_check(const ExperimentConfig& cfg);
ExperimentResult cmd_robustness(const ExperimentConfig& cfg);
ExperimentResult cmd_reconstruct(const ExperimentConfig& cfg);

ExperimentResult run_command(const ExperimentConfig& cfg);

/// Creates out_dir if needed and writes every table and document.
void write_result(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Runs job(i) for i in [0, count) on up to `workers` threads. Results are
/// indexed by i, so the output order never depends on scheduling. The
/// first exception (lowest index) is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

/// Translation-invariant model of a spec (not Chain).
Realization build_model(const ModelSpec& spec);

/// Counts of checker outcomes over a random sweep.
struct CheckTally {
  int holds = 0;
  int violated = 0;
  int precondition_unmet = 0;
  std::vector<LemmaReport> failures;  // violated reports, at most 10 kept

  void add(const LemmaReport& rep);
};

struct AppendixBSweep {
  CheckTally b1, b2, b3, b5;
};

/// Random instances of every perturbation checker with dimensions in
/// [1, max_dim]. Hypotheses of B.3 and B.5 are met by construction
/// (the perturbation is scaled below eps sigma_n or eps sigma_m).
AppendixBSweep appendix_b_sweep(int instances, int max_dim, std::uint64_t seed);

/// One series of (x, y) points for the optional SVG plot.
struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Minimal self-contained SVG scatter with a logarithmic y axis.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series);

}  // namespace fcs
