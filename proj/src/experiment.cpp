#include "fcs/experiment.hpp"

#include "fcs/error.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <thread>

namespace fcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- parsing

int get_int(const Json& j, const char* key, int fallback, int lo, int hi, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_integer()) throw FormatError(fmt::format("{}: '{}' must be an integer", where, key));
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) throw FormatError(fmt::format("{}: '{}' = {} outside [{}, {}]", where, key, x, lo, hi));
  return static_cast<int>(x);
}

std::uint64_t get_seed(const Json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw FormatError(fmt::format("{}: '{}' must be a non-negative integer", where, key));
  }
  return v.get<std::uint64_t>();
}

double get_double(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number()) throw FormatError(fmt::format("{}: '{}' must be a number", where, key));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError(fmt::format("{}: '{}' must be finite", where, key));
  return x;
}

bool get_bool(const Json& j, const char* key, bool fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw FormatError(fmt::format("{}: '{}' must be true or false", where, key));
  return j[key].get<bool>();
}

template <typename T>
std::vector<T> get_list(const Json& j, const char* key, std::vector<T> fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_array() || v.empty()) throw FormatError(fmt::format("{}: '{}' must be a non-empty array", where, key));
  std::vector<T> out;
  for (const auto& x : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) throw FormatError(fmt::format("{}: '{}' must hold integers", where, key));
    } else {
      if (!x.is_number()) throw FormatError(fmt::format("{}: '{}' must hold numbers", where, key));
    }
    out.push_back(x.get<T>());
  }
  return out;
}

ModelSpec parse_model(const Json& j) {
  const std::string where = "config.model";
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw FormatError(fmt::format("{}: expected an object with a string 'type'", where));
  }
  const std::string type = j["type"].get<std::string>();
  ModelSpec m;
  if (type == "aklt") {
    require_keys(j, {"type", "theta"}, where);
    m.kind = ModelSpec::Kind::Aklt;
    m.theta = get_double(j, "theta", aklt_theta(), where);
    if (!(m.theta >= 0.0 && m.theta < std::numbers::pi)) throw FormatError(fmt::format("{}: theta outside [0, pi)", where));
  } else if (type == "random") {
    require_keys(j, {"type", "d_a", "d_b", "seed"}, where);
    m.kind = ModelSpec::Kind::Random;
    m.d_a = get_int(j, "d_a", 2, 2, 9, where);
    m.d_b = get_int(j, "d_b", 2, 1, 9, where);
    m.seed = get_seed(j, "seed", 1, where);
  } else if (type == "product") {
    require_keys(j, {"type", "state"}, where);
    m.kind = ModelSpec::Kind::Product;
    if (!j.contains("state")) throw FormatError(fmt::format("{}: product model needs 'state'", where));
    const Json& s = j["state"];
    m.state = s.is_array() ? ComplexMatrix(real_matrix_from_json(s, "config.model.state").cast<linalg::Complex>())
                           : complex_matrix_from_json(s, "config.model.state");
    if (m.state.rows() < 2 || m.state.rows() != m.state.cols()) {
      throw FormatError(fmt::format("{}: state must be a square matrix of size >= 2", where));
    }
    m.d_a = static_cast<int>(m.state.rows());
  } else if (type == "chain") {
    require_keys(j, {"type", "n", "d_a", "d_b", "seed"}, where);
    m.kind = ModelSpec::Kind::Chain;
    m.n = get_int(j, "n", 5, 2, 12, where);
    m.d_a = get_int(j, "d_a", 2, 2, 9, where);
    m.d_b = get_int(j, "d_b", 2, 1, 9, where);
    m.seed = get_seed(j, "seed", 1, where);
  } else {
    throw FormatError(fmt::format("{}: unknown model type '{}'", where, type));
  }
  return m;
}

TruncationMode parse_truncation(const Json& j) {
  const std::string where = "config.truncation";
  require_keys(j, {"rank", "threshold"}, where);
  if (j.contains("rank") == j.contains("threshold")) {
    throw FormatError(fmt::format("{}: give exactly one of 'rank' and 'threshold'", where));
  }
  if (j.contains("rank")) return TruncationMode::fixed_rank(get_int(j, "rank", 1, 1, 1 << 20, where));
  const double eta = get_double(j, "threshold", 0.0, where);
  if (!(eta > 0.0)) throw FormatError(fmt::format("{}: threshold must be positive", where));
  return TruncationMode::at_threshold(eta);
}

NoiseSpec parse_noise(const Json& j, bool allow_shots) {
  const std::string where = "config.noise";
  require_keys(j, {"mode", "epsilon_prime_ratio", "norm", "relative_to_sigma_m", "shots"}, where);
  NoiseSpec n;
  const std::string mode = j.contains("mode") && j["mode"].is_string() ? j["mode"].get<std::string>() : "gaussian_matrix";
  if (mode == "gaussian_matrix") {
    n.mode = NoiseSpec::Mode::GaussianMatrix;
  } else if (mode == "shot_gaussian") {
    n.mode = NoiseSpec::Mode::ShotGaussian;
  } else if (mode == "shot_multinomial") {
    n.mode = NoiseSpec::Mode::ShotMultinomial;
  } else {
    throw FormatError(fmt::format("{}: unknown mode '{}'", where, mode));
  }
  const bool shot_mode = n.mode != NoiseSpec::Mode::GaussianMatrix;
  if (shot_mode && !allow_shots) throw FormatError(fmt::format("{}: shot noise is not available for this command", where));
  n.epsilon_prime_ratio = get_double(j, "epsilon_prime_ratio", 1.0, where);
  if (n.epsilon_prime_ratio < 0.0) throw FormatError(fmt::format("{}: epsilon_prime_ratio must be >= 0", where));
  if (j.contains("norm")) {
    const std::string norm = j["norm"].is_string() ? j["norm"].get<std::string>() : "";
    if (norm == "frobenius") {
      n.norm = NoiseNorm::Frobenius;
    } else if (norm == "spectral") {
      n.norm = NoiseNorm::Spectral;
    } else {
      throw FormatError(fmt::format("{}: norm must be 'frobenius' or 'spectral'", where));
    }
  }
  n.relative_to_sigma_m = get_bool(j, "relative_to_sigma_m", false, where);
  if (shot_mode) {
    if (!j.contains("shots")) throw FormatError(fmt::format("{}: shot modes need a 'shots' list", where));
    n.shots = get_list<std::int64_t>(j, "shots", {}, where);
    for (auto s : n.shots) {
      if (s < 1) throw FormatError(fmt::format("{}: shot counts must be >= 1", where));
    }
    if (n.relative_to_sigma_m) throw FormatError(fmt::format("{}: relative_to_sigma_m applies to gaussian_matrix only", where));
  } else if (j.contains("shots")) {
    throw FormatError(fmt::format("{}: 'shots' requires a shot mode", where));
  }
  return n;
}

void parse_block(const Json& j, ExperimentConfig& cfg) {
  const std::string where = "config.block";
  if (cfg.command == Command::Nonhomog) {
    require_keys(j, {"l", "r"}, where);
    cfg.l = get_int(j, "l", 2, 1, 12, where);
    cfg.r = get_int(j, "r", 2, 1, 12, where);
    return;
  }
  require_keys(j, {"s", "s_left", "s_right"}, where);
  if (j.contains("s") && (j.contains("s_left") || j.contains("s_right"))) {
    throw FormatError(fmt::format("{}: use either 's' or 's_left'/'s_right'", where));
  }
  const int s = get_int(j, "s", 1, 1, 6, where);
  cfg.s_left = get_int(j, "s_left", s, 1, 6, where);
  cfg.s_right = get_int(j, "s_right", s, 1, 6, where);
}

std::vector<const char*> allowed_keys(Command c) {
  switch (c) {
    case Command::Aklt:
      return {"model", "block", "truncation", "noise", "sites", "epsilons", "trials", "seed",
              "workers", "dense_cap", "record_wall_time", "svg", "project_psd"};
    case Command::RankScan:
      return {"model", "max_block"};
    case Command::Nonhomog:
      return {"model", "block", "truncation", "noise", "epsilons", "trials", "seed", "workers",
              "dense_cap", "record_wall_time", "svg"};
    case Command::LemmaCheck:
      return {"model", "block", "truncation", "noise", "epsilons", "trials", "seed", "workers", "appendix_b"};
    case Command::Robustness:
      return {"model", "block", "truncation", "noise", "sites", "epsilons", "xis", "trials", "seed",
              "workers", "dense_cap", "record_wall_time", "svg", "project_psd"};
    case Command::Reconstruct:
      return {"marginals", "block", "truncation", "sites", "dense_cap", "project_psd"};
  }
  return {};
}

// --------------------------------------------------------------- helpers

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::vector<std::string> with_extras(std::initializer_list<const char*> extras) {
  std::vector<std::string> h = record_columns();
  for (const char* e : extras) h.emplace_back(e);
  return h;
}

// A sweep level: the Gaussian noise size or the shot count it stands for.
struct Level {
  double epsilon = 0.0;  // value written to the epsilon column
  std::int64_t shots = 0;
};

struct TiSetup {
  Realization model;
  HermitianBasis basis = HermitianBasis::gellmann(2);
  OmegaData exact;
  int exact_rank = 0;
  TruncationMode mode;
};

TiSetup ti_setup(const ExperimentConfig& cfg) {
  if (cfg.model.kind == ModelSpec::Kind::Chain) {
    throw FormatError(fmt::format("{} needs a translation-invariant model, not a chain", command_name(cfg.command)));
  }
  TiSetup s;
  s.model = build_model(cfg.model);
  s.basis = HermitianBasis::gellmann(s.model.d_a);
  s.exact = build_omega(s.model, cfg.s_left, cfg.s_right);
  s.exact_rank = numerical_rank(s.exact.omega);
  s.mode = cfg.truncation.value_or(TruncationMode::fixed_rank(s.exact_rank));
  spdlog::info("{}: model {}, Omega {}x{}, numerical rank {}", command_name(cfg.command), cfg.model.id(),
               s.exact.omega.rows(), s.exact.omega.cols(), s.exact_rank);
  return s;
}

double sigma_or_nan(const RealMatrix& omega, int m) {
  const double s = linalg::sigma(omega, m);
  return s > 0.0 ? s : kNaN;
}

std::vector<Level> sweep_levels(const ExperimentConfig& cfg, double sigma_m) {
  std::vector<Level> out;
  if (cfg.noise.mode != NoiseSpec::Mode::GaussianMatrix) {
    for (auto n : cfg.noise.shots) out.push_back({1.0 / std::sqrt(static_cast<double>(n)), n});
    return out;
  }
  for (double e : cfg.epsilons) out.push_back({cfg.noise.relative_to_sigma_m ? e * sigma_m : e, 0});
  return out;
}

// Block sizes whose marginals the translation-invariant reconstruction reads.
std::set<int> omega_marginal_sizes(const ExperimentConfig& cfg) {
  return {cfg.s_left, cfg.s_right, cfg.s_left + cfg.s_right, cfg.s_left + 1 + cfg.s_right};
}

OmegaData noisy_omega(const ExperimentConfig& cfg, const OmegaData& exact, const std::map<int, DensityMatrix>& small,
                      const HermitianBasis& basis, const Level& level, Rng& rng) {
  if (cfg.noise.mode == NoiseSpec::Mode::GaussianMatrix) {
    return perturb_omega_data(exact, level.epsilon, level.epsilon * cfg.noise.epsilon_prime_ratio, rng, cfg.noise.norm);
  }
  const ShotMode mode = cfg.noise.mode == NoiseSpec::Mode::ShotGaussian ? ShotMode::Gaussian : ShotMode::Multinomial;
  MarginalCoefficients est;
  for (const auto& [s, rho] : small) est[s] = simulate_tomography(rho, basis, level.shots, mode, rng);
  return build_omega(est, exact.d_a, exact.s_left, exact.s_right);
}

// Surrogate error parameters and bound; NaN outside the hypothesis
// ||Omega - Omega_hat|| <= sigma_m / 3 under which they are derived.
struct SurrogateRow {
  ErrorParameters ep{kNaN, kNaN, kNaN, 0};
  double bound = kNaN;
};

SurrogateRow surrogate_row(const PerturbationSizes& sizes, double sigma_m, int m, int d_a, int t) {
  SurrogateRow row;
  if (!(sigma_m > 0.0) || sizes.omega_op > sigma_m / 3.0) return row;
  row.ep = surrogate_parameters(sizes, sigma_m, m, d_a, t);
  row.bound = error_propagation_bound(row.ep);
  return row;
}

void check_sites(const std::vector<int>& sites, int d_a, std::int64_t cap) {
  for (int t : sites) {
    if (t < 1) throw FormatError(fmt::format("site count {} must be >= 1", t));
    if (checked_pow(d_a, t) > cap) {
      throw FormatError(fmt::format("{} sites of dimension {} exceed the dense cap {}", t, d_a, cap));
    }
  }
}

std::vector<PlotSeries> mean_series(const std::vector<Level>& levels, const std::vector<int>& sites,
                                    const std::vector<std::vector<std::vector<double>>>& td) {
  std::vector<PlotSeries> out;
  for (std::size_t e = 0; e < levels.size(); ++e) {
    PlotSeries s{fmt::format("eps={:.1e}", levels[e].epsilon), {}};
    for (std::size_t k = 0; k < sites.size(); ++k) {
      double mean = 0.0;
      for (double v : td[e][k]) mean += v;
      s.points.emplace_back(sites[k], mean / static_cast<double>(td[e][k].size()));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Json tally_to_json(const CheckTally& t) {
  Json failures = Json::array();
  for (const auto& r : t.failures) failures.push_back(to_json(r));
  return Json{{"holds", t.holds},
              {"violated", t.violated},
              {"precondition_unmet", t.precondition_unmet},
              {"failures", std::move(failures)}};
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(std::floor(rng.uniform() * (hi - lo + 1)));
}

RealMatrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  RealMatrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) g(r, c) = rng.normal();
  }
  return g;
}

// Gaussian direction rescaled to spectral norm `size`.
RealMatrix gaussian_of_norm(Rng& rng, Eigen::Index rows, Eigen::Index cols, double size) {
  const RealMatrix g = gaussian(rng, rows, cols);
  return g * (size / linalg::operator_norm_2to2(g));
}

}  // namespace

// --------------------------------------------------------------- public

Command parse_command(const std::string& name) {
  if (name == "aklt") return Command::Aklt;
  if (name == "rank-scan") return Command::RankScan;
  if (name == "nonhomog") return Command::Nonhomog;
  if (name == "lemma-check") return Command::LemmaCheck;
  if (name == "robustness") return Command::Robustness;
  if (name == "reconstruct") return Command::Reconstruct;
  throw FormatError(fmt::format("unknown command '{}'", name));
}

const char* command_name(Command c) {
  switch (c) {
    case Command::Aklt:
      return "aklt";
    case Command::RankScan:
      return "rank-scan";
    case Command::Nonhomog:
      return "nonhomog";
    case Command::LemmaCheck:
      return "lemma-check";
    case Command::Robustness:
      return "robustness";
    case Command::Reconstruct:
      return "reconstruct";
  }
  return "unknown";
}

std::string ModelSpec::id() const {
  switch (kind) {
    case Kind::Aklt:
      return theta == aklt_theta() ? "aklt" : fmt::format("aklt_theta{:.6f}", theta);
    case Kind::Random:
      return fmt::format("random_da{}_db{}_s{}", d_a, d_b, seed);
    case Kind::Product:
      return fmt::format("product_d{}", d_a);
    case Kind::Chain:
      return fmt::format("chain_n{}_da{}_db{}_s{}", n, d_a, d_b, seed);
  }
  return "unknown";
}

ExperimentConfig parse_config(Command command, const Json& j, const std::filesystem::path& base_dir) {
  const std::string where = "config";
  if (!j.is_object()) throw FormatError("config: expected a JSON object");
  const auto allowed = allowed_keys(command);
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw FormatError(fmt::format("config: key '{}' is unknown or does not apply to '{}'", key, command_name(command)));
    }
  }

  ExperimentConfig cfg;
  cfg.command = command;
  if (command == Command::Nonhomog) {
    cfg.model.kind = ModelSpec::Kind::Chain;
    cfg.model.n = 5;
    cfg.model.d_a = 2;
    cfg.model.d_b = 2;
    cfg.model.seed = 1;
  } else {
    cfg.model.theta = aklt_theta();
  }
  if (j.contains("model")) cfg.model = parse_model(j["model"]);
  const bool chain = cfg.model.kind == ModelSpec::Kind::Chain;
  if (chain != (command == Command::Nonhomog)) {
    throw FormatError(command == Command::Nonhomog ? "config: nonhomog needs a chain model"
                                                   : "config: chain models are only valid for nonhomog");
  }
  if (j.contains("block")) parse_block(j["block"], cfg);
  if (j.contains("truncation")) cfg.truncation = parse_truncation(j["truncation"]);
  if (command == Command::Reconstruct && !cfg.truncation) {
    throw FormatError("config: reconstruct needs an explicit 'truncation'");
  }
  const bool shots_allowed = command == Command::Aklt || command == Command::Robustness;
  if (j.contains("noise")) cfg.noise = parse_noise(j["noise"], shots_allowed);

  cfg.sites = get_list<int>(j, "sites", {1, 2, 3, 4}, where);
  cfg.epsilons = get_list<double>(j, "epsilons", {1e-4, 1e-3, 1e-2}, where);
  for (double e : cfg.epsilons) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw FormatError("config: epsilons must be finite and >= 0");
  }
  cfg.xis = get_list<double>(j, "xis", {0.0, 0.01, 0.1}, where);
  for (double x : cfg.xis) {
    if (!(x >= 0.0 && x <= 1.0)) throw FormatError("config: xis must lie in [0, 1]");
  }
  cfg.trials = get_int(j, "trials", 1, 1, 1000000, where);
  cfg.seed = get_seed(j, "seed", 1, where);
  cfg.workers = get_int(j, "workers", 1, 1, 256, where);
  if (j.contains("dense_cap")) {
    if (!j["dense_cap"].is_number_integer() || j["dense_cap"].get<std::int64_t>() < 1) {
      throw FormatError("config: dense_cap must be a positive integer");
    }
    cfg.dense_cap = j["dense_cap"].get<std::int64_t>();
  }
  cfg.max_block = get_int(j, "max_block", 2, 1, 4, where);
  cfg.record_wall_time = get_bool(j, "record_wall_time", false, where);
  cfg.svg = get_bool(j, "svg", false, where);
  cfg.project_psd = get_bool(j, "project_psd", false, where);
  if (j.contains("appendix_b")) {
    const Json& b = j["appendix_b"];
    require_keys(b, {"instances", "max_dim"}, "config.appendix_b");
    cfg.appendix_b_instances = get_int(b, "instances", 1000, 0, 1000000, "config.appendix_b");
    cfg.appendix_b_max_dim = get_int(b, "max_dim", 30, 1, 200, "config.appendix_b");
  }
  if (command == Command::Reconstruct) {
    if (!j.contains("marginals") || !j["marginals"].is_string()) {
      throw FormatError("config: reconstruct needs a 'marginals' file path");
    }
    cfg.marginals = j["marginals"].get<std::string>();
    if (cfg.marginals.is_relative() && !base_dir.empty()) cfg.marginals = base_dir / cfg.marginals;
  }
  if (command == Command::Aklt || command == Command::Robustness) {
    check_sites(cfg.sites, cfg.model.kind == ModelSpec::Kind::Aklt ? 3 : cfg.model.d_a, cfg.dense_cap);
  }
  return cfg;
}

ExperimentConfig load_config(Command command, const std::filesystem::path& path) {
  return parse_config(command, read_json_file(path), path.parent_path());
}

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols{"model",          "sites",       "epsilon",   "seed",
                                             "trial",          "trace_distance", "hs_distance", "sigma_m",
                                             "rank_used",      "bound_surrogate", "wall_time_ms"};
  return cols;
}

Realization build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelSpec::Kind::Aklt:
      return from_cstar(aklt(spec.theta), HermitianBasis::gellmann(3));
    case ModelSpec::Kind::Random:
      return from_cstar(random_cstar(spec.d_a, spec.d_b, spec.seed), HermitianBasis::gellmann(spec.d_a));
    case ModelSpec::Kind::Product:
      return product_realization(spec.state, HermitianBasis::gellmann(spec.d_a));
    case ModelSpec::Kind::Chain:
      break;
  }
  throw FormatError("chain models have no translation-invariant realization");
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || count <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(n_threads, count); ++k) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ExperimentResult cmd_aklt(const ExperimentConfig& cfg) {
  const TiSetup setup = ti_setup(cfg);
  const int d = setup.model.d_a;
  check_sites(cfg.sites, d, cfg.dense_cap);
  const double sm_exact = sigma_or_nan(setup.exact.omega, setup.exact_rank);
  const std::vector<Level> levels = sweep_levels(cfg, sm_exact);

  std::map<int, DensityMatrix> truth;
  for (int t : cfg.sites) truth.emplace(t, marginal(setup.model, setup.basis, t, cfg.dense_cap));
  std::map<int, DensityMatrix> small;
  if (cfg.noise.mode != NoiseSpec::Mode::GaussianMatrix) {
    for (int s : omega_marginal_sizes(cfg)) small.emplace(s, marginal(setup.model, setup.basis, s, cfg.dense_cap));
  }

  struct Cell {
    double td, hs, sigma_m, bound, ms;
    int rank;
    ErrorParameters ep;
  };
  const std::size_t n_sites = cfg.sites.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<Cell>> cells(levels.size() * n_trials);
  std::vector<std::uint64_t> seeds(cells.size());

  parallel_for(cells.size(), cfg.workers, [&](std::size_t job) {
    const std::size_t e = job / n_trials;
    const std::size_t trial = job % n_trials;
    const auto start = std::chrono::steady_clock::now();
    seeds[job] = derive_seed(cfg.seed, {e, trial});
    Rng rng(seeds[job]);
    const OmegaData noisy = noisy_omega(cfg, setup.exact, small, setup.basis, levels[e], rng);
    const SvdTruncation tr = truncate(noisy.omega, setup.mode);
    const SpectralRealization sr = spectral_realization(noisy, tr);
    const PerturbationSizes sizes = perturbation_sizes(setup.exact, noisy);
    const int m = tr.rank();
    const double sm = sigma_or_nan(setup.exact.omega, m);
    const double setup_ms = elapsed_ms(start);
    for (int t : cfg.sites) {
      const auto t_start = std::chrono::steady_clock::now();
      DensityMatrix est = reconstruct_marginal(sr, setup.basis, t, cfg.dense_cap);
      if (cfg.project_psd) est = project_to_density(est, setup.basis);
      const DensityMatrix& ref = truth.at(t);
      const SurrogateRow sur = surrogate_row(sizes, sm, m, d, t);
      cells[job].push_back({trace_distance(ref, est), hs_distance(ref, est), sm, sur.bound,
                            setup_ms + elapsed_ms(t_start), m, sur.ep});
    }
    spdlog::debug("aklt: level {} trial {} done", e, trial);
  });

  CsvTable table(with_extras({"td_per_site", "delta1_surrogate", "delta_inf_surrogate", "Delta_surrogate"}));
  std::vector<std::vector<std::vector<double>>> td(levels.size(), std::vector<std::vector<double>>(n_sites));
  for (std::size_t e = 0; e < levels.size(); ++e) {
    for (std::size_t k = 0; k < n_sites; ++k) {
      const int t = cfg.sites[k];
      for (std::size_t trial = 0; trial < n_trials; ++trial) {
        const std::size_t job = e * n_trials + trial;
        const Cell& c = cells[job][k];
        td[e][k].push_back(c.td);
        table.add_row({cfg.model.id(), std::int64_t{t}, levels[e].epsilon, seeds[job], std::uint64_t{trial}, c.td, c.hs,
                       c.sigma_m, std::int64_t{c.rank}, c.bound, cfg.record_wall_time ? c.ms : 0.0,
                       c.td / t, c.ep.delta_1, c.ep.delta_inf, c.ep.delta_cap});
      }
    }
  }
  ExperimentResult out;
  if (cfg.svg) {
    out.texts.emplace_back("aklt.svg", svg_plot(fmt::format("{}: mean trace distance", cfg.model.id()), "sites t",
                                                "trace distance", mean_series(levels, cfg.sites, td)));
  }
  out.tables.emplace_back("aklt.csv", std::move(table));
  return out;
}

ExperimentResult cmd_rank_scan(const ExperimentConfig& cfg) {
  const Realization model = build_model(cfg.model);
  const RankProfile profile = rank_profile(model, cfg.max_block);
  const auto [ti, tj] = profile.t_star();
  spdlog::info("rank-scan: model {}, final rank {}, stabilizes at (s_right, s_left) = ({}, {})", cfg.model.id(),
               profile.final_rank(), ti, tj);
  CsvTable table({"model", "s_right", "s_left", "rank", "sigma_rank", "sigma_next", "stabilized", "t_star"});
  for (int i = 1; i <= cfg.max_block; ++i) {
    const RealMatrix right = right_products(model, i);
    for (int j = 1; j <= cfg.max_block; ++j) {
      const RealVector s = linalg::singular_values(left_products(model, j) * right);
      const int rank = profile.ranks(i - 1, j - 1);
      const double s_rank = rank >= 1 ? s(rank - 1) : 0.0;
      const double s_next = rank < s.size() ? s(rank) : 0.0;
      table.add_row({cfg.model.id(), std::int64_t{i}, std::int64_t{j}, std::int64_t{rank}, s_rank, s_next,
                     std::int64_t{rank == profile.final_rank() ? 1 : 0}, std::int64_t{i == ti && j == tj ? 1 : 0}});
    }
  }
  ExperimentResult out;
  out.tables.emplace_back("rank_scan.csv", std::move(table));
  return out;
}

ExperimentResult cmd_nonhomog(const ExperimentConfig& cfg) {
  const ModelSpec& spec = cfg.model;
  const ChainRealization chain = random_chain(spec.n, spec.d_a, spec.d_b, spec.seed);
  const ComplexMatrix state = chain_state(chain, cfg.dense_cap);
  const ChainOmega source(state, spec.d_a, spec.n);
  const ChainOmegaData exact = chain_omega_data(source, cfg.l, cfg.r);
  const std::vector<int> ranks = chain_ranks(exact);
  std::vector<TruncationMode> modes = fixed_rank_modes(ranks);
  if (cfg.truncation) std::fill(modes.begin(), modes.end(), *cfg.truncation);
  const HermitianBasis basis = HermitianBasis::gellmann(spec.d_a);
  const DensityMatrix truth = density_from_matrix(state, basis, spec.n);

  double sm_min = std::numeric_limits<double>::infinity();
  for (int j = 1; j < spec.n; ++j) sm_min = std::min(sm_min, linalg::sigma(exact.omega[j], ranks[j]));
  spdlog::info("nonhomog: model {}, ranks {}, min sigma {:.3e}", spec.id(), fmt::join(ranks, " "), sm_min);
  const std::vector<Level> levels = sweep_levels(cfg, sm_min);

  struct Cell {
    double td, hs, bound, delta_prime, ms;
    int rank;
  };
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  std::vector<Cell> cells(levels.size() * n_trials);
  std::vector<std::uint64_t> seeds(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t job) {
    const std::size_t e = job / n_trials;
    const std::size_t trial = job % n_trials;
    const auto start = std::chrono::steady_clock::now();
    seeds[job] = derive_seed(cfg.seed, {e, trial});
    Rng rng(seeds[job]);
    const double eps = levels[e].epsilon;
    const ChainOmegaData noisy =
        perturb_chain_omega_data(exact, eps, eps * cfg.noise.epsilon_prime_ratio, rng, cfg.noise.norm);
    const ChainReconstruction rec = nonhomog_reconstruct(noisy, modes);
    const DensityMatrix est = chain_reconstructed_state(rec, cfg.dense_cap);
    const ChainBound cb = nonhomog_bound(exact, noisy, rec.ranks);
    cells[job] = {trace_distance(truth, est), hs_distance(truth, est), cb.bound, cb.delta_prime, elapsed_ms(start),
                  *std::max_element(rec.ranks.begin(), rec.ranks.end())};
  });

  CsvTable table(with_extras({"td_per_site", "delta_prime_surrogate"}));
  std::vector<std::vector<std::vector<double>>> td(levels.size(), std::vector<std::vector<double>>(1));
  for (std::size_t e = 0; e < levels.size(); ++e) {
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
      const std::size_t job = e * n_trials + trial;
      const Cell& c = cells[job];
      td[e][0].push_back(c.td);
      table.add_row({spec.id(), std::int64_t{spec.n}, levels[e].epsilon, seeds[job], std::uint64_t{trial}, c.td, c.hs,
                     sm_min, std::int64_t{c.rank}, c.bound, cfg.record_wall_time ? c.ms : 0.0, c.td / spec.n,
                     c.delta_prime});
    }
  }
  ExperimentResult out;
  if (cfg.svg) {
    std::vector<PlotSeries> series{{"mean trace distance", {}}};
    for (std::size_t e = 0; e < levels.size(); ++e) {
      double mean = 0.0;
      for (double v : td[e][0]) mean += v;
      series[0].points.emplace_back(std::log10(std::max(levels[e].epsilon, 1e-300)), mean / n_trials);
    }
    out.texts.emplace_back("nonhomog.svg", svg_plot(spec.id(), "log10 epsilon", "trace distance", series));
  }
  out.tables.emplace_back("nonhomog.csv", std::move(table));
  return out;
}

ExperimentResult cmd_lemma_check(const ExperimentConfig& cfg) {
  const TiSetup setup = ti_setup(cfg);
  const double sm = sigma_or_nan(setup.exact.omega, setup.exact_rank);
  const std::vector<Level> levels = sweep_levels(cfg, sm);
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  std::vector<LemmaReport> reports(levels.size() * n_trials);
  std::vector<std::uint64_t> seeds(reports.size());
  parallel_for(reports.size(), cfg.workers, [&](std::size_t job) {
    const std::size_t e = job / n_trials;
    seeds[job] = derive_seed(cfg.seed, {e, job % n_trials});
    Rng rng(seeds[job]);
    const double eps = levels[e].epsilon;
    const OmegaData noisy =
        perturb_omega_data(setup.exact, eps, eps * cfg.noise.epsilon_prime_ratio, rng, cfg.noise.norm);
    reports[job] = lemma_43_check(setup.exact, noisy, truncate(noisy.omega, setup.mode));
  });

  CheckTally tally;
  Json runs = Json::array();
  for (std::size_t job = 0; job < reports.size(); ++job) {
    tally.add(reports[job]);
    runs.push_back(Json{{"epsilon", levels[job / n_trials].epsilon},
                        {"trial", job % n_trials},
                        {"seed", seeds[job]},
                        {"report", to_json(reports[job])}});
  }
  const std::uint64_t b_seed = derive_seed(cfg.seed, {0xB});
  const AppendixBSweep sweep = appendix_b_sweep(cfg.appendix_b_instances, cfg.appendix_b_max_dim, b_seed);
  spdlog::info("lemma-check: realization estimates hold {}, violated {}, precondition unmet {}", tally.holds,
               tally.violated, tally.precondition_unmet);

  Json doc{{"version", kSchemaVersion},
           {"model", cfg.model.id()},
           {"rank", setup.exact_rank},
           {"sigma_m", sm},
           {"realization_estimates", Json{{"summary", tally_to_json(tally)}, {"runs", std::move(runs)}}},
           {"perturbation_lemmas",
            Json{{"instances", cfg.appendix_b_instances},
                 {"max_dim", cfg.appendix_b_max_dim},
                 {"seed", b_seed},
                 {"weyl_singular_values", tally_to_json(sweep.b1)},
                 {"pseudoinverse_perturbation", tally_to_json(sweep.b2)},
                 {"left_singular_subspace", tally_to_json(sweep.b3)},
                 {"truncated_frame_perturbation", tally_to_json(sweep.b5)}}}};
  ExperimentResult out;
  out.documents.emplace_back("lemma_check.json", std::move(doc));
  return out;
}

ExperimentResult cmd_robustness(const ExperimentConfig& cfg) {
  const TiSetup setup = ti_setup(cfg);
  const int d = setup.model.d_a;
  check_sites(cfg.sites, d, cfg.dense_cap);
  const double sm_exact = sigma_or_nan(setup.exact.omega, setup.exact_rank);
  const std::vector<Level> levels = sweep_levels(cfg, sm_exact);

  // sigma = (1 - xi) omega + xi (1/d)^{(x) infinity}; the maximally mixed
  // state only has an identity coefficient, d^(-s/2) on s sites.
  auto mixed_coefficients = [&](int s, double xi) {
    RealVector c = (1.0 - xi) * word_coefficients(setup.model, s);
    c(0) += xi * std::pow(static_cast<double>(d), -0.5 * s);
    return c;
  };
  std::map<int, DensityMatrix> truth;
  for (int t : cfg.sites) truth.emplace(t, marginal(setup.model, setup.basis, t, cfg.dense_cap));

  struct Prepared {
    OmegaData od;
    std::map<int, DensityMatrix> small;
    std::map<int, DensityMatrix> mixed_truth;
  };
  std::vector<Prepared> prepared;
  for (double xi : cfg.xis) {
    Prepared p;
    MarginalCoefficients coeffs;
    for (int s : omega_marginal_sizes(cfg)) {
      coeffs[s] = mixed_coefficients(s, xi);
      if (cfg.noise.mode != NoiseSpec::Mode::GaussianMatrix) {
        p.small.emplace(s, density_from_coefficients(coeffs[s], setup.basis, s));
      }
    }
    p.od = build_omega(coeffs, d, cfg.s_left, cfg.s_right);
    for (int t : cfg.sites) p.mixed_truth.emplace(t, density_from_coefficients(mixed_coefficients(t, xi), setup.basis, t));
    prepared.push_back(std::move(p));
  }

  struct Cell {
    double td, td_mixed, hs, sigma_m, bound, ms;
    int rank;
  };
  const std::size_t n_levels = levels.size();
  const std::size_t n_trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t n_sites = cfg.sites.size();
  std::vector<std::vector<Cell>> cells(cfg.xis.size() * n_levels * n_trials);
  std::vector<std::uint64_t> seeds(cells.size());
  parallel_for(cells.size(), cfg.workers, [&](std::size_t job) {
    const std::size_t x = job / (n_levels * n_trials);
    const std::size_t e = (job / n_trials) % n_levels;
    const std::size_t trial = job % n_trials;
    const auto start = std::chrono::steady_clock::now();
    seeds[job] = derive_seed(cfg.seed, {x, e, trial});
    Rng rng(seeds[job]);
    const Prepared& p = prepared[x];
    const OmegaData noisy = noisy_omega(cfg, p.od, p.small, setup.basis, levels[e], rng);
    const SvdTruncation tr = truncate(noisy.omega, setup.mode);
    const SpectralRealization sr = spectral_realization(noisy, tr);
    const PerturbationSizes sizes = perturbation_sizes(setup.exact, noisy);
    const int m = tr.rank();
    const double sm = sigma_or_nan(setup.exact.omega, m);
    const double setup_ms = elapsed_ms(start);
    for (int t : cfg.sites) {
      const auto t_start = std::chrono::steady_clock::now();
      DensityMatrix est = reconstruct_marginal(sr, setup.basis, t, cfg.dense_cap);
      if (cfg.project_psd) est = project_to_density(est, setup.basis);
      const SurrogateRow sur = surrogate_row(sizes, sm, m, d, t);
      cells[job].push_back({trace_distance(truth.at(t), est), trace_distance(p.mixed_truth.at(t), est),
                            hs_distance(truth.at(t), est), sm, sur.bound, setup_ms + elapsed_ms(t_start), m});
    }
  });

  CsvTable table(with_extras({"xi", "td_per_site", "td_vs_mixed"}));
  for (std::size_t x = 0; x < cfg.xis.size(); ++x) {
    for (std::size_t e = 0; e < n_levels; ++e) {
      for (std::size_t k = 0; k < n_sites; ++k) {
        const int t = cfg.sites[k];
        for (std::size_t trial = 0; trial < n_trials; ++trial) {
          const std::size_t job = (x * n_levels + e) * n_trials + trial;
          const Cell& c = cells[job][k];
          table.add_row({cfg.model.id(), std::int64_t{t}, levels[e].epsilon, seeds[job], std::uint64_t{trial}, c.td,
                         c.hs, c.sigma_m, std::int64_t{c.rank}, c.bound, cfg.record_wall_time ? c.ms : 0.0,
                         cfg.xis[x], c.td / t, c.td_mixed});
        }
      }
    }
  }
  ExperimentResult out;
  if (cfg.svg) {
    std::vector<PlotSeries> series;
    for (std::size_t x = 0; x < cfg.xis.size(); ++x) {
      PlotSeries s{fmt::format("xi={:.3g}", cfg.xis[x]), {}};
      for (std::size_t e = 0; e < n_levels; ++e) {
        double mean = 0.0;
        for (std::size_t trial = 0; trial < n_trials; ++trial) {
          mean += cells[(x * n_levels + e) * n_trials + trial].back().td;
        }
        s.points.emplace_back(std::log10(std::max(levels[e].epsilon, 1e-300)), mean / n_trials);
      }
      series.push_back(std::move(s));
    }
    out.texts.emplace_back("robustness.svg",
                           svg_plot(fmt::format("{}: {} sites", cfg.model.id(), cfg.sites.back()), "log10 epsilon",
                                    "trace distance", series));
  }
  out.tables.emplace_back("robustness.csv", std::move(table));
  return out;
}

ExperimentResult cmd_reconstruct(const ExperimentConfig& cfg) {
  const MarginalFile file = marginal_file_from_json(read_json_file(cfg.marginals));
  check_sites(cfg.sites, file.d_a, cfg.dense_cap);
  const HermitianBasis basis = HermitianBasis::gellmann(file.d_a);
  const OmegaData od = build_omega(file.marginals, file.d_a, cfg.s_left, cfg.s_right);
  const SvdTruncation tr = truncate(od.omega, *cfg.truncation);
  const SpectralRealization sr = spectral_realization(od, tr);
  spdlog::info("reconstruct: rank {}, sigma_m {:.3e}, condition number {:.3e}", sr.diagnostics.rank,
               sr.diagnostics.sigma_m_omega, sr.diagnostics.condition_number);

  CsvTable table({"sites", "trace", "min_eigenvalue", "hs_norm"});
  MarginalFile rebuilt{file.d_a, {}};
  for (int t : cfg.sites) {
    DensityMatrix est = reconstruct_marginal(sr, basis, t, cfg.dense_cap);
    if (cfg.project_psd) est = project_to_density(est, basis);
    const RealVector ev = linalg::hermitian_eigenvalues(est.matrix);
    table.add_row({std::int64_t{t}, est.trace(), ev(0), est.coefficients.norm()});
    rebuilt.marginals[t] = est.coefficients;
  }
  ExperimentResult out;
  out.tables.emplace_back("reconstruct.csv", std::move(table));
  out.documents.emplace_back("realization.json", to_json(sr));
  out.documents.emplace_back("reconstructed_marginals.json", to_json(rebuilt));
  return out;
}

ExperimentResult run_command(const ExperimentConfig& cfg) {
  switch (cfg.command) {
    case Command::Aklt:
      return cmd_aklt(cfg);
    case Command::RankScan:
      return cmd_rank_scan(cfg);
    case Command::Nonhomog:
      return cmd_nonhomog(cfg);
    case Command::LemmaCheck:
      return cmd_lemma_check(cfg);
    case Command::Robustness:
      return cmd_robustness(cfg);
    case Command::Reconstruct:
      return cmd_reconstruct(cfg);
  }
  throw FormatError("unknown command");
}

void write_result(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw FormatError(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  for (const auto& [name, table] : result.tables) {
    table.write(out_dir / name);
    spdlog::info("wrote {} ({} rows)", (out_dir / name).string(), table.rows());
  }
  for (const auto& [name, doc] : result.documents) {
    write_json_file(out_dir / name, doc);
    spdlog::info("wrote {}", (out_dir / name).string());
  }
  for (const auto& [name, text] : result.texts) {
    std::ofstream f(out_dir / name, std::ios::binary);
    f << text;
    if (!f) throw FormatError(fmt::format("write to '{}' failed", (out_dir / name).string()));
    spdlog::info("wrote {}", (out_dir / name).string());
  }
}

void CheckTally::add(const LemmaReport& rep) {
  switch (rep.status()) {
    case CheckStatus::Holds:
      ++holds;
      break;
    case CheckStatus::Violated:
      ++violated;
      if (failures.size() < 10) failures.push_back(rep);
      break;
    case CheckStatus::PreconditionUnmet:
      ++precondition_unmet;
      break;
  }
}

AppendixBSweep appendix_b_sweep(int instances, int max_dim, std::uint64_t seed) {
  AppendixBSweep out;
  for (int k = 0; k < instances; ++k) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(k)}));
    {
      const int rows = uniform_int(rng, 1, max_dim);
      const int cols = uniform_int(rng, 1, max_dim);
      const RealMatrix a = gaussian(rng, rows, cols);
      const double scale = std::pow(10.0, -6.0 * rng.uniform());
      out.b1.add(lemma_b1_check(a, gaussian(rng, rows, cols) * scale));
    }
    {
      const int rows = uniform_int(rng, 1, max_dim);
      const int cols = uniform_int(rng, 1, max_dim);
      const RealMatrix a = gaussian(rng, rows, cols);
      const double size = std::pow(10.0, -1.0 - 7.0 * rng.uniform()) * linalg::operator_norm_2to2(a);
      out.b2.add(lemma_b2_check(a, a + gaussian_of_norm(rng, rows, cols, size)));
    }
    {
      const int n = uniform_int(rng, 1, max_dim);
      const int m = uniform_int(rng, n, max_dim);
      const RealMatrix a = gaussian(rng, m, n);
      const double eps = 0.01 + 0.98 * rng.uniform();
      const double sigma_n = linalg::sigma(a, n);
      const double size = rng.uniform_open_left() * eps * sigma_n;
      out.b3.add(corollary_b3_check(a, gaussian_of_norm(rng, m, n, size), eps));
    }
    {
      const int rows = uniform_int(rng, 2, max_dim);
      const int cols = uniform_int(rng, 2, max_dim);
      const int m = uniform_int(rng, 1, std::min(rows, cols));
      const RealMatrix omega = gaussian(rng, rows, m) * gaussian(rng, m, cols);
      const double eps = 0.01 + 0.48 * rng.uniform();
      const double size = rng.uniform_open_left() * eps * linalg::sigma(omega, m);
      out.b5.add(lemma_b5_check(omega, omega + gaussian_of_norm(rng, rows, cols, size), m, eps));
    }
  }
  return out;
}

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(y > 0.0) || !std::isfinite(y)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, std::log10(y));
      y_hi = std::max(y_hi, std::log10(y));
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = -1.0;
    y_hi = 0.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1;
  y_lo = std::floor(y_lo);
  y_hi = std::max(std::ceil(y_hi), y_lo + 1);
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * (kW - kLeft - kRight); };
  auto py = [&](double ly) { return kH - kBottom - (ly - y_lo) / (y_hi - y_lo) * (kH - kTop - kBottom); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kW, kH);
  out += fmt::format("<text x=\"{:.1f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     (kW - kRight + kLeft) / 2, title);
  out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", kLeft,
                     kH - kBottom, kW - kRight);
  out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", kLeft,
                     kTop, kH - kBottom);
  for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); ++e) {
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6, py(e) + 4, e);
  }
  for (int k = 0; k <= 4; ++k) {
    const double x = x_lo + (x_hi - x_lo) * k / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n", px(x),
                       kH - kBottom + 18, x);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", (kW - kRight + kLeft) / 2,
                     kH - 10, x_label);
  out += fmt::format("<text x=\"16\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.1f})\">{1}</text>\n",
                     (kH - kBottom + kTop) / 2, y_label);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string points;
    for (const auto& [x, y] : series[i].points) {
      if (!(y > 0.0) || !std::isfinite(y)) continue;
      points += fmt::format("{:.1f},{:.1f} ", px(x), py(std::log10(y)));
      out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(x), py(std::log10(y)), color);
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>\n", points, color);
    const double ly = kTop + 18.0 * static_cast<double>(i);
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", kW - kRight + 12,
                       ly, color);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kW - kRight + 28, ly + 9, series[i].label);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace fcs
