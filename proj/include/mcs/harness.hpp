#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mcs/bounds.hpp"
#include "mcs/linops.hpp"
#include "mcs/manifolds.hpp"
#include "mcs/recovery.hpp"
#include "mcs/rng.hpp"

namespace mcs {

namespace detail {

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Runs fn(0..n-1) on up to `jobs` threads (0 = hardware concurrency). Each
// index is processed exactly once; callers write disjoint slots, so results
// do not depend on the job count.
template <typename Fn>
void parallel_for(int n, int jobs, const Fn& fn) {
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// One-sided 95% Wilson lower confidence bound for a binomial proportion.
inline double wilson_lower_bound(int successes, int trials) {
  if (trials <= 0) return 0.0;
  if (successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_lower_bound: successes out of range");
  }
  const double z = 1.6448536269514722;  // one-sided 95%
  const double n = trials;
  const double phat = successes / n;
  const double z2 = z * z;
  const double center = phat + z2 / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return std::max(0.0, (center - spread) / (1.0 + z2 / n));
}

// Configuration for the seeded Monte Carlo experiments. meas_dim = 0 sizes M
// automatically through required_measurements with constant_c, which needs
// the manifold's characteristics to be resolved.
struct ExperimentConfig {
  explicit ExperimentConfig(ManifoldModel m) : manifold(std::move(m)) {}

  ManifoldModel manifold;
  int meas_dim = 0;
  double constant_c = 1.0;
  double epsilon = 0.5;
  double rho = 0.1;
  double noise_norm = 0.0;
  double offset = 0.0;  // off-manifold displacement along a random normal
  int trials = 100;
  std::uint64_t base_seed = 0;
  int grid_density = 1024;
  // The guarantees quantify over the operator for a fixed signal; redrawing
  // theta per trial is available for exploratory runs.
  bool fix_signal = true;
  std::optional<double> fixed_theta;
  int embed_points = 64;  // manifold points per distortion check (all pairs used)
  int jobs = 0;           // 0 = hardware concurrency

  void validate() const {
    if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
      throw std::invalid_argument("ExperimentConfig: epsilon must lie in (0, 1)");
    }
    if (!(rho > 0.0) || !(rho < 1.0)) {
      throw std::invalid_argument("ExperimentConfig: rho must lie in (0, 1)");
    }
    if (noise_norm < 0.0) throw std::invalid_argument("ExperimentConfig: noise_norm must be >= 0");
    if (offset < 0.0) throw std::invalid_argument("ExperimentConfig: offset must be >= 0");
    if (grid_density < 2) throw std::invalid_argument("ExperimentConfig: grid_density must be >= 2");
    if (meas_dim < 0 || meas_dim > manifold.ambient_dim()) {
      throw std::invalid_argument("ExperimentConfig: meas_dim out of range");
    }
    if (embed_points < 2) throw std::invalid_argument("ExperimentConfig: embed_points must be >= 2");
    if (fixed_theta && !manifold.in_domain(*fixed_theta)) {
      throw std::invalid_argument("ExperimentConfig: fixed_theta outside parameter domain");
    }
  }

  int resolve_meas_dim() const {
    if (meas_dim > 0) return meas_dim;
    const Characteristics& ch = manifold.characteristics();
    return required_measurements(manifold.intrinsic_dim(), manifold.ambient_dim(), ch.volume,
                                 ch.regularity, ch.tau, epsilon, rho, constant_c);
  }
};

// Per-trial record of a recovery experiment. `seed` is the trial's derived
// stream seed; satisfied4 is undefined when the parameter bound's
// precondition fails (empty in CSV, null in JSON).
struct TrialRecord {
  std::uint64_t seed = 0;
  double theta_true = 0.0;
  double theta_star = 0.0;
  double theta_hat = 0.0;
  double err_signal = 0.0;
  double err_model = 0.0;
  double err_noise = 0.0;
  double geo_err = 0.0;
  double bound3_value = 0.0;
  double bound4_value = 0.0;
  bool bound4_precondition = false;
  bool satisfied3 = false;
  std::optional<bool> satisfied4;
  double empirical_eps = 0.0;
};

struct EmbeddingRecord {
  std::uint64_t seed = 0;
  double empirical_eps = 0.0;
  bool success = false;
};

struct EmbeddingSummary {
  int trials = 0;
  int meas_dim = 0;
  int successes = 0;
  double success_rate = 0.0;
  double wilson_lower = 0.0;
  double target_rate = 0.0;  // 1 - rho
};

struct EmbeddingExperimentResult {
  EmbeddingSummary summary;
  std::vector<EmbeddingRecord> records;
};

namespace detail {

// Random manifold points used for distortion checks.
inline std::vector<Eigen::VectorXd> sample_manifold_points(const ManifoldModel& m, int count,
                                                           std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    pts.push_back(m.point_extended(rng.uniform(m.param_lo(), m.param_hi())));
  }
  return pts;
}

}  // namespace detail

// Stable-embedding certification: per seed, draws an operator, samples
// manifold pairs, and checks the worst pair distortion against epsilon. The
// summary compares the empirical success rate (Wilson-adjusted) with 1 - rho.
inline EmbeddingExperimentResult run_embedding_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.embed_points * (cfg.embed_points - 1) / 2 < 1000) {
    throw std::invalid_argument("run_embedding_experiment: need >= 1000 pairs; raise embed_points");
  }
  const int m_dim = cfg.resolve_meas_dim();
  const int n = cfg.manifold.ambient_dim();

  EmbeddingExperimentResult out;
  out.records.resize(cfg.trials);
  detail::parallel_for(cfg.trials, cfg.jobs, [&](int i) {
    const std::uint64_t trial_seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i));
    const Orthoprojector p = make_orthoprojector(m_dim, n, derive_seed(trial_seed, 0));
    const auto pts =
        detail::sample_manifold_points(cfg.manifold, cfg.embed_points, derive_seed(trial_seed, 1));
    const Distortion d = pairwise_distortion(p, pts);
    EmbeddingRecord rec;
    rec.seed = trial_seed;
    rec.empirical_eps = std::max(d.eps_lo, d.eps_hi);
    rec.success = rec.empirical_eps <= cfg.epsilon;
    out.records[i] = rec;
  });

  EmbeddingSummary& s = out.summary;
  s.trials = cfg.trials;
  s.meas_dim = m_dim;
  for (const auto& r : out.records) s.successes += r.success ? 1 : 0;
  s.success_rate = static_cast<double>(s.successes) / cfg.trials;
  s.wilson_lower = wilson_lower_bound(s.successes, cfg.trials);
  s.target_rate = 1.0 - cfg.rho;
  out.summary = s;
  return out;
}

struct RecoverySummary {
  int trials = 0;
  int meas_dim = 0;
  double target_rate = 0.0;  // 1 - rho
  int satisfied3 = 0;
  double satisfied3_rate = 0.0;
  double satisfied3_wilson = 0.0;
  int precondition_count = 0;  // trials where the parameter bound applies
  int satisfied4 = 0;
  double satisfied4_rate = 0.0;    // among precondition_count
  double satisfied4_wilson = 0.0;  // among precondition_count
};

struct RecoveryExperimentResult {
  RecoverySummary summary;
  std::vector<TrialRecord> records;
};

// Recovery and parameter bound certification. Per trial: draw the operator,
// build x = x_theta + offset * (unit normal), add noise of fixed norm on the
// measurement sphere, run recovery, evaluate both bounds, and record
// satisfaction. With fix_signal the signal (and hence x*) is shared across
// trials and only the operator and noise are redrawn, matching how the
// guarantees quantify; otherwise theta is redrawn per trial.
inline RecoveryExperimentResult run_recovery_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int m_dim = cfg.resolve_meas_dim();
  const ManifoldModel& man = cfg.manifold;
  const int n = man.ambient_dim();
  const Characteristics& ch = man.characteristics();

  constexpr std::uint64_t kSignalTag = 0x5163a1fca93c12d4ULL;

  // Shared fixed-signal draw.
  double shared_theta = 0.0;
  Eigen::VectorXd shared_x;
  double shared_theta_star = 0.0;
  Eigen::VectorXd shared_x_star;
  if (cfg.fix_signal) {
    SplitMix64 rng(derive_seed(cfg.base_seed, kSignalTag));
    shared_theta = cfg.fixed_theta ? *cfg.fixed_theta : rng.uniform(man.param_lo(), man.param_hi());
    shared_x = man.point(shared_theta);
    if (cfg.offset > 0.0) {
      shared_x += cfg.offset * random_normal_direction(man, shared_theta, rng);
    }
    std::tie(shared_theta_star, shared_x_star) =
        full_data_optimum(shared_x, man, cfg.grid_density);
  }

  RecoveryExperimentResult out;
  out.records.resize(cfg.trials);
  detail::parallel_for(cfg.trials, cfg.jobs, [&](int i) {
    const std::uint64_t trial_seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(i));
    const Orthoprojector p = make_orthoprojector(m_dim, n, derive_seed(trial_seed, 0));

    double theta_true;
    Eigen::VectorXd x;
    double theta_star;
    Eigen::VectorXd x_star;
    if (cfg.fix_signal) {
      theta_true = shared_theta;
      x = shared_x;
      theta_star = shared_theta_star;
      x_star = shared_x_star;
    } else {
      SplitMix64 rng(derive_seed(trial_seed, 1));
      theta_true = cfg.fixed_theta ? *cfg.fixed_theta : rng.uniform(man.param_lo(), man.param_hi());
      x = man.point(theta_true);
      if (cfg.offset > 0.0) {
        x += cfg.offset * random_normal_direction(man, theta_true, rng);
      }
      std::tie(theta_star, x_star) = full_data_optimum(x, man, cfg.grid_density);
    }

    Eigen::VectorXd noise = Eigen::VectorXd::Zero(m_dim);
    if (cfg.noise_norm > 0.0) {
      SplitMix64 noise_rng(derive_seed(trial_seed, 2));
      noise = cfg.noise_norm * noise_rng.sphere_vector(m_dim);
    }
    const Measurement y = measure(p, x, noise);
    const RecoverySolution sol = recover_signal(y, p, man, cfg.grid_density);

    TrialRecord rec;
    rec.seed = trial_seed;
    rec.theta_true = theta_true;
    rec.theta_star = theta_star;
    rec.theta_hat = sol.theta_hat;
    rec.err_signal = (x - sol.x_hat).norm();
    rec.err_model = (x - x_star).norm();
    rec.err_noise = y.noise_norm;
    rec.geo_err = geodesic_distance(man, sol.theta_hat, theta_star);

    BoundInputs bi;
    bi.ambient_dim = n;
    bi.meas_dim = m_dim;
    bi.epsilon = cfg.epsilon;
    bi.rho = cfg.rho;
    bi.tau = ch.tau;
    bi.volume = ch.volume;
    bi.regularity = ch.regularity;
    bi.intrinsic_dim = man.intrinsic_dim();
    bi.model_error = rec.err_model;
    bi.noise_norm = rec.err_noise;
    const BoundReport b3 = recovery_bound(bi);
    const BoundReport b4 = parameter_bound(bi);
    rec.bound3_value = b3.value;
    rec.bound4_value = b4.value;
    rec.bound4_precondition = b4.precondition_met;
    rec.satisfied3 = rec.err_signal <= rec.bound3_value;
    if (rec.bound4_precondition) rec.satisfied4 = rec.geo_err <= rec.bound4_value;

    const auto pts =
        detail::sample_manifold_points(man, cfg.embed_points, derive_seed(trial_seed, 4));
    const Distortion d = pairwise_distortion(p, pts);
    rec.empirical_eps = std::max(d.eps_lo, d.eps_hi);

    out.records[i] = rec;
  });

  RecoverySummary& s = out.summary;
  s.trials = cfg.trials;
  s.meas_dim = m_dim;
  s.target_rate = 1.0 - cfg.rho;
  for (const auto& r : out.records) {
    s.satisfied3 += r.satisfied3 ? 1 : 0;
    if (r.bound4_precondition) {
      ++s.precondition_count;
      s.satisfied4 += (r.satisfied4 && *r.satisfied4) ? 1 : 0;
    }
  }
  s.satisfied3_rate = static_cast<double>(s.satisfied3) / s.trials;
  s.satisfied3_wilson = wilson_lower_bound(s.satisfied3, s.trials);
  if (s.precondition_count > 0) {
    s.satisfied4_rate = static_cast<double>(s.satisfied4) / s.precondition_count;
    s.satisfied4_wilson = wilson_lower_bound(s.satisfied4, s.precondition_count);
  }
  return out;
}

// Resolves the unspecified constant in the measurement count: bisection for
// the smallest C in [0.1, 100] whose embedding success rate over `trials`
// seeds clears target_rate (Wilson-adjusted). Deterministic given base_seed;
// every evaluation reuses the same seed set.
inline double calibrate_constant(const ManifoldModel& manifold, double epsilon, double rho,
                                 double target_rate, int trials = 200,
                                 std::uint64_t base_seed = 0x636c6962ULL, int embed_points = 64,
                                 int jobs = 0) {
  if (!(target_rate > 0.0) || !(target_rate < 1.0)) {
    throw std::invalid_argument("calibrate_constant: target_rate must lie in (0, 1)");
  }
  ExperimentConfig cfg(manifold);
  cfg.epsilon = epsilon;
  cfg.rho = rho;
  cfg.trials = trials;
  cfg.base_seed = base_seed;
  cfg.embed_points = embed_points;
  cfg.jobs = jobs;

  const auto passes = [&](double c) {
    cfg.constant_c = c;
    cfg.meas_dim = 0;
    return run_embedding_experiment(cfg).summary.wilson_lower >= target_rate;
  };

  double lo = 0.1;
  double hi = 100.0;
  if (passes(lo)) return lo;
  if (!passes(hi)) {
    std::ostringstream msg;
    msg << "calibrate_constant: no C in [0.1, 100] reaches target rate " << target_rate
        << " (epsilon " << epsilon << ", rho " << rho << ", trials " << trials << ")";
    throw std::runtime_error(msg.str());
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---- Record persistence ----------------------------------------------------

enum class RecordFormat { Csv, Json };

inline const char* trial_record_csv_header() {
  return "seed,theta_true,theta_star,theta_hat,err_signal,err_model,err_noise,geo_err,"
         "bound3_value,bound4_value,bound4_precondition,satisfied3,satisfied4,empirical_eps";
}

inline std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out = trial_record_csv_header();
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.seed);
    out += ',';
    out += detail::format_g17(r.theta_true) + ',';
    out += detail::format_g17(r.theta_star) + ',';
    out += detail::format_g17(r.theta_hat) + ',';
    out += detail::format_g17(r.err_signal) + ',';
    out += detail::format_g17(r.err_model) + ',';
    out += detail::format_g17(r.err_noise) + ',';
    out += detail::format_g17(r.geo_err) + ',';
    out += detail::format_g17(r.bound3_value) + ',';
    out += detail::format_g17(r.bound4_value) + ',';
    out += r.bound4_precondition ? "1," : "0,";
    out += r.satisfied3 ? "1," : "0,";
    if (r.satisfied4) out += *r.satisfied4 ? "1" : "0";
    out += ',';
    out += detail::format_g17(r.empirical_eps);
    out += '\n';
  }
  return out;
}

inline void to_json(nlohmann::json& j, const TrialRecord& r) {
  j = nlohmann::json{{"seed", r.seed},
                     {"theta_true", r.theta_true},
                     {"theta_star", r.theta_star},
                     {"theta_hat", r.theta_hat},
                     {"err_signal", r.err_signal},
                     {"err_model", r.err_model},
                     {"err_noise", r.err_noise},
                     {"geo_err", r.geo_err},
                     {"bound3_value", r.bound3_value},
                     {"bound4_value", r.bound4_value},
                     {"bound4_precondition", r.bound4_precondition},
                     {"satisfied3", r.satisfied3},
                     {"satisfied4", nullptr},
                     {"empirical_eps", r.empirical_eps}};
  if (r.satisfied4) j["satisfied4"] = *r.satisfied4;
}

inline void from_json(const nlohmann::json& j, TrialRecord& r) {
  r.seed = j.at("seed").get<std::uint64_t>();
  r.theta_true = j.at("theta_true").get<double>();
  r.theta_star = j.at("theta_star").get<double>();
  r.theta_hat = j.at("theta_hat").get<double>();
  r.err_signal = j.at("err_signal").get<double>();
  r.err_model = j.at("err_model").get<double>();
  r.err_noise = j.at("err_noise").get<double>();
  r.geo_err = j.at("geo_err").get<double>();
  r.bound3_value = j.at("bound3_value").get<double>();
  r.bound4_value = j.at("bound4_value").get<double>();
  r.bound4_precondition = j.at("bound4_precondition").get<bool>();
  r.satisfied3 = j.at("satisfied3").get<bool>();
  r.satisfied4.reset();
  if (!j.at("satisfied4").is_null()) r.satisfied4 = j.at("satisfied4").get<bool>();
  r.empirical_eps = j.at("empirical_eps").get<double>();
}

inline std::string records_to_json(const std::vector<TrialRecord>& records) {
  return nlohmann::json(records).dump(2) + "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error("records_from_csv: bad numeric field: " + s);
  return v;
}

}  // namespace detail

inline std::vector<TrialRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records_from_csv: empty input");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 14) throw std::runtime_error("records_from_csv: expected 14 fields");
    TrialRecord r;
    r.seed = std::strtoull(f[0].c_str(), nullptr, 10);
    r.theta_true = detail::parse_double(f[1]);
    r.theta_star = detail::parse_double(f[2]);
    r.theta_hat = detail::parse_double(f[3]);
    r.err_signal = detail::parse_double(f[4]);
    r.err_model = detail::parse_double(f[5]);
    r.err_noise = detail::parse_double(f[6]);
    r.geo_err = detail::parse_double(f[7]);
    r.bound3_value = detail::parse_double(f[8]);
    r.bound4_value = detail::parse_double(f[9]);
    r.bound4_precondition = f[10] == "1";
    r.satisfied3 = f[11] == "1";
    if (!f[12].empty()) r.satisfied4 = f[12] == "1";
    r.empirical_eps = detail::parse_double(f[13]);
    records.push_back(r);
  }
  return records;
}

inline std::vector<TrialRecord> records_from_json(const std::string& text) {
  return nlohmann::json::parse(text).get<std::vector<TrialRecord>>();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings exact
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_records(const std::vector<TrialRecord>& records, const std::string& path,
                          RecordFormat format) {
  write_text_file(path,
                  format == RecordFormat::Csv ? records_to_csv(records) : records_to_json(records));
}

inline std::string embedding_records_to_csv(const std::vector<EmbeddingRecord>& records) {
  std::string out = "seed,empirical_eps,success\n";
  for (const auto& r : records) {
    out += std::to_string(r.seed);
    out += ',';
    out += detail::format_g17(r.empirical_eps);
    out += r.success ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace mcs
