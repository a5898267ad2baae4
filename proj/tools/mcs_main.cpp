// Command-line front end for the mcs library. Every experiment and bound
// evaluator is reachable as a subcommand; stdout carries only data (CSV,
// JSON, or bare numbers) so pipelines stay clean, and all logging goes to
// stderr. Numeric output uses 17 significant digits unless --human asks for
// a readable 6.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mcs/mcs.hpp>

namespace {

int g_digits = 17;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", g_digits, v);
  return buf;
}

// Data goes to --out when given, stdout otherwise.
class DataSink {
 public:
  explicit DataSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open for writing: " + path);
      path_ = path;
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    os().flush();
    if (!os()) throw std::runtime_error("write failed: " + (path_.empty() ? "<stdout>" : path_));
  }

 private:
  std::ofstream file_;
  std::string path_;
};

struct ManifoldOpts {
  std::string kind = "pulse";
  int n = 256;
  double kappa = 1.0;
  double width = 0.05;
  int samples = 1000;
};

// Marks every option take-last so values merged in from --config are
// overridden by explicit flags, which are appended after them.
CLI::Option* ol(CLI::Option* opt) {
  return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_manifold_options(CLI::App* cmd, ManifoldOpts& o) {
  ol(cmd->add_option("--manifold", o.kind, "Manifold family: circle, pulse, or segment")
         ->check(CLI::IsMember({"circle", "pulse", "segment"})));
  ol(cmd->add_option("--n", o.n, "Ambient dimension"));
  ol(cmd->add_option("--kappa", o.kappa, "Circle radius"));
  ol(cmd->add_option("--width", o.width, "Pulse width parameter"));
  ol(cmd->add_option("--samples", o.samples, "Samples for characteristic estimation"));
}

mcs::ManifoldModel build_manifold(const ManifoldOpts& o, bool need_characteristics) {
  mcs::ManifoldModel m = [&] {
    if (o.kind == "circle") return mcs::circle_manifold(o.n, o.kappa);
    if (o.kind == "pulse") return mcs::pulse_manifold(o.n, o.width);
    if (o.kind == "segment") return mcs::line_segment_manifold(o.n);
    throw std::invalid_argument("unknown manifold kind: " + o.kind);
  }();
  if (need_characteristics && !m.has_characteristics()) {
    std::cerr << "estimating manifold characteristics from " << o.samples << " samples\n";
    m = m.with_characteristics(mcs::estimate_characteristics(m, o.samples));
    const auto& ch = m.characteristics();
    std::cerr << "tau=" << ch.tau << " volume=" << ch.volume << " regularity=" << ch.regularity
              << "\n";
  }
  return m;
}

// Pulls --config out of the raw arguments and expands the JSON object it
// names into flag tokens placed before the explicit flags, so the command
// line wins on conflicts. Keys are long option names without the dashes.
std::vector<std::string> apply_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config requires a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  nlohmann::json j;
  {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object of flag values");

  std::vector<std::string> merged;
  std::size_t k = 0;
  while (k < rest.size() && !rest[k].empty() && rest[k][0] != '-') merged.push_back(rest[k++]);
  for (const auto& [key, val] : j.items()) {
    if (key == "human") {  // the only pure switch
      if (val.is_boolean() && val.get<bool>()) merged.push_back("--human");
      continue;
    }
    merged.push_back("--" + key);
    if (val.is_string()) {
      merged.push_back(val.get<std::string>());
    } else if (val.is_boolean()) {
      merged.push_back(val.get<bool>() ? "1" : "0");
    } else {
      merged.push_back(val.dump());
    }
  }
  for (; k < rest.size(); ++k) merged.push_back(rest[k]);
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressive measurement and recovery toolkit for manifold-modeled signals"};
  app.require_subcommand(1);

  std::string out_path;
  const auto add_io_options = [&](CLI::App* cmd) {
    ol(cmd->add_option("--out", out_path, "Write data to this file instead of stdout"));
    cmd->add_flag_callback(
        "--human", [] { g_digits = 6; }, "Print 6 significant digits instead of 17");
  };

  // ---- embed: project a parameter sweep through one random operator ----
  ManifoldOpts embed_man;
  embed_man.kind = "pulse";
  embed_man.n = 1024;
  int embed_m = 3;
  std::uint64_t embed_seed = 0;
  int embed_points = 1024;
  auto* embed = app.add_subcommand(
      "embed", "Project a sweep of manifold points through a random orthoprojector");
  add_manifold_options(embed, embed_man);
  ol(embed->add_option("--m", embed_m, "Measurement rows"));
  ol(embed->add_option("--seed", embed_seed, "Seed for the operator draw"))->required();
  ol(embed->add_option("--points", embed_points, "Parameter samples in the sweep"));
  add_io_options(embed);
  embed->callback([&] {
    if (embed_points < 2) throw std::invalid_argument("embed: --points must be >= 2");
    const mcs::ManifoldModel man = build_manifold(embed_man, false);
    const mcs::Orthoprojector p = mcs::make_orthoprojector(embed_m, man.ambient_dim(), embed_seed);
    DataSink sink(out_path);
    std::ostream& os = sink.os();
    os << "theta";
    for (int j = 1; j <= embed_m; ++j) os << ",y" << j;
    os << '\n';
    const double lo = man.param_lo();
    const double span = man.param_span();
    const int denom = man.periodic() ? embed_points : embed_points - 1;
    for (int i = 0; i < embed_points; ++i) {
      const double theta = lo + span * static_cast<double>(i) / denom;
      const Eigen::VectorXd y = p.apply(man.point(theta));
      os << fmt(theta);
      for (Eigen::Index j = 0; j < y.size(); ++j) os << ',' << fmt(y[j]);
      os << '\n';
    }
    sink.finish();
  });

  // ---- recover: one seeded measure-and-recover round trip ----
  ManifoldOpts rec_man;
  int rec_m = 32;
  std::uint64_t rec_seed = 0;
  std::optional<double> rec_theta;
  double rec_noise = 0.0;
  double rec_offset = 0.0;
  int rec_grid = 1024;
  auto* recover = app.add_subcommand("recover", "Measure a signal and recover it from one draw");
  add_manifold_options(recover, rec_man);
  ol(recover->add_option("--m", rec_m, "Measurement rows"));
  ol(recover->add_option("--seed", rec_seed, "Seed for operator, signal, and noise"))->required();
  ol(recover->add_option("--theta", rec_theta, "True parameter (default: drawn from the seed)"));
  ol(recover->add_option("--noise", rec_noise, "Measurement noise norm"));
  ol(recover->add_option("--offset", rec_offset, "Off-manifold displacement of the signal"));
  ol(recover->add_option("--grid", rec_grid, "Grid density for the solver"));
  add_io_options(recover);
  recover->callback([&] {
    const mcs::ManifoldModel man = build_manifold(rec_man, false);
    mcs::SplitMix64 rng(mcs::derive_seed(rec_seed, 1));
    const double theta_true =
        rec_theta ? *rec_theta : rng.uniform(man.param_lo(), man.param_hi());
    Eigen::VectorXd x = man.point(theta_true);
    if (rec_offset > 0.0) x += rec_offset * mcs::random_normal_direction(man, theta_true, rng);
    const mcs::Orthoprojector p =
        mcs::make_orthoprojector(rec_m, man.ambient_dim(), mcs::derive_seed(rec_seed, 0));
    Eigen::VectorXd noise = Eigen::VectorXd::Zero(rec_m);
    if (rec_noise > 0.0) {
      mcs::SplitMix64 noise_rng(mcs::derive_seed(rec_seed, 2));
      noise = rec_noise * noise_rng.sphere_vector(rec_m);
    }
    const mcs::Measurement y = mcs::measure(p, x, noise);
    const mcs::RecoverySolution sol = mcs::recover_signal(y, p, man, rec_grid);
    const auto [theta_star, x_star] = mcs::full_data_optimum(x, man, rec_grid);

    DataSink sink(out_path);
    std::ostream& os = sink.os();
    os << "theta_true,theta_star,theta_hat,err_signal,err_model,err_noise,geo_err,residual\n"
       << fmt(theta_true) << ',' << fmt(theta_star) << ',' << fmt(sol.theta_hat) << ','
       << fmt((x - sol.x_hat).norm()) << ',' << fmt((x - x_star).norm()) << ','
       << fmt(y.noise_norm) << ',' << fmt(mcs::geodesic_distance(man, sol.theta_hat, theta_star))
       << ',' << fmt(sol.residual) << '\n';
    sink.finish();
  });

  // ---- estimate: data-driven manifold characteristics ----
  ManifoldOpts est_man;
  auto* estimate = app.add_subcommand("estimate", "Estimate manifold characteristics from samples");
  add_manifold_options(estimate, est_man);
  add_io_options(estimate);
  estimate->callback([&] {
    const mcs::ManifoldModel man = build_manifold(est_man, false);
    const mcs::Characteristics ch = mcs::estimate_characteristics(man, est_man.samples);
    DataSink sink(out_path);
    sink.os() << "tau,volume,regularity\n"
              << fmt(ch.tau) << ',' << fmt(ch.volume) << ',' << fmt(ch.regularity) << '\n';
    sink.finish();
  });

  // ---- bounds: closed-form evaluators ----
  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds");
  bounds->require_subcommand(1);

  int det_n = 4;
  int det_m = 1;
  double det_eps = 0.0;
  auto* det = bounds->add_subcommand("det", "Deterministic worst-case recovery ratio");
  ol(det->add_option("--n", det_n, "Ambient dimension"));
  ol(det->add_option("--m", det_m, "Measurement rows"));
  ol(det->add_option("--eps", det_eps, "Isometry defect in [0, 1)"));
  add_io_options(det);
  det->callback([&] {
    const mcs::DeterministicBound b = mcs::deterministic_bound_checked(det_n, det_m, det_eps);
    if (b.radicand_clamped) std::cerr << "note: radicand clamped at zero\n";
    DataSink sink(out_path);
    sink.os() << fmt(b.value) << '\n';
    sink.finish();
  });

  struct BoundOpts {
    int n = 1024;
    int m = 32;
    int k = 1;
    double eps = 0.5;
    double rho = 0.1;
    double tau = 1.0;
    double volume = 6.283185307179586;
    double regularity = 0.51;
    double model_error = 0.0;
    double noise = 0.0;
  };
  BoundOpts bo;
  const auto add_bound_options = [&](CLI::App* cmd) {
    ol(cmd->add_option("--n", bo.n, "Ambient dimension"));
    ol(cmd->add_option("--m", bo.m, "Measurement rows"));
    ol(cmd->add_option("--k", bo.k, "Intrinsic dimension"));
    ol(cmd->add_option("--eps", bo.eps, "Isometry defect"));
    ol(cmd->add_option("--rho", bo.rho, "Failure probability budget"));
    ol(cmd->add_option("--tau", bo.tau, "Condition number"));
    ol(cmd->add_option("--volume", bo.volume, "Manifold volume"));
    ol(cmd->add_option("--regularity", bo.regularity, "Regularity factor"));
    ol(cmd->add_option("--model-error", bo.model_error, "Distance from the signal to the model"));
    ol(cmd->add_option("--noise", bo.noise, "Measurement noise norm"));
    add_io_options(cmd);
  };
  const auto fill_inputs = [&] {
    mcs::BoundInputs bi;
    bi.ambient_dim = bo.n;
    bi.meas_dim = bo.m;
    bi.epsilon = bo.eps;
    bi.rho = bo.rho;
    bi.tau = bo.tau;
    bi.volume = bo.volume;
    bi.regularity = bo.regularity;
    bi.intrinsic_dim = bo.k;
    bi.model_error = bo.model_error;
    bi.noise_norm = bo.noise;
    return bi;
  };
  const auto print_report = [&](const mcs::BoundReport& rep) {
    DataSink sink(out_path);
    std::ostream& os = sink.os();
    os << "value,precondition";
    for (const auto& t : rep.terms) os << ',' << t.name;
    os << '\n' << fmt(rep.value) << ',' << (rep.precondition_met ? '1' : '0');
    for (const auto& t : rep.terms) os << ',' << fmt(t.value);
    os << '\n';
    sink.finish();
  };

  auto* rec_bound = bounds->add_subcommand("rec", "Signal recovery error bound");
  add_bound_options(rec_bound);
  rec_bound->callback([&] { print_report(mcs::recovery_bound(fill_inputs())); });

  auto* par_bound = bounds->add_subcommand("par", "Parameter estimation error bound");
  add_bound_options(par_bound);
  par_bound->callback([&] { print_report(mcs::parameter_bound(fill_inputs())); });

  auto* meas = bounds->add_subcommand("meas", "Required number of measurements");
  double meas_c = 1.0;
  add_bound_options(meas);
  ol(meas->add_option("--c", meas_c, "Leading constant"));
  meas->callback([&] {
    const int m = mcs::required_measurements(bo.k, bo.n, bo.volume, bo.regularity, bo.tau, bo.eps,
                                             bo.rho, meas_c);
    DataSink sink(out_path);
    sink.os() << m << '\n';
    sink.finish();
  });

  auto* geo = bounds->add_subcommand("geo", "Geodesic bound from a Euclidean distance");
  double geo_e = 0.0;
  double geo_tau = 1.0;
  ol(geo->add_option("--e", geo_e, "Euclidean distance"));
  ol(geo->add_option("--tau", geo_tau, "Condition number"));
  add_io_options(geo);
  geo->callback([&] {
    DataSink sink(out_path);
    sink.os() << fmt(mcs::euclidean_to_geodesic(geo_e, geo_tau)) << '\n';
    sink.finish();
  });

  auto* cover_bound = bounds->add_subcommand("cover", "Covering number upper bound");
  double cb_t = 0.1;
  add_bound_options(cover_bound);
  ol(cover_bound->add_option("--t", cb_t, "Covering resolution"));
  cover_bound->callback([&] {
    DataSink sink(out_path);
    sink.os() << fmt(mcs::covering_bound(bo.k, bo.volume, bo.regularity, cb_t)) << '\n';
    sink.finish();
  });

  // ---- adversarial: worst-case construction and tightness check ----
  int adv_n = 4;
  std::optional<double> adv_cos_gamma;
  std::optional<double> adv_gamma;
  int adv_grid = 2048;
  auto* adversarial =
      app.add_subcommand("adversarial", "Build the worst-case instance and verify tightness");
  ol(adversarial->add_option("--n", adv_n, "Ambient dimension"))->required();
  auto* opt_cg = ol(adversarial->add_option("--cos-gamma", adv_cos_gamma,
                                            "Cosine of the row angle, in (0, 1/sqrt(N))"));
  auto* opt_g = ol(adversarial->add_option("--gamma", adv_gamma, "Row angle in [0, pi/2)"));
  opt_cg->excludes(opt_g);
  ol(adversarial->add_option("--grid", adv_grid, "Grid density for the recovery run"));
  add_io_options(adversarial);
  adversarial->callback([&] {
    if (!adv_cos_gamma && !adv_gamma) {
      throw std::invalid_argument("adversarial: provide --cos-gamma or --gamma");
    }
    const double gamma = adv_gamma ? *adv_gamma : std::acos(*adv_cos_gamma);
    const mcs::AdversarialInstance inst = mcs::build_adversarial(adv_n, gamma);
    const mcs::TightnessResult tr = mcs::verify_tightness(inst, adv_grid);
    DataSink sink(out_path);
    sink.os() << "achieved=" << fmt(tr.achieved) << '\n'
              << "bound=" << fmt(tr.bound) << '\n'
              << "ratio=" << fmt(tr.achieved / tr.bound) << '\n'
              << "epsilon=" << fmt(inst.epsilon) << '\n';
    sink.finish();
  });

  // ---- montecarlo: seeded experiment sweeps ----
  ManifoldOpts mc_man;
  mc_man.kind = "circle";
  mc_man.n = 64;
  std::string mc_kind = "recover";
  std::string mc_format = "csv";
  int mc_m = 0;
  double mc_c = 1.0;
  double mc_eps = 0.5;
  double mc_rho = 0.1;
  double mc_noise = 0.0;
  double mc_offset = 0.0;
  int mc_trials = 100;
  std::uint64_t mc_seed = 0;
  int mc_grid = 1024;
  int mc_fix_signal = 1;
  std::optional<double> mc_theta;
  int mc_points = 64;
  int mc_jobs = 0;
  auto* montecarlo = app.add_subcommand("montecarlo", "Run a seeded certification experiment");
  add_manifold_options(montecarlo, mc_man);
  ol(montecarlo->add_option("--kind", mc_kind, "Experiment kind: recover or embed")
         ->check(CLI::IsMember({"recover", "embed"})));
  ol(montecarlo->add_option("--format", mc_format, "Record format: csv or json")
         ->check(CLI::IsMember({"csv", "json"})));
  ol(montecarlo->add_option("--m", mc_m, "Measurement rows (0 = size automatically)"));
  ol(montecarlo->add_option("--c", mc_c, "Constant used when sizing automatically"));
  ol(montecarlo->add_option("--eps", mc_eps, "Isometry defect target"));
  ol(montecarlo->add_option("--rho", mc_rho, "Failure probability budget"));
  ol(montecarlo->add_option("--noise", mc_noise, "Measurement noise norm"));
  ol(montecarlo->add_option("--offset", mc_offset, "Off-manifold displacement"));
  ol(montecarlo->add_option("--trials", mc_trials, "Number of trials"));
  ol(montecarlo->add_option("--seed", mc_seed, "Base seed for all trial streams"))->required();
  ol(montecarlo->add_option("--grid", mc_grid, "Grid density for the solver"));
  ol(montecarlo->add_option("--fix-signal", mc_fix_signal, "1 = share the signal across trials"));
  ol(montecarlo->add_option("--theta", mc_theta, "Pin the true parameter"));
  ol(montecarlo->add_option("--points", mc_points, "Manifold points per distortion check"));
  ol(montecarlo->add_option("--jobs", mc_jobs, "Worker threads (0 = all cores)"));
  add_io_options(montecarlo);
  montecarlo->callback([&] {
    const mcs::ManifoldModel man = build_manifold(mc_man, true);
    mcs::ExperimentConfig cfg(man);
    cfg.meas_dim = mc_m;
    cfg.constant_c = mc_c;
    cfg.epsilon = mc_eps;
    cfg.rho = mc_rho;
    cfg.noise_norm = mc_noise;
    cfg.offset = mc_offset;
    cfg.trials = mc_trials;
    cfg.base_seed = mc_seed;
    cfg.grid_density = mc_grid;
    cfg.fix_signal = mc_fix_signal != 0;
    cfg.fixed_theta = mc_theta;
    cfg.embed_points = mc_points;
    cfg.jobs = mc_jobs;

    DataSink sink(out_path);
    if (mc_kind == "embed") {
      const mcs::EmbeddingExperimentResult res = mcs::run_embedding_experiment(cfg);
      if (mc_format == "csv") {
        sink.os() << mcs::embedding_records_to_csv(res.records);
      } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : res.records) {
          arr.push_back({{"seed", r.seed},
                         {"empirical_eps", r.empirical_eps},
                         {"success", r.success}});
        }
        sink.os() << arr.dump(2) << '\n';
      }
      const auto& s = res.summary;
      std::cerr << "m=" << s.meas_dim << " trials=" << s.trials << " successes=" << s.successes
                << " rate=" << s.success_rate << " wilson=" << s.wilson_lower
                << " target=" << s.target_rate << '\n';
    } else {
      const mcs::RecoveryExperimentResult res = mcs::run_recovery_experiment(cfg);
      sink.os() << (mc_format == "csv" ? mcs::records_to_csv(res.records)
                                       : mcs::records_to_json(res.records));
      const auto& s = res.summary;
      std::cerr << "m=" << s.meas_dim << " trials=" << s.trials << " satisfied3=" << s.satisfied3
                << " wilson3=" << s.satisfied3_wilson << " precondition=" << s.precondition_count
                << " satisfied4=" << s.satisfied4 << " wilson4=" << s.satisfied4_wilson
                << " target=" << s.target_rate << '\n';
    }
    sink.finish();
  });

  // ---- calibrate: resolve the sizing constant empirically ----
  ManifoldOpts cal_man;
  cal_man.kind = "circle";
  cal_man.n = 64;
  double cal_eps = 0.5;
  double cal_rho = 0.1;
  double cal_target = 0.9;
  int cal_trials = 200;
  std::uint64_t cal_seed = 0;
  int cal_points = 64;
  int cal_jobs = 0;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the measurement-count constant");
  add_manifold_options(calibrate, cal_man);
  ol(calibrate->add_option("--eps", cal_eps, "Isometry defect target"));
  ol(calibrate->add_option("--rho", cal_rho, "Failure probability budget"));
  ol(calibrate->add_option("--target", cal_target, "Wilson-adjusted success rate to reach"));
  ol(calibrate->add_option("--trials", cal_trials, "Seeds per evaluation"));
  ol(calibrate->add_option("--seed", cal_seed, "Base seed shared by all evaluations"))->required();
  ol(calibrate->add_option("--points", cal_points, "Manifold points per distortion check"));
  ol(calibrate->add_option("--jobs", cal_jobs, "Worker threads (0 = all cores)"));
  add_io_options(calibrate);
  calibrate->callback([&] {
    const mcs::ManifoldModel man = build_manifold(cal_man, true);
    const double c = mcs::calibrate_constant(man, cal_eps, cal_rho, cal_target, cal_trials,
                                             cal_seed, cal_points, cal_jobs);
    const auto& ch = man.characteristics();
    const int m = mcs::required_measurements(man.intrinsic_dim(), man.ambient_dim(), ch.volume,
                                             ch.regularity, ch.tau, cal_eps, cal_rho, c);
    std::cerr << "calibrated c=" << c << " m=" << m << '\n';
    DataSink sink(out_path);
    sink.os() << fmt(c) << '\n';
    sink.finish();
  });

  // ---- cover: geodesic covering anchors ----
  ManifoldOpts cov_man;
  cov_man.kind = "circle";
  cov_man.n = 4;
  double cov_t = 0.1;
  auto* cover = app.add_subcommand("cover", "Compute a geodesic covering of the manifold");
  add_manifold_options(cover, cov_man);
  ol(cover->add_option("--t", cov_t, "Covering resolution"))->required();
  add_io_options(cover);
  cover->callback([&] {
    const mcs::ManifoldModel man = build_manifold(cov_man, false);
    const mcs::CoveringSet cs = mcs::greedy_cover(man, cov_t);
    std::cerr << "anchors=" << cs.anchors.size() << " resolution=" << cs.resolution << '\n';
    DataSink sink(out_path);
    std::ostream& os = sink.os();
    os << "theta\n";
    for (double a : cs.anchors) os << fmt(a) << '\n';
    sink.finish();
  });

  std::vector<std::string> raw(argv + 1, argv + argc);
  try {
    const std::vector<std::string> tokens = apply_config(raw);
    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const auto& t : tokens) cargv.push_back(t.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
