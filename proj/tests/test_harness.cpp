#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <mcs/harness.hpp>

namespace {

mcs::ExperimentConfig small_recovery_config() {
  mcs::ExperimentConfig cfg(mcs::circle_manifold(32, 1.0));
  cfg.meas_dim = 8;
  cfg.epsilon = 0.5;
  cfg.rho = 0.1;
  cfg.noise_norm = 0.05;
  cfg.offset = 0.02;
  cfg.trials = 20;
  cfg.base_seed = 777;
  cfg.grid_density = 512;
  cfg.embed_points = 48;
  cfg.jobs = 1;
  return cfg;
}

}  // namespace

TEST_CASE("wilson lower bound matches frozen decision thresholds") {
  // 187/200 is the smallest success count whose adjusted rate clears 0.9.
  CHECK(mcs::wilson_lower_bound(187, 200) >= 0.9);
  CHECK(mcs::wilson_lower_bound(186, 200) < 0.9);
  // Same boundary at 500 trials.
  CHECK(mcs::wilson_lower_bound(462, 500) >= 0.9);
  CHECK(mcs::wilson_lower_bound(461, 500) < 0.9);
  CHECK(mcs::wilson_lower_bound(461, 500) == Catch::Approx(0.8999225).margin(5e-6));

  CHECK(mcs::wilson_lower_bound(0, 0) == 0.0);
  CHECK(mcs::wilson_lower_bound(0, 100) == 0.0);
  const double all = mcs::wilson_lower_bound(100, 100);
  CHECK(all > 0.9);
  CHECK(all < 1.0);
  // Monotone in the success count.
  for (int k = 1; k <= 200; ++k) {
    REQUIRE(mcs::wilson_lower_bound(k, 200) > mcs::wilson_lower_bound(k - 1, 200));
  }
  CHECK_THROWS_AS(mcs::wilson_lower_bound(-1, 10), std::invalid_argument);
  CHECK_THROWS_AS(mcs::wilson_lower_bound(11, 10), std::invalid_argument);
}

TEST_CASE("experiment config validation rejects bad settings") {
  const auto base = small_recovery_config;
  {
    auto cfg = base();
    cfg.trials = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.epsilon = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.rho = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.rho = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.noise_norm = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.offset = -1e-9;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.grid_density = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.meas_dim = 33;  // exceeds the ambient dimension
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.embed_points = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    // Interval domains reject out-of-range pins; periodic ones wrap instead.
    mcs::ExperimentConfig cfg(mcs::pulse_manifold(32, 0.05));
    cfg.fixed_theta = 7.0;  // outside [0, 1]
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  {
    auto cfg = base();
    cfg.fixed_theta = 7.0;  // wraps on the circle
    CHECK_NOTHROW(cfg.validate());
  }
  CHECK_NOTHROW(base().validate());
}

TEST_CASE("square embedding succeeds in every trial") {
  mcs::ExperimentConfig cfg(mcs::circle_manifold(16, 1.0));
  cfg.meas_dim = 16;
  cfg.epsilon = 0.5;
  cfg.rho = 0.1;
  cfg.trials = 50;
  cfg.base_seed = 42;
  cfg.embed_points = 64;
  cfg.jobs = 2;

  const auto res = mcs::run_embedding_experiment(cfg);
  REQUIRE(res.records.size() == 50);
  REQUIRE(res.summary.trials == 50);
  REQUIRE(res.summary.meas_dim == 16);
  for (const auto& r : res.records) {
    REQUIRE(r.success);
    REQUIRE(r.empirical_eps < 1e-10);
  }
  CHECK(res.summary.successes == 50);
  CHECK(res.summary.success_rate == 1.0);
  CHECK(res.summary.wilson_lower == mcs::wilson_lower_bound(50, 50));
  CHECK(res.summary.wilson_lower >= 0.9);
  CHECK(res.summary.target_rate == Catch::Approx(0.9).epsilon(1e-12));

  // Trial seeds are all distinct.
  std::set<std::uint64_t> seeds;
  for (const auto& r : res.records) seeds.insert(r.seed);
  CHECK(seeds.size() == res.records.size());
}

TEST_CASE("embedding success count does not degrade with more measurements") {
  mcs::ExperimentConfig cfg(mcs::circle_manifold(64, 1.0));
  cfg.epsilon = 0.5;
  cfg.rho = 0.1;
  cfg.trials = 60;
  cfg.base_seed = 9001;
  cfg.embed_points = 64;
  cfg.jobs = 0;

  cfg.meas_dim = 2;
  const int succ_small = mcs::run_embedding_experiment(cfg).summary.successes;
  cfg.meas_dim = 16;
  const int succ_large = mcs::run_embedding_experiment(cfg).summary.successes;

  CHECK(succ_large >= succ_small);
  // Sixteen rows comfortably embed a 64-dimensional circle at eps = 0.5.
  CHECK(succ_large >= 50);
}

TEST_CASE("embedding experiment demands enough pairs") {
  mcs::ExperimentConfig cfg(mcs::circle_manifold(16, 1.0));
  cfg.meas_dim = 8;
  cfg.trials = 5;
  cfg.embed_points = 10;  // only 45 pairs
  CHECK_THROWS_AS(mcs::run_embedding_experiment(cfg), std::invalid_argument);
}

TEST_CASE("recovery experiment is deterministic and independent of job count") {
  auto cfg = small_recovery_config();
  cfg.jobs = 1;
  const auto serial = mcs::run_recovery_experiment(cfg);
  cfg.jobs = 4;
  const auto parallel = mcs::run_recovery_experiment(cfg);
  const auto parallel_again = mcs::run_recovery_experiment(cfg);

  const std::string a = mcs::records_to_csv(serial.records);
  const std::string b = mcs::records_to_csv(parallel.records);
  const std::string c = mcs::records_to_csv(parallel_again.records);
  REQUIRE(a == b);
  REQUIRE(b == c);
  CHECK(serial.summary.satisfied3 == parallel.summary.satisfied3);
  CHECK(serial.summary.precondition_count == parallel.summary.precondition_count);
  CHECK(serial.summary.satisfied4 == parallel.summary.satisfied4);
}

TEST_CASE("fixed signals are shared across trials and redrawn otherwise") {
  auto cfg = small_recovery_config();
  cfg.fix_signal = true;
  const auto fixed = mcs::run_recovery_experiment(cfg);
  for (const auto& r : fixed.records) {
    REQUIRE(r.theta_true == fixed.records[0].theta_true);
    REQUIRE(r.err_model == fixed.records[0].err_model);
    REQUIRE(r.theta_star == fixed.records[0].theta_star);
  }

  cfg.fix_signal = false;
  const auto redrawn = mcs::run_recovery_experiment(cfg);
  std::set<double> thetas;
  for (const auto& r : redrawn.records) thetas.insert(r.theta_true);
  CHECK(thetas.size() > 1);

  cfg.fix_signal = true;
  cfg.fixed_theta = 1.25;
  cfg.offset = 0.0;
  const auto pinned = mcs::run_recovery_experiment(cfg);
  for (const auto& r : pinned.records) {
    REQUIRE(r.theta_true == 1.25);
    REQUIRE(r.err_model <= 1e-8);  // on-manifold signal
  }
}

TEST_CASE("offset and noise norms are reproduced in the records") {
  auto cfg = small_recovery_config();
  cfg.offset = 0.01;
  cfg.noise_norm = 0.003;
  const auto res = mcs::run_recovery_experiment(cfg);
  for (const auto& r : res.records) {
    // A unit normal displacement of the circle moves the point exactly
    // offset away from the model.
    REQUIRE(r.err_model == Catch::Approx(0.01).epsilon(1e-2));
    REQUIRE(r.err_noise == Catch::Approx(0.003).epsilon(1e-12));
  }
}

TEST_CASE("recorded bounds and flags are recomputable from the inputs") {
  auto cfg = small_recovery_config();
  const auto res = mcs::run_recovery_experiment(cfg);
  const auto& ch = cfg.manifold.characteristics();
  for (const auto& r : res.records) {
    mcs::BoundInputs bi;
    bi.ambient_dim = cfg.manifold.ambient_dim();
    bi.meas_dim = cfg.meas_dim;
    bi.epsilon = cfg.epsilon;
    bi.rho = cfg.rho;
    bi.tau = ch.tau;
    bi.volume = ch.volume;
    bi.regularity = ch.regularity;
    bi.intrinsic_dim = cfg.manifold.intrinsic_dim();
    bi.model_error = r.err_model;
    bi.noise_norm = r.err_noise;
    const auto b3 = mcs::recovery_bound(bi);
    const auto b4 = mcs::parameter_bound(bi);
    REQUIRE(r.bound3_value == b3.value);
    REQUIRE(r.bound4_value == b4.value);
    REQUIRE(r.bound4_precondition == b4.precondition_met);
    REQUIRE(r.satisfied3 == (r.err_signal <= r.bound3_value));
    REQUIRE(r.satisfied4.has_value() == r.bound4_precondition);
    if (r.satisfied4) {
      REQUIRE(*r.satisfied4 == (r.geo_err <= r.bound4_value));
    }
    REQUIRE(r.geo_err ==
            mcs::geodesic_distance(cfg.manifold, r.theta_hat, r.theta_star));
  }
}

TEST_CASE("summary statistics match a recount from the serialized records") {
  auto cfg = small_recovery_config();
  cfg.trials = 30;
  const auto res = mcs::run_recovery_experiment(cfg);
  const auto parsed = mcs::records_from_csv(mcs::records_to_csv(res.records));
  REQUIRE(parsed.size() == 30);

  int sat3 = 0;
  int pre = 0;
  int sat4 = 0;
  for (const auto& r : parsed) {
    sat3 += r.satisfied3 ? 1 : 0;
    if (r.bound4_precondition) {
      ++pre;
      sat4 += (r.satisfied4 && *r.satisfied4) ? 1 : 0;
    }
  }
  CHECK(res.summary.trials == 30);
  CHECK(res.summary.meas_dim == 8);
  CHECK(res.summary.satisfied3 == sat3);
  CHECK(res.summary.precondition_count == pre);
  CHECK(res.summary.satisfied4 == sat4);
  CHECK(res.summary.satisfied3_rate == static_cast<double>(sat3) / 30);
  CHECK(res.summary.satisfied3_wilson == mcs::wilson_lower_bound(sat3, 30));
  if (pre > 0) {
    CHECK(res.summary.satisfied4_rate == static_cast<double>(sat4) / pre);
    CHECK(res.summary.satisfied4_wilson == mcs::wilson_lower_bound(sat4, pre));
  }
}

TEST_CASE("trial records survive csv and json round trips bit for bit") {
  auto cfg = small_recovery_config();
  cfg.trials = 12;
  auto records = mcs::run_recovery_experiment(cfg).records;

  // Add hand-built edge cases: an undefined satisfied4 and an explicit false.
  mcs::TrialRecord edge;
  edge.seed = 18446744073709551615ULL;  // largest 64-bit seed
  edge.theta_true = 0.1;
  edge.theta_star = 0.30000000000000004;
  edge.theta_hat = 1e-308;
  edge.err_signal = 12345.678911121314;
  edge.err_model = 0.0;
  edge.err_noise = 2.2250738585072014e-308;
  edge.geo_err = 1.7976931348623157e308;
  edge.bound3_value = 3.0;
  edge.bound4_value = 4.0;
  edge.bound4_precondition = false;
  edge.satisfied3 = false;
  edge.satisfied4.reset();
  edge.empirical_eps = 0.25;
  records.push_back(edge);
  edge.seed = 7;
  edge.bound4_precondition = true;
  edge.satisfied4 = false;
  records.push_back(edge);

  const std::string csv = mcs::records_to_csv(records);
  const auto from_csv = mcs::records_from_csv(csv);
  REQUIRE(from_csv.size() == records.size());
  REQUIRE(mcs::records_to_csv(from_csv) == csv);

  const std::string json = mcs::records_to_json(records);
  const auto from_json = mcs::records_from_json(json);
  REQUIRE(from_json.size() == records.size());
  REQUIRE(mcs::records_to_json(from_json) == json);

  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(from_csv[i].seed == records[i].seed);
    REQUIRE(from_csv[i].theta_true == records[i].theta_true);
    REQUIRE(from_csv[i].theta_star == records[i].theta_star);
    REQUIRE(from_csv[i].theta_hat == records[i].theta_hat);
    REQUIRE(from_csv[i].err_signal == records[i].err_signal);
    REQUIRE(from_csv[i].err_model == records[i].err_model);
    REQUIRE(from_csv[i].err_noise == records[i].err_noise);
    REQUIRE(from_csv[i].geo_err == records[i].geo_err);
    REQUIRE(from_csv[i].bound3_value == records[i].bound3_value);
    REQUIRE(from_csv[i].bound4_value == records[i].bound4_value);
    REQUIRE(from_csv[i].bound4_precondition == records[i].bound4_precondition);
    REQUIRE(from_csv[i].satisfied3 == records[i].satisfied3);
    REQUIRE(from_csv[i].satisfied4 == records[i].satisfied4);
    REQUIRE(from_csv[i].empirical_eps == records[i].empirical_eps);
    REQUIRE(from_json[i].seed == records[i].seed);
    REQUIRE(from_json[i].theta_hat == records[i].theta_hat);
    REQUIRE(from_json[i].satisfied4 == records[i].satisfied4);
  }
}

TEST_CASE("csv output shape matches the documented layout") {
  auto cfg = small_recovery_config();
  const auto res = mcs::run_recovery_experiment(cfg);
  const std::string csv = mcs::records_to_csv(res.records);

  std::vector<std::string> lines;
  std::string cur;
  for (char c : csv) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  REQUIRE(cur.empty());  // trailing newline
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == mcs::trial_record_csv_header());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    int commas = 0;
    for (char c : lines[i]) {
      REQUIRE(c != '"');
      REQUIRE(c != ' ');
      if (c == ',') ++commas;
    }
    REQUIRE(commas == 13);  // 14 fields
  }

  CHECK(mcs::records_to_csv({}) == std::string(mcs::trial_record_csv_header()) + "\n");
  CHECK(mcs::records_from_csv(std::string(mcs::trial_record_csv_header()) + "\n").empty());
  CHECK_THROWS_AS(mcs::records_from_csv(""), std::runtime_error);
  CHECK_THROWS_AS(mcs::records_from_csv("a,b\n1,2\n"), std::runtime_error);
}

TEST_CASE("record files round trip through disk") {
  auto cfg = small_recovery_config();
  cfg.trials = 6;
  const auto res = mcs::run_recovery_experiment(cfg);

  const std::string csv_path = "harness_roundtrip_tmp.csv";
  mcs::write_records(res.records, csv_path, mcs::RecordFormat::Csv);
  CHECK(mcs::read_text_file(csv_path) == mcs::records_to_csv(res.records));

  const std::string json_path = "harness_roundtrip_tmp.json";
  mcs::write_records(res.records, json_path, mcs::RecordFormat::Json);
  CHECK(mcs::records_from_json(mcs::read_text_file(json_path)).size() == 6);

  std::remove(csv_path.c_str());
  std::remove(json_path.c_str());
  CHECK_THROWS_AS(mcs::read_text_file("surely/does/not/exist.csv"), std::runtime_error);
}

TEST_CASE("embedding records serialize to the compact csv layout") {
  std::vector<mcs::EmbeddingRecord> recs(2);
  recs[0] = {11, 0.25, true};
  recs[1] = {12, 0.75, false};
  CHECK(mcs::embedding_records_to_csv(recs) ==
        "seed,empirical_eps,success\n11,0.25,1\n12,0.75,0\n");
}

TEST_CASE("constant calibration is deterministic and reproduces its target") {
  const auto circle = mcs::circle_manifold(16, 1.0);
  const double c1 = mcs::calibrate_constant(circle, 0.5, 0.1, 0.9, 60, 0x636c6962ULL, 48, 0);
  const double c2 = mcs::calibrate_constant(circle, 0.5, 0.1, 0.9, 60, 0x636c6962ULL, 48, 2);
  REQUIRE(c1 == c2);
  REQUIRE(c1 >= 0.1);
  REQUIRE(c1 <= 100.0);

  // Holdout: rerunning the embedding experiment at the calibrated constant
  // clears the target on the same seed set.
  mcs::ExperimentConfig cfg(circle);
  cfg.epsilon = 0.5;
  cfg.rho = 0.1;
  cfg.trials = 60;
  cfg.base_seed = 0x636c6962ULL;
  cfg.embed_points = 48;
  cfg.constant_c = c1;
  CHECK(mcs::run_embedding_experiment(cfg).summary.wilson_lower >= 0.9);
}

TEST_CASE("calibration reports failure when the target is unreachable") {
  const auto circle = mcs::circle_manifold(16, 1.0);
  // With 60 trials the adjusted rate cannot exceed ~0.957, so 0.999 fails
  // even for a square operator.
  CHECK_THROWS_AS(mcs::calibrate_constant(circle, 0.5, 0.1, 0.999, 60, 1, 48, 0),
                  std::runtime_error);
  CHECK_THROWS_AS(mcs::calibrate_constant(circle, 0.5, 0.1, 0.0, 60, 1, 48, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mcs::calibrate_constant(circle, 0.5, 0.1, 1.0, 60, 1, 48, 0),
                  std::invalid_argument);
}

TEST_CASE("parallel dispatch covers every index and propagates exceptions") {
  std::vector<std::atomic<int>> hits(64);
  for (auto& h : hits) h.store(0);
  mcs::detail::parallel_for(64, 3, [&](int i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) REQUIRE(h.load() == 1);

  CHECK_THROWS_AS(mcs::detail::parallel_for(
                      16, 4,
                      [&](int i) {
                        if (i == 7) throw std::runtime_error("boom");
                      }),
                  std::runtime_error);
  CHECK_THROWS_AS(mcs::detail::parallel_for(
                      4, 1,
                      [&](int i) {
                        if (i == 2) throw std::runtime_error("boom");
                      }),
                  std::runtime_error);
}
