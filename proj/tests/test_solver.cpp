#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sarahbb/solver.hpp"
#include "test_support.hpp"

using namespace sarahbb;
using namespace testsupport;

using testsupport::traces_identical;

namespace {

Dataset identity_quadratic() {
  // single ridge example x=[1], y=0: P(w) = w^2/2, grad P(w) = w
  std::vector<Example> rows(1);
  rows[0].features = SparseVector(1, {0}, {1.0});
  rows[0].label = 0.0;
  return Dataset("quad", 1, std::move(rows));
}

}  // namespace

TEST_CASE("sample_without_replacement basics") {
  Rng rng(1);
  auto full = sample_without_replacement(5, 5, rng);
  CHECK(full == std::vector<std::uint32_t>{0, 1, 2, 3, 4});

  auto one = sample_without_replacement(1, 1, rng);
  CHECK(one == std::vector<std::uint32_t>{0});

  CHECK_THROWS_AS(sample_without_replacement(3, 4, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_without_replacement(3, 0, rng),
                  std::invalid_argument);

  for (int trial = 0; trial < 100; ++trial) {
    auto s = sample_without_replacement(20, 7, rng);
    CHECK(s.size() == 7);
    for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j - 1] < s[j]);
    CHECK(s.back() < 20);
  }
}

TEST_CASE("sampling marginals are uniform (Monte Carlo)") {
  // n=10, k=3: inclusion probability of each index is 0.3
  Rng rng(99);
  const int draws = 100000;
  std::vector<int> hits(10, 0);
  for (int t = 0; t < draws; ++t)
    for (std::uint32_t i : sample_without_replacement(10, 3, rng)) ++hits[i];
  for (int i = 0; i < 10; ++i) {
    double p = static_cast<double>(hits[i]) / draws;
    CHECK(std::abs(p - 0.3) <= 0.01);
  }

  // exercise the large-k path too (k > 64)
  std::vector<int> hits2(200, 0);
  const int draws2 = 20000;
  for (int t = 0; t < draws2; ++t)
    for (std::uint32_t i : sample_without_replacement(200, 100, rng))
      ++hits2[i];
  for (int i = 0; i < 200; ++i) {
    double p = static_cast<double>(hits2[i]) / draws2;
    CHECK(std::abs(p - 0.5) <= 0.02);
  }
}

TEST_CASE("sarah estimator laws") {
  Dataset ds = small_dataset(6, 4);
  LogisticL2 obj(ds, 0.05);
  Rng rng(3);
  DenseVector w_prev = random_dense(4, rng, 0.3);
  DenseVector w_k = random_dense(4, rng, 0.3);
  DenseVector v_prev = random_dense(4, rng, 0.2);

  SUBCASE("full index set collapses to the exact gradient") {
    std::vector<std::uint32_t> all{0, 1, 2, 3, 4, 5};
    DenseVector v = sarah_estimator_update(v_prev, obj, all, w_k, w_prev);
    CHECK(v == obj.full_gradient(w_k));
  }

  SUBCASE("repeated iterate returns v_prev bit-exactly") {
    std::vector<std::uint32_t> S{1, 4};
    DenseVector v = sarah_estimator_update(v_prev, obj, S, w_k, w_k);
    CHECK(v == v_prev);
  }

  SUBCASE("conditional mean over all subsets (enumeration oracle)") {
    auto subsets = all_subsets(6, 2);
    REQUIRE(subsets.size() == 15);
    DenseVector mean(4, 0.0);
    for (const auto& S : subsets) {
      DenseVector v = sarah_estimator_update(v_prev, obj, S, w_k, w_prev);
      for (std::size_t j = 0; j < 4; ++j) mean[j] += v[j];
    }
    for (double& x : mean) x /= 15.0;
    DenseVector want = obj.full_gradient(w_k);
    DenseVector g_prev = obj.full_gradient(w_prev);
    for (std::size_t j = 0; j < 4; ++j) want[j] += v_prev[j] - g_prev[j];
    CHECK(max_rel_err(mean, want) <= 1e-12);
  }

  SUBCASE("costs exactly 2|S| component evaluations") {
    EvalCounter c;
    std::vector<std::uint32_t> S{0, 2, 5};
    sarah_estimator_update(v_prev, obj, S, w_k, w_prev, &c);
    CHECK(c.component_grad_evals == 6);
  }
}

TEST_CASE("svrg estimator laws") {
  Dataset ds = small_dataset(6, 4);
  LogisticL2 obj(ds, 0.05);
  Rng rng(4);
  DenseVector snapshot = random_dense(4, rng, 0.3);
  DenseVector w_k = random_dense(4, rng, 0.3);
  DenseVector fullgrad = obj.full_gradient(snapshot);

  SUBCASE("at the snapshot every subset cancels exactly") {
    for (const auto& S : all_subsets(6, 2)) {
      DenseVector v = svrg_estimator(obj, S, snapshot, snapshot, fullgrad);
      CHECK(v == fullgrad);
    }
  }

  SUBCASE("full index set gives the exact gradient") {
    std::vector<std::uint32_t> all{0, 1, 2, 3, 4, 5};
    CHECK(svrg_estimator(obj, all, w_k, snapshot, fullgrad) ==
          obj.full_gradient(w_k));
  }

  SUBCASE("unbiasedness over all subsets (enumeration oracle)") {
    auto subsets = all_subsets(6, 2);
    DenseVector mean(4, 0.0);
    for (const auto& S : subsets) {
      DenseVector v = svrg_estimator(obj, S, w_k, snapshot, fullgrad);
      for (std::size_t j = 0; j < 4; ++j) mean[j] += v[j];
    }
    for (double& x : mean) x /= 15.0;
    CHECK(max_rel_err(mean, obj.full_gradient(w_k)) <= 1e-12);
  }
}

TEST_CASE("determinism: identical config and seed give identical traces") {
  Dataset ds = small_dataset(40, 5);
  LogisticL2 obj(ds, 0.05);

  auto check_method = [&](SolverConfig cfg) {
    RunTrace a = run_solver(obj, cfg);
    RunTrace b = run_solver(obj, cfg);
    CHECK(traces_identical(a, b));
    cfg.seed += 1;
    RunTrace c = run_solver(obj, cfg);
    CHECK_FALSE(traces_identical(a, c));
  };

  SolverConfig cfg;
  cfg.m = 12;
  cfg.b = 3;
  cfg.outer_count = 3;
  cfg.seed = 7;

  cfg.method = Method::mb_sarah_rbb;
  cfg.b_H = 5;
  cfg.step = RbbStep{0.1, 0.1, {}};
  check_method(cfg);

  cfg.method = Method::ms2gd_rbb;
  check_method(cfg);

  cfg.method = Method::mb_sarah_fixed;
  cfg.b_H = 0;
  cfg.step = FixedStep{0.05};
  check_method(cfg);

  cfg.method = Method::svrg;
  check_method(cfg);

  cfg.method = Method::svrg_bb;
  cfg.step = EpochBbStep{0.05, {}};
  check_method(cfg);

  cfg.method = Method::sgd;
  cfg.step = FixedStep{0.05};
  check_method(cfg);
}

TEST_CASE("work accounting is exact") {
  Dataset ds = small_dataset(50, 5);
  LogisticL2 obj(ds, 0.05);
  const std::uint64_t n = 50;

  SolverConfig cfg;
  cfg.m = 9;
  cfg.b = 4;
  cfg.outer_count = 3;
  cfg.seed = 2;

  SUBCASE("sarah family with RBB") {
    cfg.method = Method::mb_sarah_rbb;
    cfg.b_H = 6;
    cfg.step = RbbStep{0.1, 0.1, {}};
    RunTrace t = run_solver(obj, cfg);
    CHECK(t.total_component_grad_evals ==
          cfg.outer_count * (n + 2 * cfg.b * (cfg.m - 1)));
    CHECK(t.total_stepsize_grad_evals ==
          cfg.outer_count * 2 * cfg.b_H * (cfg.m - 1));
  }

  SUBCASE("sarah fixed has no step-size evaluations") {
    cfg.method = Method::mb_sarah_fixed;
    cfg.step = FixedStep{0.05};
    RunTrace t = run_solver(obj, cfg);
    CHECK(t.total_component_grad_evals ==
          cfg.outer_count * (n + 2 * cfg.b * (cfg.m - 1)));
    CHECK(t.total_stepsize_grad_evals == 0);
  }

  SUBCASE("ms2gd mirrors the sarah loop shape") {
    cfg.method = Method::ms2gd_rbb;
    cfg.b_H = 6;
    cfg.step = RbbStep{1.0, 0.1, {}};
    RunTrace t = run_solver(obj, cfg);
    CHECK(t.total_component_grad_evals ==
          cfg.outer_count * (n + 2 * cfg.b * (cfg.m - 1)));
    CHECK(t.total_stepsize_grad_evals ==
          cfg.outer_count * 2 * cfg.b_H * (cfg.m - 1));
  }

  SUBCASE("svrg and sgd") {
    cfg.method = Method::svrg;
    cfg.step = FixedStep{0.05};
    RunTrace t = run_solver(obj, cfg);
    CHECK(t.total_component_grad_evals ==
          cfg.outer_count * (n + 2 * cfg.b * cfg.m));

    cfg.method = Method::sgd;
    RunTrace t2 = run_solver(obj, cfg);
    CHECK(t2.total_component_grad_evals == cfg.outer_count * cfg.b * cfg.m);
  }

  SUBCASE("passes are strictly increasing") {
    cfg.method = Method::mb_sarah_rbb;
    cfg.b_H = 6;
    cfg.step = RbbStep{0.1, 0.1, {}};
    RunTrace t = run_solver(obj, cfg);
    for (std::size_t i = 1; i < t.records.size(); ++i)
      CHECK(t.records[i].effective_passes >
            t.records[i - 1].effective_passes);
  }

  SUBCASE("m = 1 leaves only the full-gradient step per outer loop") {
    cfg.method = Method::mb_sarah_rbb;
    cfg.m = 1;
    cfg.b_H = 6;
    cfg.step = RbbStep{0.1, 0.1, {}};
    RunTrace t = run_solver(obj, cfg);
    CHECK(t.total_component_grad_evals == cfg.outer_count * n);
    CHECK(t.total_stepsize_grad_evals == 0);
  }

  SUBCASE("dense-trace diagnostics never touch the counters") {
    cfg.method = Method::mb_sarah_rbb;
    cfg.b_H = 6;
    cfg.step = RbbStep{0.1, 0.1, {}};
    RunTrace plain = run_solver(obj, cfg);
    cfg.dense_trace = true;
    cfg.dense_trace_gap = true;
    RunTrace dense = run_solver(obj, cfg);
    CHECK(plain.total_component_grad_evals ==
          dense.total_component_grad_evals);
    CHECK(plain.total_stepsize_grad_evals == dense.total_stepsize_grad_evals);
    CHECK(plain.final_w == dense.final_w);
  }
}

TEST_CASE("fixed-rule reduction: RBB method with a fixed rule is bit-identical "
          "to the fixed method") {
  Dataset ds = benchmark_dataset();
  LogisticL2 obj(ds, 0.01);

  SolverConfig rbb_cfg;
  rbb_cfg.method = Method::mb_sarah_rbb;
  rbb_cfg.m = 50;
  rbb_cfg.b = 4;
  rbb_cfg.b_H = 0;  // unused with a fixed rule
  rbb_cfg.outer_count = 3;
  rbb_cfg.seed = 11;
  rbb_cfg.step = FixedStep{0.05};

  SolverConfig fixed_cfg = rbb_cfg;
  fixed_cfg.method = Method::mb_sarah_fixed;

  CHECK(traces_identical(run_solver(obj, rbb_cfg),
                         run_solver(obj, fixed_cfg)));

  rbb_cfg.method = Method::ms2gd_rbb;
  fixed_cfg.method = Method::ms2gd_fixed;
  CHECK(traces_identical(run_solver(obj, rbb_cfg),
                         run_solver(obj, fixed_cfg)));
}

TEST_CASE("full-batch collapse: b = b_H = n makes the estimator exact") {
  Dataset ds = small_dataset(12, 4);
  LogisticL2 obj(ds, 0.05);

  SolverConfig cfg;
  cfg.method = Method::mb_sarah_rbb;
  cfg.m = 6;
  cfg.b = 12;
  cfg.b_H = 12;
  cfg.outer_count = 2;
  cfg.seed = 5;
  cfg.step = RbbStep{0.1, 0.1, {}};
  cfg.dense_trace = true;
  cfg.dense_trace_gap = true;

  RunTrace t = run_solver(obj, cfg);
  REQUIRE(!t.dense.empty());
  for (const DenseTraceRecord& r : t.dense) {
    // estimator equals the exact gradient at every inner step, so the
    // empirical deviation is exactly zero
    CHECK(r.estimator_gap_sq == 0.0);
  }
}

TEST_CASE("rbb steps respect the strong-convexity ceiling") {
  Dataset ds = benchmark_dataset();
  LogisticL2 obj(ds, 0.01);

  SolverConfig cfg;
  cfg.method = Method::mb_sarah_rbb;
  cfg.m = 100;
  cfg.b = 4;
  cfg.b_H = 40;
  cfg.outer_count = 2;
  cfg.step = RbbStep{0.1, 0.1, {}};
  cfg.dense_trace = true;

  const double bound = rbb_upper_bound(0.01, 0.1, 40);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cfg.seed = seed;
    RunTrace t = run_solver(obj, cfg);
    for (const DenseTraceRecord& r : t.dense) {
      if (r.inner_index == 0) continue;  // eta_0 step, not an RBB ratio
      CHECK_FALSE(r.fallback);
      CHECK(r.eta <= bound + 1e-12);
      CHECK(r.eta > 0.0);
    }
  }
}

TEST_CASE("sgd first step uses the seeded first index") {
  Dataset ds = small_dataset(25, 4);
  LogisticL2 obj(ds, 0.05);

  SolverConfig cfg;
  cfg.method = Method::sgd;
  cfg.m = 1;
  cfg.b = 1;
  cfg.outer_count = 1;
  cfg.seed = 77;
  cfg.step = FixedStep{0.3};

  RunTrace t = run_solver(obj, cfg);

  Rng rng(77);
  auto S = sample_without_replacement(25, 1, rng);
  DenseVector w0(4, 0.0);
  DenseVector g = obj.component_gradient(S[0], w0);
  DenseVector want(4);
  for (std::size_t j = 0; j < 4; ++j) want[j] = w0[j] - 0.3 * g[j];
  CHECK(t.final_w == want);
}

TEST_CASE("svrg with m=1 and b=n is exact gradient descent") {
  Dataset ds = small_dataset(9, 3);
  LogisticL2 obj(ds, 0.05);

  SolverConfig cfg;
  cfg.method = Method::svrg;
  cfg.m = 1;
  cfg.b = 9;
  cfg.outer_count = 3;
  cfg.seed = 1;
  cfg.step = FixedStep{0.4};

  RunTrace t = run_solver(obj, cfg);

  DenseVector w(3, 0.0);
  for (int s = 0; s < 3; ++s) {
    DenseVector g = obj.full_gradient(w);
    for (std::size_t j = 0; j < 3; ++j) w[j] -= 0.4 * g[j];
  }
  CHECK(t.final_w == w);
}

TEST_CASE("svrg-bb second-epoch step on the identity-Hessian quadratic") {
  Dataset ds = identity_quadratic();
  RidgeL2 obj(ds, 0.0);

  SolverConfig cfg;
  cfg.method = Method::svrg_bb;
  cfg.m = 10;
  cfg.b = 1;
  cfg.outer_count = 2;
  cfg.seed = 1;
  cfg.step = EpochBbStep{0.3, {}};
  cfg.w0 = DenseVector{1.0};  // away from the minimizer at 0
  cfg.dense_trace = true;

  RunTrace t = run_solver(obj, cfg);
  REQUIRE(t.records.size() == 2);
  // first epoch runs at eta_0; the second recomputes (1/m) * 1 on the
  // identity Hessian. min/max compare exactly, the mean only up to the
  // rounding of its running sum.
  CHECK(t.records[0].step_min == 0.3);
  CHECK(t.records[0].step_max == 0.3);
  CHECK(t.records[0].step_mean == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(t.records[1].step_min == 0.1);
  CHECK(t.records[1].step_max == 0.1);
  CHECK(t.records[1].step_mean == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("ms2gd with m=1 degenerates to a single gradient step per outer") {
  Dataset ds = small_dataset(9, 3);
  LogisticL2 obj(ds, 0.05);

  SolverConfig cfg;
  cfg.method = Method::ms2gd_fixed;
  cfg.m = 1;
  cfg.b = 2;
  cfg.outer_count = 1;
  cfg.seed = 1;
  cfg.step = FixedStep{0.25};

  RunTrace t = run_solver(obj, cfg);
  DenseVector w0(3, 0.0);
  DenseVector g = obj.full_gradient(w0);
  DenseVector want(3);
  for (std::size_t j = 0; j < 3; ++j) want[j] = -0.25 * g[j];
  CHECK(t.final_w == want);
}

TEST_CASE("variance bound of the recursive estimator (Monte Carlo)") {
  // tiny strongly convex instance: n=8, b=2, b_H=4
  Dataset ds = normalize_rows(small_dataset(8, 3, 21)).dataset;
  LogisticL2 obj(ds, 0.1);
  ObjectiveConstants c = obj.constants();

  SolverConfig cfg;
  cfg.method = Method::mb_sarah_rbb;
  cfg.m = 4;
  cfg.b = 2;
  cfg.b_H = 4;
  cfg.outer_count = 1;
  cfg.step = RbbStep{0.1, 0.1, {}};
  cfg.dense_trace = true;
  cfg.dense_trace_gap = true;

  const int replays = 10000;
  // per inner index: means of ||v_k||^2 and ||grad P - v_k||^2
  std::vector<double> v_sq_mean(cfg.m, 0.0);
  std::vector<double> gap_mean(cfg.m, 0.0);
  std::vector<double> gap_sq_sum(cfg.m, 0.0);
  for (int r = 0; r < replays; ++r) {
    cfg.seed = 1000 + r;
    RunTrace t = run_solver(obj, cfg);
    for (const DenseTraceRecord& rec : t.dense) {
      v_sq_mean[rec.inner_index] += rec.v_norm_sq;
      gap_mean[rec.inner_index] += rec.estimator_gap_sq;
      gap_sq_sum[rec.inner_index] +=
          rec.estimator_gap_sq * rec.estimator_gap_sq;
    }
  }
  for (std::size_t k = 0; k < cfg.m; ++k) {
    v_sq_mean[k] /= replays;
    gap_mean[k] /= replays;
  }

  CHECK(gap_mean[0] == 0.0);  // v_0 is the exact gradient

  const double coeff = (c.L * c.L * 0.1 * 0.1) /
                       (c.mu * c.mu * static_cast<double>(cfg.b) *
                        static_cast<double>(cfg.b_H) *
                        static_cast<double>(cfg.b_H));
  const double correction = (8.0 - 2.0) / (8.0 - 1.0);
  for (std::size_t k = 1; k < cfg.m; ++k) {
    double bound = 0.0;
    for (std::size_t j = 1; j <= k; ++j) bound += v_sq_mean[j - 1];
    bound *= coeff * correction;
    double var =
        gap_sq_sum[k] / replays - gap_mean[k] * gap_mean[k];
    double se = std::sqrt(std::max(var, 0.0) / replays);
    CHECK(gap_mean[k] <= bound + 3.0 * se);
  }
}

TEST_CASE("divergence raises an error carrying the partial trace") {
  // ridge with a step far above 2/L blows up geometrically
  Dataset ds = small_dataset(10, 3, 5);
  RidgeL2 obj(ds, 0.01);

  SolverConfig cfg;
  cfg.method = Method::sgd;
  cfg.m = 200;
  cfg.b = 2;
  cfg.outer_count = 50;
  cfg.seed = 3;
  cfg.step = FixedStep{1e6};

  try {
    run_solver(obj, cfg);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    REQUIRE(!e.partial_trace.records.empty());
    CHECK_FALSE(
        std::isfinite(e.partial_trace.records.back().objective_value));
  }
}

TEST_CASE("config validation") {
  Dataset ds = small_dataset(10, 3);
  LogisticL2 obj(ds, 0.05);

  SolverConfig cfg;
  cfg.method = Method::mb_sarah_rbb;
  cfg.m = 4;
  cfg.b = 2;
  cfg.b_H = 3;
  cfg.outer_count = 1;
  cfg.step = RbbStep{0.1, 0.1, {}};
  CHECK_NOTHROW(run_solver(obj, cfg));

  SolverConfig bad = cfg;
  bad.b = 11;  // b > n
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);

  bad = cfg;
  bad.b_H = 0;  // RBB rule needs b_H
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);

  bad = cfg;
  bad.method = Method::mb_sarah_fixed;  // fixed method, RBB rule
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);

  bad = cfg;
  bad.method = Method::sgd;
  bad.step = FixedStep{0.1};
  bad.b_H = 3;  // b_H must be absent for SGD
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);

  bad = cfg;
  bad.method = Method::svrg_bb;
  bad.b_H = 0;
  bad.step = FixedStep{0.1};  // svrg_bb needs the epoch rule
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);

  bad = cfg;
  bad.w0 = DenseVector{1.0};  // wrong dimension
  CHECK_THROWS_AS(run_solver(obj, bad), std::invalid_argument);
}

TEST_CASE("trace CSV schema") {
  Dataset ds = small_dataset(10, 3);
  LogisticL2 obj(ds, 0.05);
  SolverConfig cfg;
  cfg.method = Method::mb_sarah_fixed;
  cfg.m = 3;
  cfg.b = 2;
  cfg.outer_count = 2;
  cfg.step = FixedStep{0.1};
  RunTrace t = run_solver(obj, cfg);
  std::ostringstream out;
  write_trace_csv(t, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "outer,passes,passes_incl_stepsize,value,grad_norm_sq,step_min,"
        "step_mean,step_max,fallbacks");
  std::string row;
  std::size_t rows = 0;
  while (std::getline(in, row)) ++rows;
  CHECK(rows == 2);
}
