#include <doctest.h>

#include <cmath>

#include "core/engine.hpp"
#include "core/exact.hpp"
#include "models/conjugate.hpp"
#include "models/dpmm.hpp"
#include "support/oracles.hpp"
#include "util/stats_math.hpp"

using namespace dpvi;

TEST_CASE("crp predictive cases and normalization") {
  // first point: a new table with probability one
  CHECK(crp_log_predictive(0, 0, 0.5) == doctest::Approx(0.0));

  // sizes [2, 1], alpha 0.5
  CHECK(std::exp(crp_log_predictive(2, 3, 0.5)) ==
        doctest::Approx(2.0 / 3.5).epsilon(1e-12));
  CHECK(std::exp(crp_log_predictive(1, 3, 0.5)) ==
        doctest::Approx(1.0 / 3.5).epsilon(1e-12));
  CHECK(std::exp(crp_log_predictive(0, 3, 0.5)) ==
        doctest::Approx(0.5 / 3.5).epsilon(1e-12));

  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    int clusters = 1 + static_cast<int>(rng.uniform_below(6));
    std::vector<int> sizes;
    int n = 0;
    for (int c = 0; c < clusters; ++c) {
      sizes.push_back(1 + static_cast<int>(rng.uniform_below(5)));
      n += sizes.back();
    }
    double alpha = 0.1 + 3.0 * rng.uniform();
    double total = std::exp(crp_log_predictive(0, n, alpha));
    for (int s : sizes) total += std::exp(crp_log_predictive(s, n, alpha));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("nig predictive: empty-cluster closed form") {
  NigPrior prior{1.0, 1.0, 1.0};
  NigStats stats(1);
  // dof 2a, location 0, squared scale b(tau+1)/(a tau) = 2
  double expected = student_t_logpdf(0.0, 2.0, 0.0, 2.0);
  CHECK(stats.log_predictive({0.0}, prior) ==
        doctest::Approx(expected).epsilon(1e-12));
  // symmetry around the prior mean
  CHECK(stats.log_predictive({1.7}, prior) ==
        doctest::Approx(stats.log_predictive({-1.7}, prior)).epsilon(1e-12));
}

TEST_CASE("nig predictive agrees with quadrature") {
  NigPrior prior{1.0, 1.0, 1.0};
  SUBCASE("empty cluster") {
    NigStats stats(1);
    for (double y : {0.0, 0.8, -2.5}) {
      double direct = stats.log_predictive({y}, prior);
      double quad = oracles::nig_predictive_quadrature({}, y, prior);
      CHECK(direct == doctest::Approx(quad).epsilon(1e-6));
    }
  }
  SUBCASE("populated cluster") {
    NigPrior paper{25.0, 1.0, 1.0};
    NigStats stats(1);
    std::vector<double> members = {0.3, -0.5, 1.2};
    for (double x : members) stats.add({x});
    for (double y : {0.1, 1.5}) {
      double direct = stats.log_predictive({y}, paper);
      double quad = oracles::nig_predictive_quadrature(members, y, paper);
      CHECK(direct == doctest::Approx(quad).epsilon(1e-6));
    }
  }
}

TEST_CASE("nig predictive integrates to one") {
  NigPrior prior{2.0, 1.5, 1.0};
  NigStats stats(1);
  stats.add({0.4});
  stats.add({-0.2});
  double total = 0.0;
  double lo = -60.0, hi = 60.0;
  int steps = 40000;
  double h = (hi - lo) / steps;
  for (int i = 0; i <= steps; ++i) {
    double w = (i == 0 || i == steps) ? 0.5 : 1.0;
    total += w * std::exp(stats.log_predictive({lo + i * h}, prior)) * h;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("niw predictive reduces to nig in one dimension") {
  // nu = 2a and lambda0 = 2b make the priors identical.
  double tau = 3.0, a = 2.0, b = 1.5;
  NigPrior nig{tau, a, b};
  NiwPrior niw;
  niw.tau = tau;
  niw.nu = 2.0 * a;
  niw.lambda0 = SymMat(1, 2.0 * b);
  NigStats ns(1);
  NiwStats ws(1);
  Rng rng(7);
  for (int i = 0; i < 6; ++i) {
    double x = rng.normal() * 1.4 + 0.3;
    ns.add({x});
    ws.add({x});
  }
  for (double y : {-1.0, 0.0, 2.2})
    CHECK(ws.log_predictive({y}, niw) ==
          doctest::Approx(ns.log_predictive({y}, nig)).epsilon(1e-9));
}

TEST_CASE("niw predictive is rotation invariant for an empty cluster") {
  NiwPrior prior;
  prior.tau = 0.01;
  prior.nu = 3.0;
  NiwStats stats(2);
  double r = 1.3;
  double p1 = stats.log_predictive({r, 0.0}, prior);
  double p2 = stats.log_predictive({0.0, r}, prior);
  double p3 = stats.log_predictive({r / std::sqrt(2.0), r / std::sqrt(2.0)},
                                   prior);
  CHECK(p1 == doctest::Approx(p2).epsilon(1e-12));
  CHECK(p1 == doctest::Approx(p3).epsilon(1e-12));
}

TEST_CASE("niw predictive agrees with a sampling oracle") {
  NiwPrior prior;
  prior.tau = 1.0;
  prior.nu = 4.0;
  std::vector<std::vector<double>> members = {{0.5, -0.2}, {1.1, 0.4},
                                              {-0.3, 0.9}};
  NiwStats stats(2);
  for (const auto& x : members) stats.add(x);
  std::vector<double> y = {0.6, 0.1};
  double direct = std::exp(stats.log_predictive(y, prior));
  Rng rng(808);
  auto mc = oracles::niw_predictive_monte_carlo(members, y, prior, 1000000, rng);
  CHECK(std::abs(mc.mean - direct) < 3.0 * mc.se);
}

TEST_CASE("conditional scores match the enumerated posterior on two points") {
  std::vector<std::vector<double>> points = {{0.0}, {0.7}};
  DpmmModel model(points, 0.5, NigPrior{1.0, 1.0, 1.0});
  Particle p = model.make_particle({0, 0});
  auto scores = model.candidate_log_scores(p, 1);
  REQUIRE(scores.size() == 2);
  // ratio of joint scores equals the conditional odds
  double together = model.full_log_score({0, 0});
  double apart = model.full_log_score({0, 1});
  CHECK(scores[0] - scores[1] ==
        doctest::Approx(together - apart).epsilon(1e-9));
}

TEST_CASE("remove and restore is idempotent across random edits") {
  Rng rng(18);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 10; ++i)
    points.push_back({rng.normal(), rng.normal() + 2.0 * (i % 2)});
  DpmmModel model(points, 0.5, NigPrior{});
  Particle p = model.make_particle(model.prior_sample(rng));
  for (int trial = 0; trial < 40; ++trial) {
    int n = static_cast<int>(rng.uniform_below(10));
    double before = p.log_score;
    Assignment x_before = p.assignment;
    auto scores = model.candidate_log_scores(p, n);
    for (std::size_t m = 0; m < scores.size(); ++m) {
      if (model.candidate_assignment(p, n, static_cast<int>(m)) == x_before) {
        model.apply(p, n, static_cast<int>(m), scores[m]);
        CHECK(p.assignment == x_before);
        CHECK(p.log_score == doctest::Approx(before).epsilon(1e-12));
      }
    }
    int m = static_cast<int>(
        rng.uniform_below(static_cast<std::uint32_t>(scores.size())));
    model.apply(p, n, m, scores[static_cast<std::size_t>(m)]);
  }
  CHECK(audit_log_score_drift(model, p) < 1e-9);
}

TEST_CASE("removing a singleton dissolves its cluster") {
  std::vector<std::vector<double>> points = {{0.0}, {5.0}, {0.2}};
  DpmmModel model(points, 1.0, NigPrior{1.0, 1.0, 1.0});
  Particle p = model.make_particle({0, 1, 0});
  // moving the singleton at n=1: destinations are cluster 0 and a fresh one
  CHECK(model.support(p, 1) == 2);
  auto scores = model.candidate_log_scores(p, 1);
  CHECK(scores.size() == 2);
  CHECK(model.candidate_assignment(p, 1, 0) == Assignment{0, 0, 0});
  // the fresh-cluster candidate reproduces the current partition
  CHECK(model.canonicalize(model.candidate_assignment(p, 1, 1)) ==
        model.canonicalize(p.assignment));
}

TEST_CASE("joint score depends only on the point-to-cluster pairing") {
  Rng rng(27);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 9; ++i)
    points.push_back({rng.normal() + 3.0 * (i % 3), rng.normal()});
  DpmmModel model(points, 0.7, NigPrior{});
  Assignment x = {0, 1, 0, 2, 1, 0, 2, 2, 1};
  double base = model.full_log_score(x);

  std::vector<int> perm = {4, 2, 8, 0, 6, 1, 3, 7, 5};
  std::vector<std::vector<double>> shuffled;
  Assignment x_perm;
  for (int i : perm) {
    shuffled.push_back(points[static_cast<std::size_t>(i)]);
    x_perm.push_back(x[static_cast<std::size_t>(i)]);
  }
  DpmmModel permuted(shuffled, 0.7, NigPrior{});
  CHECK(permuted.full_log_score(x_perm) ==
        doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("cluster caches rebuild to the incremental state") {
  Rng rng(29);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 14; ++i)
    points.push_back({rng.normal() * 2.0, rng.normal() - i * 0.1});
  NiwPrior prior;
  prior.nu = 3.0;
  prior.tau = 0.5;
  DpmmModel model(points, 1.0, prior);
  Particle p = model.make_particle(model.prior_sample(rng));
  for (int edit = 0; edit < 300; ++edit) {
    int n = static_cast<int>(rng.uniform_below(14));
    auto scores = model.candidate_log_scores(p, n);
    int m = static_cast<int>(
        rng.uniform_below(static_cast<std::uint32_t>(scores.size())));
    model.apply(p, n, m, scores[static_cast<std::size_t>(m)]);
  }
  Particle rebuilt = model.make_particle(p.assignment);
  CHECK(std::abs(rebuilt.log_score - p.log_score) < 1e-9);
  for (int n = 0; n < 14; ++n) {
    auto a = model.candidate_log_scores(p, n);
    auto b = model.candidate_log_scores(rebuilt, n);
    REQUIRE(a.size() == b.size());
    for (std::size_t m = 0; m < a.size(); ++m)
      CHECK(a[m] == doctest::Approx(b[m]).epsilon(1e-9));
  }
}
