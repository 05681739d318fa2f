#include <doctest.h>

#include <cmath>
#include <set>

#include "core/engine.hpp"
#include "core/exact.hpp"
#include "core/weights.hpp"
#include "models/binary_hmm.hpp"
#include "models/irm.hpp"
#include "models/ising.hpp"
#include "support/oracles.hpp"
#include "util/logsumexp.hpp"

using namespace dpvi;

namespace {

Particle bare_particle(std::vector<std::int32_t> x, double log_score) {
  Particle p;
  p.assignment = std::move(x);
  p.log_score = log_score;
  return p;
}

double weight_sum(const ParticleSet& set) {
  double s = 0.0;
  for (double lw : set.log_weights) s += std::exp(lw);
  return s;
}

}  // namespace

TEST_CASE("log weights normalize scores") {
  auto w = log_weights_from_scores({std::log(2.0), std::log(3.0)});
  CHECK(w[0] == doctest::Approx(std::log(0.4)).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(std::log(0.6)).epsilon(1e-12));

  auto single = log_weights_from_scores({-123.456});
  CHECK(single[0] == 0.0);

  auto with_dead = log_weights_from_scores({0.0, kNegInf, 0.0});
  CHECK(with_dead[0] == doctest::Approx(std::log(0.5)));
  CHECK(with_dead[1] == kNegInf);
  CHECK(with_dead[2] == doctest::Approx(std::log(0.5)));

  CHECK_THROWS_AS(log_weights_from_scores({kNegInf, kNegInf}), Error);
}

TEST_CASE("log weights exponentials sum to one") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_below(10));
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) scores.push_back(200.0 * (rng.uniform() - 0.5));
    auto w = log_weights_from_scores(scores);
    double total = 0.0;
    for (double lw : w) total += std::exp(lw);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("variational bound is logsumexp of scores") {
  ParticleSet set;
  set.particles.push_back(bare_particle({0}, std::log(2.0)));
  set.particles.push_back(bare_particle({1}, std::log(3.0)));
  set.log_weights = log_weights_from_scores({std::log(2.0), std::log(3.0)});
  CHECK(variational_bound(set) == doctest::Approx(std::log(5.0)).epsilon(1e-12));

  ParticleSet single;
  single.particles.push_back(bare_particle({0}, 1.25));
  single.log_weights = {0.0};
  CHECK(variational_bound(single) == doctest::Approx(1.25));

  CHECK_THROWS_AS(variational_bound(ParticleSet{}), Error);
}

TEST_CASE("exhaustive particle set reaches the exact partition function") {
  BinaryHmmParams params;
  BinaryHmmModel model(params, {0, 1, 1});
  ParticleSet set = sequential_dpvi(model, 8);
  REQUIRE(set.size() == 8);
  ExactPosterior exact = brute_force(model);
  CHECK(variational_bound(set) == doctest::Approx(exact.log_z).epsilon(1e-12));
}

TEST_CASE("replica bound: duplicates never beat unique particles") {
  // One particle replicated twice across two slots collapses to log f.
  std::vector<Particle> twice;
  twice.push_back(bare_particle({7}, std::log(4.0)));
  twice.push_back(bare_particle({7}, std::log(4.0)));
  CHECK(replica_bound(twice, {2, 2}) == doctest::Approx(std::log(4.0)));

  std::vector<Particle> unique;
  unique.push_back(bare_particle({0}, std::log(2.0)));
  unique.push_back(bare_particle({1}, std::log(3.0)));
  double unique_bound = replica_bound(unique, {1, 1});
  CHECK(unique_bound == doctest::Approx(std::log(5.0)));

  std::vector<Particle> duped;
  duped.push_back(bare_particle({1}, std::log(3.0)));
  duped.push_back(bare_particle({1}, std::log(3.0)));
  CHECK(unique_bound > replica_bound(duped, {2, 2}));

  CHECK_THROWS_AS(replica_bound(duped, {1, 1}), Error);
  CHECK_THROWS_AS(replica_bound(duped, {2}), Error);
}

TEST_CASE("replica bound property over random pools") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform_below(7));
    std::vector<double> scores;
    for (int i = 0; i < k; ++i) scores.push_back(10.0 * (rng.uniform() - 0.5));

    std::vector<Particle> unique;
    for (int i = 0; i < k; ++i)
      unique.push_back(bare_particle({i}, scores[static_cast<std::size_t>(i)]));
    double bound_unique = replica_bound(unique, std::vector<int>(
                                                    static_cast<std::size_t>(k), 1));

    // Random duplication pattern over the same K slots.
    int survivors = 1 + static_cast<int>(rng.uniform_below(
                            static_cast<std::uint32_t>(k)));
    std::vector<int> copies(static_cast<std::size_t>(survivors), 1);
    for (int extra = 0; extra < k - survivors; ++extra)
      ++copies[rng.uniform_below(static_cast<std::uint32_t>(survivors))];
    std::vector<Particle> replicated;
    std::vector<int> multiplicity;
    for (int i = 0; i < survivors; ++i)
      for (int rep = 0; rep < copies[static_cast<std::size_t>(i)]; ++rep) {
        replicated.push_back(
            bare_particle({i}, scores[static_cast<std::size_t>(i)]));
        multiplicity.push_back(copies[static_cast<std::size_t>(i)]);
      }
    double bound_replica = replica_bound(replicated, multiplicity);
    CHECK(bound_unique >= bound_replica - 1e-12);
  }
}

TEST_CASE("candidate expansion counts and kept-value scores") {
  BinaryHmmParams params;
  BinaryHmmModel model(params, {0, 1, 0, 1});
  ParticleSet set;
  set.particles.push_back(model.make_particle({0, 0, 1, 1}));
  set.particles.push_back(model.make_particle({1, 0, 1, 0}));
  set.log_weights = log_weights_from_scores(
      {set.particles[0].log_score, set.particles[1].log_score});

  auto pool = expand_candidates(set, 2, model);
  CHECK(pool.size() == 4);
  for (const Candidate& c : pool) {
    if (c.value ==
        set.particles[static_cast<std::size_t>(c.parent)].assignment[2]) {
      CHECK(c.log_score ==
            set.particles[static_cast<std::size_t>(c.parent)].log_score);
    }
    Assignment x = model.candidate_assignment(
        set.particles[static_cast<std::size_t>(c.parent)], 2, c.value);
    CHECK(c.log_score ==
          doctest::Approx(model.full_log_score(x)).epsilon(1e-12));
  }
}

TEST_CASE("ising incremental candidate scores match full rescoring") {
  IsingModel model(3, 0.8);
  Rng rng(5);
  Particle p = model.make_particle(model.prior_sample(rng));
  for (int trial = 0; trial < 50; ++trial) {
    int n = static_cast<int>(rng.uniform_below(9));
    auto scores = model.candidate_log_scores(p, n);
    for (int m = 0; m < 2; ++m) {
      Assignment x = model.candidate_assignment(p, n, m);
      CHECK(scores[static_cast<std::size_t>(m)] ==
            doctest::Approx(model.full_log_score(x)).epsilon(1e-9));
    }
    int m = static_cast<int>(rng.uniform_below(2));
    model.apply(p, n, m, scores[static_cast<std::size_t>(m)]);
  }
  CHECK(audit_log_score_drift(model, p) < 1e-9);
}

TEST_CASE("top-k selection: order, ties and dedup") {
  IsingModel model(2, 0.3);
  ParticleSet parents;
  parents.particles.push_back(model.make_particle({0, 0, 0, 0}));
  parents.particles.push_back(model.make_particle({1, 1, 0, 0}));
  parents.log_weights = {std::log(0.5), std::log(0.5)};

  std::vector<Candidate> pool = {
      {0, 3, 0, 5.0}, {0, 3, 1, 4.0}, {1, 3, 0, 4.0}, {1, 3, 1, 1.0}};
  ParticleSet out = select_top_k(pool, 2, model, parents, 3);
  REQUIRE(out.size() == 2);
  CHECK(out.particles[0].assignment == Assignment{0, 0, 0, 0});
  // Tie at 4.0 breaks toward the lower parent index.
  CHECK(out.particles[1].assignment == Assignment{0, 0, 0, 1});
  CHECK(weight_sum(out) == doctest::Approx(1.0).epsilon(1e-12));

  // Identical canonical assignments collapse to one survivor.
  std::vector<Candidate> dup_pool = {{0, 3, 1, 3.0}, {0, 3, 1, 3.0}};
  ParticleSet dedup = select_top_k(dup_pool, 2, model, parents, 3);
  CHECK(dedup.size() == 1);

  // Zero-probability continuations are never selected.
  std::vector<Candidate> dead_pool = {{0, 3, 0, 2.0}, {0, 3, 1, kNegInf}};
  ParticleSet alive = select_top_k(dead_pool, 4, model, parents, 3);
  CHECK(alive.size() == 1);

  std::vector<Candidate> all_dead = {{0, 3, 0, kNegInf}, {0, 3, 1, kNegInf}};
  CHECK_THROWS_WITH_AS(select_top_k(all_dead, 2, model, parents, 3),
                       "no viable continuation", Error);
}

TEST_CASE("particle fates: splitting and deletion in one step") {
  IsingModel model(2, 0.3);
  ParticleSet parents;
  parents.particles.push_back(model.make_particle({0, 0, 0, 0}));
  parents.particles.push_back(model.make_particle({1, 1, 0, 0}));
  parents.log_weights = {std::log(0.5), std::log(0.5)};

  // parent 0 carries two viable continuations, parent 1 none
  std::vector<Candidate> pool = {
      {0, 3, 0, 2.0}, {0, 3, 1, 1.5}, {1, 3, 0, kNegInf}, {1, 3, 1, kNegInf}};
  ParticleSet out = select_top_k(pool, 3, model, parents, 3);
  REQUIRE(out.size() == 2);  // parent 0 split, parent 1 deleted
  CHECK(out.particles[0].assignment[0] == 0);
  CHECK(out.particles[1].assignment[0] == 0);
  CHECK(out.particles[0].assignment[3] != out.particles[1].assignment[3]);
}

TEST_CASE("selection keeps canonical keys unique") {
  BinaryHmmParams params;
  BinaryHmmModel model(params, {0, 1, 0, 0, 1});
  ParticleSet set = sequential_dpvi(model, 8);
  std::set<std::string> keys;
  for (const Particle& p : set.particles)
    CHECK(keys.insert(model.canonical_key(p.assignment)).second);
  CHECK(weight_sum(set) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("local refinement reaches the exact answer on a tiny model") {
  BinaryHmmParams params;
  BinaryHmmModel model(params, {1, 0});
  Rng rng(3);
  ParticleSet init = default_init(model, 4, rng);
  DpviResult res = local_dpvi(model, std::move(init), 4, 1e-10, 50);
  CHECK(res.sweeps <= 2);
  ExactPosterior exact = brute_force(model);
  CHECK(res.trace.back() == doctest::Approx(exact.log_z).epsilon(1e-12));

  for (std::size_t k = 0; k < res.set.size(); ++k) {
    double post = exact.posterior_prob(
        model.canonicalize(res.set.particles[k].assignment));
    CHECK(std::exp(res.set.log_weights[k]) ==
          doctest::Approx(post).epsilon(1e-9));
  }
}

TEST_CASE("single-particle refinement matches iterated conditional modes") {
  // A generic field keeps scores tie-free; with ties a whole sweep can move
  // through equal-score states without changing the bound, where the
  // bound-based stop and the assignment-fixpoint stop legitimately differ.
  Rng rng(11);
  std::vector<double> theta(9);
  for (double& t : theta) t = rng.normal();
  IsingModel model(3, 0.7, theta);
  for (int trial = 0; trial < 5; ++trial) {
    Assignment start = model.prior_sample(rng);
    ParticleSet init;
    init.particles.push_back(model.make_particle(start));
    init.log_weights = {0.0};
    DpviResult res = local_dpvi(model, std::move(init), 1, 1e-12, 100);
    Assignment icm_result = oracles::icm(model, start);
    CHECK(res.set.particles[0].assignment == icm_result);
  }
}

TEST_CASE("bound trace is non-decreasing under refinement") {
  IsingModel model(4, 100.0);
  Rng rng(17);
  ParticleSet init;
  std::set<std::string> seen;
  while (init.particles.size() < 3) {
    Assignment x = model.prior_sample(rng);
    if (!seen.insert(model.canonical_key(x)).second) continue;
    init.particles.push_back(model.make_particle(x));
  }
  std::vector<double> scores;
  for (const Particle& p : init.particles) scores.push_back(p.log_score);
  init.log_weights = log_weights_from_scores(scores);

  DpviResult res = local_dpvi(model, std::move(init), 3, 1e-10, 100);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] >= res.trace[i - 1] - 1e-9);
}

TEST_CASE("sequential pass basics") {
  BinaryHmmParams params;
  SUBCASE("length one with two particles is the exact posterior") {
    BinaryHmmModel model(params, {0});
    ParticleSet set = sequential_dpvi(model, 2);
    REQUIRE(set.size() == 2);
    ExactPosterior exact = brute_force(model);
    for (std::size_t k = 0; k < set.size(); ++k)
      CHECK(std::exp(set.log_weights[k]) ==
            doctest::Approx(exact.posterior_prob(set.particles[k].assignment))
                .epsilon(1e-12));
  }

  SUBCASE("exhaustive K reproduces the forward likelihood and posterior") {
    Rng rng(21);
    auto [hidden, obs] = sample_binary_hmm(params, 10, rng);
    BinaryHmmModel model(params, obs);
    ParticleSet set = sequential_dpvi(model, 1024);
    REQUIRE(set.size() == 1024);
    double fb = oracles::binary_hmm_forward_loglik(params, obs);
    CHECK(variational_bound(set) == doctest::Approx(fb).epsilon(1e-9));
    ExactPosterior exact = brute_force(model);
    for (std::size_t k = 0; k < set.size(); ++k)
      CHECK(std::exp(set.log_weights[k]) ==
            doctest::Approx(exact.posterior_prob(set.particles[k].assignment))
                .epsilon(1e-9));
  }
}

TEST_CASE("zero-sweep smoothing returns the sequential result unchanged") {
  BinaryHmmParams params;
  BinaryHmmModel model(params, {0, 1, 1, 0});
  ParticleSet seq = sequential_dpvi(model, 3);
  DpviResult smooth = smoothing_dpvi(model, 3, 1e-8, 0);
  REQUIRE(smooth.set.size() == seq.size());
  for (std::size_t k = 0; k < seq.size(); ++k) {
    CHECK(smooth.set.particles[k].assignment == seq.particles[k].assignment);
    CHECK(smooth.set.particles[k].log_score == seq.particles[k].log_score);
  }
  CHECK(smooth.trace.size() == 1);
}

TEST_CASE("prior-sample initialization dedups and may shrink") {
  RelationData rel;
  rel.type_sizes = {3};
  rel.position_type = {0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rel.cells.push_back({{i, j}, (i == j) ? 1 : 0});
  IrmModel model(rel, 1.0, 1.0);
  Rng rng(8);
  ParticleSet init = default_init(model, 64, rng);
  // Only B(3) = 5 partitions exist, so the set must shrink below K.
  CHECK(init.size() <= 5);
  std::set<std::string> keys;
  for (const Particle& p : init.particles)
    CHECK(keys.insert(model.canonical_key(p.assignment)).second);
}

TEST_CASE("identical seeds give identical runs") {
  IsingModel model(4, 0.4);
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    ParticleSet init = default_init(model, 6, rng);
    return local_dpvi(model, std::move(init), 6, 1e-8, 40);
  };
  DpviResult a = run(42);
  DpviResult b = run(42);
  REQUIRE(a.set.size() == b.set.size());
  for (std::size_t k = 0; k < a.set.size(); ++k) {
    CHECK(a.set.particles[k].assignment == b.set.particles[k].assignment);
    CHECK(a.set.particles[k].log_score == b.set.particles[k].log_score);
    CHECK(a.set.log_weights[k] == b.set.log_weights[k]);
  }
  CHECK(a.trace == b.trace);
}
