#include "core/weights.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include "util/logsumexp.hpp"

namespace dpvi {

std::vector<double> log_weights_from_scores(
    const std::vector<double>& log_scores) {
  double z = logsumexp(log_scores);
  if (z == kNegInf) throw Error("empty support: all particle scores are zero");
  std::vector<double> w(log_scores.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = log_scores[k] - z;
  return w;
}

double variational_bound(const ParticleSet& set) {
  if (set.particles.empty()) throw Error("variational bound of an empty set");
  std::vector<double> scores;
  scores.reserve(set.size());
  for (const Particle& p : set.particles) scores.push_back(p.log_score);
  return logsumexp(scores);
}

double replica_bound(const std::vector<Particle>& particles,
                     const std::vector<int>& multiplicity) {
  if (particles.empty()) throw Error("replica bound of an empty set");
  if (particles.size() != multiplicity.size())
    throw Error("multiplicity length mismatch");

  std::map<std::string, int> counts;
  for (const Particle& p : particles) {
    std::string key(reinterpret_cast<const char*>(p.assignment.data()),
                    p.assignment.size() * sizeof(std::int32_t));
    counts[key] += 1;
  }
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const Particle& p = particles[k];
    std::string key(reinterpret_cast<const char*>(p.assignment.data()),
                    p.assignment.size() * sizeof(std::int32_t));
    if (multiplicity[k] < 1 || counts.at(key) != multiplicity[k])
      throw Error("multiplicities inconsistent with duplicate counts");
  }

  // w^k proportional to f(x^k) / V^k.
  std::vector<double> log_fv(particles.size());
  for (std::size_t k = 0; k < particles.size(); ++k)
    log_fv[k] = particles[k].log_score - std::log(double(multiplicity[k]));
  double log_zq = logsumexp(log_fv);
  if (log_zq == kNegInf) throw Error("empty support");

  double bound = 0.0;
  for (std::size_t k = 0; k < particles.size(); ++k) {
    double log_w = log_fv[k] - log_zq;
    if (log_w == kNegInf) continue;
    bound += std::exp(log_w) * (particles[k].log_score - log_w -
                                std::log(double(multiplicity[k])));
  }
  return bound;
}

}  // namespace dpvi
