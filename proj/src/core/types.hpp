#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A complete (or, during a sequential pass, prefix-complete) setting of all
// latent variables. kUnassigned marks positions not yet reached.
using Assignment = std::vector<std::int32_t>;
inline constexpr std::int32_t kUnassigned = -1;

// Model-owned sufficient-statistics cache attached to a particle.
struct ParticleStats {
  virtual ~ParticleStats() = default;
  virtual std::unique_ptr<ParticleStats> clone() const = 0;
};

struct Particle {
  Assignment assignment;
  double log_score = 0.0;
  std::unique_ptr<ParticleStats> stats;

  Particle() = default;
  Particle(Particle&&) = default;
  Particle& operator=(Particle&&) = default;
  Particle(const Particle&) = delete;
  Particle& operator=(const Particle&) = delete;

  Particle clone() const {
    Particle p;
    p.assignment = assignment;
    p.log_score = log_score;
    if (stats) p.stats = stats->clone();
    return p;
  }

  template <class T>
  T& stats_as() {
    return static_cast<T&>(*stats);
  }
  template <class T>
  const T& stats_as() const {
    return static_cast<const T&>(*stats);
  }
};

// K unique particles with normalized weights. Uniqueness of canonical keys is
// maintained by the selection step; weights always satisfy
// log_weights[k] = log_score[k] - logsumexp(log_scores).
struct ParticleSet {
  std::vector<Particle> particles;
  std::vector<double> log_weights;

  std::size_t size() const { return particles.size(); }

  ParticleSet clone() const {
    ParticleSet s;
    s.particles.reserve(particles.size());
    for (const Particle& p : particles) s.particles.push_back(p.clone());
    s.log_weights = log_weights;
    return s;
  }
};

// One single-variable continuation of a parent particle. A log_score of
// -infinity marks a zero-probability continuation.
struct Candidate {
  std::int32_t parent = 0;
  std::int32_t variable = 0;
  std::int32_t value = 0;
  double log_score = 0.0;
};

using BoundTrace = std::vector<double>;

}  // namespace dpvi
