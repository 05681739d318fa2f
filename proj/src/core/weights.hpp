#pragma once

#include <vector>

#include "core/types.hpp"

namespace dpvi {

// Normalized log weights for unique particles: log_scores - logsumexp.
// Throws when every entry is -infinity.
std::vector<double> log_weights_from_scores(
    const std::vector<double>& log_scores);

// L[Q] = log sum of member scores, the variational lower bound on log Z for
// a set of unique particles.
double variational_bound(const ParticleSet& set);

// Bound of a particle collection that may contain replicas. `multiplicity[k]`
// must equal the number of slots holding a copy of particle k (verified via
// the raw assignment bytes). Kept separate from the engine path: it exists to
// test that replicas never beat unique particles.
double replica_bound(const std::vector<Particle>& particles,
                     const std::vector<int>& multiplicity);

}  // namespace dpvi
