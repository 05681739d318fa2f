#pragma once

#include <functional>

#include "core/model.hpp"

namespace dpvi {

// Systematic-scan collapsed Gibbs sampler driven by the same conditional
// score vectors the coordinate-ascent engine uses; sampling replaces the
// top-K selection. The callback sees the particle after every sweep.
void collapsed_gibbs(const DiscreteModel& model, Particle& p, int sweeps,
                     Rng& rng,
                     const std::function<void(int, const Particle&)>& on_sweep =
                         nullptr);

}  // namespace dpvi
