#pragma once

// Shared plumbing between solver modules; not part of the public surface.

#include <cstdint>
#include <vector>

#include "bilevel/rng.hpp"
#include "bilevel/sets.hpp"
#include "bilevel/spg.hpp"
#include "bilevel/tolerance.hpp"

namespace bilevel {

SpgOptions spg_options(const ToleranceConfig& tol);
PenaltyOptions penalty_options(const ToleranceConfig& tol);

/// True when `candidate` is lower than `incumbent` by more than rounding noise.
bool improves(double candidate, double incumbent);

/// Center of the set followed by projected Latin-hypercube points.
std::vector<Vector> follower_starts(const FollowerSet& set, int count, std::uint64_t seed,
                                    const StreamKey& key);

}  // namespace bilevel
