#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "bilevel/core.hpp"

namespace bilevel {

/**
 * Stream identifier derived from a call's inputs.
 *
 * Solvers never share an engine: each call hashes (purpose, x, extra) into a
 * stream index and seeds a fresh engine from (master seed, stream). Results
 * therefore do not depend on call order or thread scheduling.
 */
class StreamKey {
 public:
  explicit StreamKey(std::string_view purpose);

  StreamKey& mix(std::uint64_t value);
  StreamKey& mix(double value);
  StreamKey& mix(const Vector& values);

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_;
};

std::mt19937_64 make_engine(std::uint64_t master_seed, const StreamKey& key);

/**
 * Latin-hypercube design in the box [lo, hi]: coordinate j of sample k lies
 * in stratum pi_j(k), jittered uniformly inside it.
 */
std::vector<Vector> latin_hypercube(const Vector& lo, const Vector& hi, int count,
                                    std::mt19937_64& engine);

}  // namespace bilevel
