#include "bilevel/rng.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace bilevel {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

StreamKey::StreamKey(std::string_view purpose) : state_(0x243f6a8885a308d3ULL) {
  for (char c : purpose) mix(static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
}

StreamKey& StreamKey::mix(std::uint64_t value) {
  state_ = splitmix64(state_ ^ splitmix64(value));
  return *this;
}

StreamKey& StreamKey::mix(double value) {
  // -0.0 and 0.0 must hash alike.
  return mix(std::bit_cast<std::uint64_t>(value == 0.0 ? 0.0 : value));
}

StreamKey& StreamKey::mix(const Vector& values) {
  mix(static_cast<std::uint64_t>(values.size()));
  for (double v : values) mix(v);
  return *this;
}

std::mt19937_64 make_engine(std::uint64_t master_seed, const StreamKey& key) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(key.value()), static_cast<std::uint32_t>(key.value() >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Vector> latin_hypercube(const Vector& lo, const Vector& hi, int count,
                                    std::mt19937_64& engine) {
  std::vector<Vector> samples;
  if (count <= 0) return samples;
  const auto dim = lo.size();
  samples.assign(count, Vector(dim));
  // 53-bit uniform draws in [0, 1); portable across standard libraries.
  auto unit = [](std::mt19937_64& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; };
  std::vector<int> strata(count);
  for (Eigen::Index j = 0; j < dim; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with our own index draws: std::shuffle is implementation-defined.
    for (int k = count - 1; k > 0; --k) {
      const auto r = static_cast<int>(unit(engine) * (k + 1));
      std::swap(strata[k], strata[std::min(r, k)]);
    }
    for (int k = 0; k < count; ++k) {
      const double u = (strata[k] + unit(engine)) / count;
      samples[k][j] = lo[j] + (hi[j] - lo[j]) * u;
    }
  }
  return samples;
}

}  // namespace bilevel
