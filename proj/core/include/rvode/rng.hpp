#pragma once

#include <array>
#include <cstdint>

namespace rvode {

// Philox 4x32-10 counter-based generator. A block is a pure function of
// (key, counter), so any (seed, path, step) triple can be regenerated at
// random without touching generator state. This is what makes ensemble
// runs reproducible independently of thread scheduling.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);
};

// Inverse of the standard normal CDF (Wichura's AS241, double precision).
// Relative error below 1e-15 away from the endpoints.
double inverse_normal_cdf(double p);

// Complementary standard normal distribution function.
double normal_ccdf(double x);

/**
 * Seeded stream of standard normal draws addressed by (path, step).
 *
 * Draw k of path j under master seed s is
 *   ppnd( uniform53( philox(key=s, ctr=(k, j)) ) ),
 * independent of call order and of any other stream.
 */
class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint64_t path_index)
      : seed_(master_seed), path_(path_index) {}

  double normal(std::uint64_t step) const;
  double uniform(std::uint64_t step) const;  // in (0,1), 53-bit resolution

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t path_index() const { return path_; }

 private:
  std::uint64_t seed_;
  std::uint64_t path_;
};

}  // namespace rvode
