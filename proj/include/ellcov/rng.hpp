#pragma once

#include <cstdint>
#include <random>

namespace ellcov {

/// Deterministic random source for Monte-Carlo replications.
///
/// Every replication owns a private generator derived from
/// (base_seed, replication_index), so loss vectors are identical no matter
/// how replications are scheduled across threads. Normal and gamma variates
/// come from fixed transformation/rejection schemes (Box-Muller,
/// Marsaglia-Tsang) so the draw sequence is owned by this class instead of
/// the standard library's unspecified distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Generator for one replication, seeded from a 128-bit mix of
  /// (base_seed, replication_index).
  static Rng for_replication(std::uint64_t base_seed, std::uint64_t replication);

  std::uint64_t next_u64();

  /// Uniform variate strictly inside (0, 1).
  double uniform();

  /// Standard normal variate (Box-Muller, one value cached per pair).
  double normal();

  /// Gamma(shape, rate) variate. Marsaglia-Tsang squeeze/rejection for
  /// shape >= 1, boosted by the u^(1/shape) transform below 1; exact in
  /// distribution, no central-limit shortcuts.
  double gamma(double shape, double rate);

 private:
  Rng() = default;

  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace ellcov
