#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holo/currents.hpp"
#include "holo/lie.hpp"
#include "holo/rational.hpp"
#include "holo/surface.hpp"

namespace holo {

/// Counter-based generator "splitmix64-ctr-v1".
///
///   key      = mix(seed ^ mix(stream + 0x632BE59BD9B4E019))
///   word(c)  = mix(key + (c + 1) * 0x9E3779B97F4A7C15)
///   mix(z)   : z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
///              z *= 0x94D049BB133111EB; z ^= z >> 31
///   uniform  = (word >> 11) * 2^-53
///   normal   = Box-Muller on two consecutive uniforms u1, u2 (u1 mapped to 1 - u1),
///              returning sqrt(-2 ln u1) cos(2 pi u2); the sine half is discarded.
class CounterRng {
 public:
  static constexpr const char* kAlgorithm = "splitmix64-ctr-v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  cplx complex_normal();
  /// Integer in [lo, hi].
  int integer(int lo, int hi);

  std::uint64_t counter() const noexcept { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

namespace random {

/// Traceless matrix with Frobenius norm exactly `norm`.
lie::AlgebraElement algebra(CounterRng& rng, int n, double norm);
/// Frobenius norm drawn uniformly from [0, max_norm].
lie::AlgebraElement algebra_upto(CounterRng& rng, int n, double max_norm);

/// Random rational function with poles among the punctures (order <= max_order)
/// and a polynomial part of degree <= max_degree; residues and coefficients of
/// modulus about `scale`.
RationalFunction rational(CounterRng& rng, const std::vector<cplx>& punctures, int max_order, int max_degree,
                          double scale);

/// Sum of `terms` random CurrentTerms.
AlgebraCurrent current(CounterRng& rng, const SurfaceModel& s, int n, int terms, double scale);
/// Random form with simple poles at the punctures plus a small polynomial part.
OneForm fuchsian_form(CounterRng& rng, const SurfaceModel& s, int n, double scale);
/// exp(X_1) ... exp(X_factors) with polynomial/pole currents X_i of size about `scale`.
GroupCurrent group_current(CounterRng& rng, const SurfaceModel& s, int n, int factors, double scale);

}  // namespace random

}  // namespace holo
