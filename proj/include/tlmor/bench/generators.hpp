#pragma once

#include <cstdint>

#include "tlmor/sysmodel.hpp"

namespace tlmor::bench {

/// Unit rod with Dirichlet ends, central differences on n interior nodes:
/// A = (n+1)^2 tridiag(1, -2, 1), B = (n+1)^2 e_1, C = e_{ceil(n/2)}^T.
StateSpace generate_heat_rod(Index n);

/// A = M - (||M||_2 + 1) I with M_ij ~ N(0, 1/n); B, C standard normal. Deterministic per seed.
StateSpace generate_random_stable(Index n, Index m, Index p, std::uint64_t seed);

/// Random data with positive real parts over the mirrored spectral range of sys, closed under
/// conjugation, with right and left directions. Roughly half of the points come in complex pairs when
/// `pairs` is set.
InterpolationData random_interpolation(const StateSpace& sys, Index r, std::uint64_t seed, bool pairs = true);

/// `steps` batches of `per_step` points each.
std::vector<InterpolationData> random_schedule(const StateSpace& sys, int steps, Index per_step, std::uint64_t seed);

/// Real points log-spaced over the mirrored spectral range, split into batches of `per_step`,
/// with random real directions on both sides (ones for single channels).
std::vector<InterpolationData> logspaced_schedule(const StateSpace& sys, Index count, Index per_step,
                                                  std::uint64_t seed);

/// Splits data into consecutive batches of at most `per_step` entries without separating conjugate pairs.
std::vector<InterpolationData> split_batches(const InterpolationData& data, Index per_step);

}  // namespace tlmor::bench
