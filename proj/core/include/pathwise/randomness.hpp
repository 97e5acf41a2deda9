/**
 * @file randomness.hpp
 * @brief Seeded Brownian paths on uniform time grids, with dyadic bridge refinement.
 *
 * Normal variates are produced by a counter-based generator so that any
 * increment, and any refinement midpoint, is reproducible from its key alone:
 *
 *   key(seed, level, index, coord) = m(m(m(m(seed) ^ level) ^ index) ^ coord)
 *   u1 = ((m(key ^ 1) >> 11) + 1) * 2^-53          in (0, 1]
 *   u2 =  (m(key ^ 2) >> 11)      * 2^-53          in [0, 1)
 *   z  = sqrt(-2 ln u1) * cos(2 pi u2)             (Box-Muller, cosine branch)
 *
 * where m is the SplitMix64 finalizer. Level 0 keys drive the base increments
 * (index = step k); level l >= 1 keys drive the midpoints inserted when going
 * from level l-1 to level l (index = coarse step k).
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pathwise/vec.hpp"

namespace pathwise {

/// Uniform grid t0 < t0 + delta < ... < T with N steps.
class TimeGrid {
public:
    TimeGrid(double t0, double T, int N);

    double t0() const { return t0_; }
    double T() const { return T_; }
    int steps() const { return N_; }
    double delta() const { return (T_ - t0_) / N_; }
    double node(int k) const { return t0_ + k * delta(); }
    double horizon() const { return T_ - t0_; }

    /// Same interval, twice the steps.
    TimeGrid refined() const { return TimeGrid(t0_, T_, 2 * N_); }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double t0_;
    double T_;
    int N_;
};

namespace rng {

std::uint64_t splitmix64(std::uint64_t z);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t level, std::uint64_t index,
                         std::uint64_t coord);
/// Standard normal variate attached to a key; pure function of its arguments.
double keyed_normal(std::uint64_t seed, std::uint64_t level, std::uint64_t index,
                    std::uint64_t coord);

}  // namespace rng

/// Discrete Brownian trajectory W_k at the nodes of a TimeGrid, W_0 = 0.
class BrownianPath {
public:
    BrownianPath(TimeGrid grid, int dim, std::vector<Vec> values, std::uint64_t seed, int level);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    int level() const { return level_; }

    std::span<const Vec> values() const { return values_; }
    const Vec& at(int k) const { return values_[static_cast<std::size_t>(k)]; }
    /// W_{k+1} - W_k
    Vec increment(int k) const { return at(k + 1) - at(k); }

private:
    TimeGrid grid_;
    int dim_;
    std::vector<Vec> values_;
    std::uint64_t seed_;
    int level_;
};

BrownianPath generate_path(std::uint64_t seed, const TimeGrid& grid, int dim);

/// Inserts a Brownian-bridge midpoint in every step; coarse nodes are kept bit-exactly.
BrownianPath refine_path(const BrownianPath& path);

/// Applies refine_path `times` times.
BrownianPath refine_path(const BrownianPath& path, int times);

/// CSV with header `k,t,w_1[,w_2]`, one row per node, %.17g precision.
void write_path_csv(std::ostream& out, const BrownianPath& path);
/// Inverse of write_path_csv. The file carries no seed, so the caller supplies it.
BrownianPath read_path_csv(std::istream& in, std::uint64_t seed = 0, int level = 0);

}  // namespace pathwise
