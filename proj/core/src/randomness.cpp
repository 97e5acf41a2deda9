#include "pathwise/randomness.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "pathwise/errors.hpp"
#include "pathwise/io.hpp"

namespace pathwise {

TimeGrid::TimeGrid(double t0, double T, int N) : t0_(t0), T_(T), N_(N) {
    if (!(t0 < T)) {
        throw ConfigError("time grid requires t0 < T (got t0=" + format_double(t0) +
                          ", T=" + format_double(T) + ")");
    }
    if (N < 1) {
        throw ConfigError("time grid requires N >= 1 (got " + std::to_string(N) + ")");
    }
}

namespace rng {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t level, std::uint64_t index,
                         std::uint64_t coord) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ level);
    h = splitmix64(h ^ index);
    return splitmix64(h ^ coord);
}

double keyed_normal(std::uint64_t seed, std::uint64_t level, std::uint64_t index,
                    std::uint64_t coord) {
    constexpr double kUnit = 0x1.0p-53;
    const std::uint64_t key = stream_key(seed, level, index, coord);
    const double u1 = static_cast<double>((splitmix64(key ^ 1U) >> 11) + 1U) * kUnit;
    const double u2 = static_cast<double>(splitmix64(key ^ 2U) >> 11) * kUnit;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rng

BrownianPath::BrownianPath(TimeGrid grid, int dim, std::vector<Vec> values, std::uint64_t seed,
                           int level)
    : grid_(grid), dim_(dim), values_(std::move(values)), seed_(seed), level_(level) {
    if (dim_ != 1 && dim_ != 2) {
        throw ConfigError("Brownian path dimension must be 1 or 2 (got " + std::to_string(dim_) +
                          ")");
    }
    if (values_.size() != static_cast<std::size_t>(grid_.steps()) + 1) {
        throw ConfigError("Brownian path needs one value per grid node");
    }
    if (!(values_.front() == Vec{})) {
        throw ConfigError("Brownian path must start at the origin");
    }
}

BrownianPath generate_path(std::uint64_t seed, const TimeGrid& grid, int dim) {
    if (dim != 1 && dim != 2) {
        throw ConfigError("Brownian path dimension must be 1 or 2 (got " + std::to_string(dim) +
                          ")");
    }
    const double scale = std::sqrt(grid.delta());
    std::vector<Vec> w(static_cast<std::size_t>(grid.steps()) + 1);
    for (int k = 0; k < grid.steps(); ++k) {
        Vec step;
        for (int d = 0; d < dim; ++d) {
            step[static_cast<std::size_t>(d)] =
                scale * rng::keyed_normal(seed, 0, static_cast<std::uint64_t>(k),
                                          static_cast<std::uint64_t>(d));
        }
        w[static_cast<std::size_t>(k) + 1] = w[static_cast<std::size_t>(k)] + step;
    }
    return BrownianPath(grid, dim, std::move(w), seed, 0);
}

BrownianPath refine_path(const BrownianPath& path) {
    const TimeGrid fine = path.grid().refined();
    const int level = path.level() + 1;
    // Conditional law of the midpoint given both ends: mean = average, var = delta/4.
    const double sd = 0.5 * std::sqrt(path.grid().delta());
    const auto coarse = path.values();
    std::vector<Vec> w(static_cast<std::size_t>(fine.steps()) + 1);
    for (int k = 0; k < path.grid().steps(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        Vec mid = 0.5 * (coarse[ku] + coarse[ku + 1]);
        for (int d = 0; d < path.dim(); ++d) {
            mid[static_cast<std::size_t>(d)] +=
                sd * rng::keyed_normal(path.seed(), static_cast<std::uint64_t>(level),
                                       static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(d));
        }
        w[2 * ku] = coarse[ku];
        w[2 * ku + 1] = mid;
    }
    w.back() = coarse.back();
    return BrownianPath(fine, path.dim(), std::move(w), path.seed(), level);
}

BrownianPath refine_path(const BrownianPath& path, int times) {
    BrownianPath out = path;
    for (int i = 0; i < times; ++i) out = refine_path(out);
    return out;
}

void write_path_csv(std::ostream& out, const BrownianPath& path) {
    out << "k,t,w_1";
    if (path.dim() == 2) out << ",w_2";
    out << '\n';
    for (int k = 0; k <= path.grid().steps(); ++k) {
        out << k << ',' << format_double(path.grid().node(k));
        for (int d = 0; d < path.dim(); ++d) {
            out << ',' << format_double(path.at(k)[static_cast<std::size_t>(d)]);
        }
        out << '\n';
    }
}

BrownianPath read_path_csv(std::istream& in, std::uint64_t seed, int level) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("path CSV: missing header");
    int dim = 0;
    if (line == "k,t,w_1") {
        dim = 1;
    } else if (line == "k,t,w_1,w_2") {
        dim = 2;
    } else {
        throw ConfigError("path CSV: unexpected header '" + line + "'");
    }
    std::vector<double> times;
    std::vector<Vec> values;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("path CSV line " + std::to_string(row) + ": bad number '" +
                                  cell + "'");
            }
        }
        if (cells.size() != static_cast<std::size_t>(2 + dim)) {
            throw ConfigError("path CSV line " + std::to_string(row) + ": expected " +
                              std::to_string(2 + dim) + " columns");
        }
        times.push_back(cells[1]);
        values.emplace_back(cells[2], dim == 2 ? cells[3] : 0.0);
    }
    if (times.size() < 2) throw ConfigError("path CSV: need at least two nodes");
    const TimeGrid grid(times.front(), times.back(), static_cast<int>(times.size()) - 1);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - grid.node(static_cast<int>(k))) > 1e-9 * (1.0 + grid.horizon())) {
            throw ConfigError("path CSV: time column is not uniformly spaced at row " +
                              std::to_string(k + 2));
        }
    }
    return BrownianPath(grid, dim, std::move(values), seed, level);
}

}  // namespace pathwise
