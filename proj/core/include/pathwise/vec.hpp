/**
 * @file vec.hpp
 * @brief Small fixed-size vector used for points, gradients and controls.
 *
 * The library supports state dimensions 1 and 2. Every point is stored as a
 * two-component array; in 1-D the second component is kept at zero so dot
 * products and norms need no dimension argument.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace pathwise {

inline constexpr int kMaxDim = 2;

struct Vec {
    std::array<double, kMaxDim> c{0.0, 0.0};

    constexpr Vec() = default;
    constexpr Vec(double x, double y = 0.0) : c{x, y} {}

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    constexpr Vec& operator+=(const Vec& o) { c[0] += o.c[0]; c[1] += o.c[1]; return *this; }
    constexpr Vec& operator-=(const Vec& o) { c[0] -= o.c[0]; c[1] -= o.c[1]; return *this; }
    constexpr Vec& operator*=(double s) { c[0] *= s; c[1] *= s; return *this; }

    friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend constexpr Vec operator-(const Vec& a) { return Vec{-a.c[0], -a.c[1]}; }
    friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
    friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
    friend constexpr bool operator==(const Vec&, const Vec&) = default;
};

constexpr double dot(const Vec& a, const Vec& b) { return a.c[0] * b.c[0] + a.c[1] * b.c[1]; }
constexpr double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::hypot(a.c[0], a.c[1]); }

/// Row-major 2x2 matrix; in 1-D only entry (0,0) is meaningful.
struct Mat2 {
    std::array<double, 4> m{0.0, 0.0, 0.0, 0.0};

    constexpr double operator()(int r, int col) const { return m[static_cast<std::size_t>(2 * r + col)]; }
    constexpr double& operator()(int r, int col) { return m[static_cast<std::size_t>(2 * r + col)]; }

    constexpr Vec apply(const Vec& v) const {
        return Vec{m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
    }
    constexpr Vec apply_transposed(const Vec& v) const {
        return Vec{m[0] * v[0] + m[2] * v[1], m[1] * v[0] + m[3] * v[1]};
    }
};

}  // namespace pathwise
