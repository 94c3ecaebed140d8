#pragma once

// Second-order Taylor jets in six variables: value, gradient and Hessian,
// propagated exactly through +, -, * and /. Enough to differentiate the
// rational vector field twice without finite differences.

#include <array>
#include <cstddef>

namespace mendel {

struct Jet2 {
    static constexpr std::size_t N = 6;

    double v = 0.0;
    std::array<double, N> g{};
    std::array<double, N * N> h{};  // row-major, symmetric

    Jet2() = default;
    Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly

    static Jet2 variable(double value, std::size_t i) {
        Jet2 x(value);
        x.g[i] = 1.0;
        return x;
    }

    double hess(std::size_t i, std::size_t j) const { return h[i * N + j]; }

    Jet2& operator+=(const Jet2& o) {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) g[i] += o.g[i];
        for (std::size_t k = 0; k < N * N; ++k) h[k] += o.h[k];
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) g[i] -= o.g[i];
        for (std::size_t k = 0; k < N * N; ++k) h[k] -= o.h[k];
        return *this;
    }
    Jet2& operator*=(double s) {
        v *= s;
        for (auto& x : g) x *= s;
        for (auto& x : h) x *= s;
        return *this;
    }
};

inline double scalar_value(const Jet2& x) noexcept { return x.v; }

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator-(Jet2 a) { return a *= -1.0; }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    Jet2 r(a.v * b.v);
    for (std::size_t i = 0; i < Jet2::N; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
    for (std::size_t i = 0; i < Jet2::N; ++i)
        for (std::size_t j = 0; j < Jet2::N; ++j) {
            const std::size_t k = i * Jet2::N + j;
            r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
        }
    return r;
}

inline Jet2 reciprocal(const Jet2& b) {
    const double inv = 1.0 / b.v;
    const double inv2 = inv * inv;
    Jet2 r(inv);
    for (std::size_t i = 0; i < Jet2::N; ++i) r.g[i] = -b.g[i] * inv2;
    for (std::size_t i = 0; i < Jet2::N; ++i)
        for (std::size_t j = 0; j < Jet2::N; ++j) {
            const std::size_t k = i * Jet2::N + j;
            r.h[k] = -b.h[k] * inv2 + 2.0 * b.g[i] * b.g[j] * inv2 * inv;
        }
    return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(Jet2 a, double s) { return a *= 1.0 / s; }

}  // namespace mendel
