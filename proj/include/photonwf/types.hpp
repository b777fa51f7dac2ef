#pragma once

// Shared value types. All quantities are in natural units: hbar = c = eps0 = mu0 = 1.

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace photonwf {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMat3 = Eigen::Matrix3cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

enum class Helicity : int { minus = -1, plus = 1 };

constexpr int sign(Helicity h) { return static_cast<int>(h); }
constexpr Helicity flip(Helicity h) { return h == Helicity::plus ? Helicity::minus : Helicity::plus; }
// Storage slot: plus -> 0, minus -> 1.
constexpr int slot(Helicity h) { return h == Helicity::plus ? 0 : 1; }
inline constexpr Helicity kHelicities[2] = {Helicity::plus, Helicity::minus};

inline Helicity helicity_from_int(int s) {
    if (s == 1) return Helicity::plus;
    if (s == -1) return Helicity::minus;
    throw std::invalid_argument("helicity must be +1 or -1, got " + std::to_string(s));
}

// Weight exponent alpha of omega_k^alpha: -1/2 (vector potential), 0 (Landau-Peierls),
// +1/2 (field-like).
class AlphaWeight {
public:
    static constexpr AlphaWeight minus_half() { return AlphaWeight(-1); }
    static constexpr AlphaWeight zero() { return AlphaWeight(0); }
    static constexpr AlphaWeight plus_half() { return AlphaWeight(1); }

    static AlphaWeight from_double(double a) {
        if (a == -0.5) return minus_half();
        if (a == 0.0) return zero();
        if (a == 0.5) return plus_half();
        throw std::invalid_argument("alpha must be one of -1/2, 0, 1/2, got " + std::to_string(a));
    }

    constexpr double value() const { return 0.5 * twice_; }
    constexpr AlphaWeight negated() const { return AlphaWeight(-twice_); }
    constexpr bool operator==(const AlphaWeight&) const = default;

private:
    constexpr explicit AlphaWeight(int twice) : twice_(twice) {}
    int twice_;
};

// Eigen's cross() conjugates for complex scalars; this is the plain bilinear product.
template <class A, class B>
auto cross(const A& a, const B& b) {
    using S = decltype(a[0] * b[0]);
    return Eigen::Matrix<S, 3, 1>(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

inline Vec3 cartesian(double k, double theta, double phi) {
    return {k * std::sin(theta) * std::cos(phi), k * std::sin(theta) * std::sin(phi), k * std::cos(theta)};
}

}  // namespace photonwf
