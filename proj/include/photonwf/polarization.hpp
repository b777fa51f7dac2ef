#pragma once

// Definite-helicity transverse unit vectors, spin-1 matrices and the rotation D.

#include "photonwf/types.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

namespace photonwf {

struct SphericalFrame {
    double theta = 0.0, phi = 0.0;
    Vec3 khat, theta_hat, phi_hat;
};

// Pole-safe frame: at theta = 0 or pi the vectors are the phi-limits along the given phi.
inline SphericalFrame frame_limit(double theta, double phi) {
    const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
    SphericalFrame f;
    f.theta = theta;
    f.phi = phi;
    f.khat = {st * cp, st * sp, ct};
    f.theta_hat = {ct * cp, ct * sp, -st};
    f.phi_hat = {-sp, cp, 0.0};
    return f;
}

inline SphericalFrame spherical_frame(double theta, double phi) {
    if (!(theta > 0.0 && theta < pi))
        throw std::invalid_argument("spherical_frame: theta must lie strictly inside (0, pi)");
    return frame_limit(theta, phi);
}

// Gauge chi(theta, phi): either a constant chi0 or the family chi = -m phi.
class GaugeSpec {
public:
    GaugeSpec() = default;
    static GaugeSpec constant(double chi0) { return GaugeSpec(false, chi0, 0); }
    static GaugeSpec azimuthal(int m) { return GaugeSpec(true, 0.0, m); }
    static GaugeSpec azimuthal(double m) {
        if (std::round(m) != m) throw std::invalid_argument("gauge index m must be an integer");
        return GaugeSpec(true, 0.0, static_cast<int>(m));
    }

    bool is_azimuthal() const { return azimuthal_; }
    int m() const { return azimuthal_ ? m_ : 0; }
    double chi0() const { return chi0_; }
    double chi(double /*theta*/, double phi) const { return azimuthal_ ? -m_ * phi : chi0_; }

    std::string tag() const {
        return azimuthal_ ? "chi=-m*phi,m=" + std::to_string(m_) : "chi=" + std::to_string(chi0_);
    }
    bool operator==(const GaugeSpec&) const = default;

private:
    GaugeSpec(bool az, double chi0, int m) : azimuthal_(az), chi0_(chi0), m_(m) {}
    bool azimuthal_ = false;
    double chi0_ = 0.0;
    int m_ = 0;
};

struct HelicityVector {
    CVec3 e;
    Helicity sigma = Helicity::plus;
    GaugeSpec gauge;
};

inline HelicityVector e_helicity(const SphericalFrame& f, Helicity s, const GaugeSpec& gauge) {
    const double sg = sign(s);
    const cplx phase = std::exp(-I * sg * gauge.chi(f.theta, f.phi));
    CVec3 e = (f.theta_hat.cast<cplx>() + I * sg * f.phi_hat.cast<cplx>()) * (phase / std::sqrt(2.0));
    return {e, s, gauge};
}

// Three-term Cartesian expansion for chi = -m phi; finite at both poles.
inline CVec3 e_m_vector(double theta, double phi, Helicity s, int m) {
    const double sg = sign(s), ct = std::cos(theta), st = std::sin(theta);
    const double r8 = 2.0 * std::sqrt(2.0);
    const CVec3 up(1.0, I, 0.0), dn(1.0, -I, 0.0), ez(0.0, 0.0, 1.0);
    return up * ((ct + sg) / r8 * std::exp(I * ((m * sg - 1.0) * phi))) +
           dn * ((ct - sg) / r8 * std::exp(I * ((m * sg + 1.0) * phi))) -
           ez * (st / std::sqrt(2.0) * std::exp(I * (m * sg * phi)));
}

inline HelicityVector e_m(double theta, double phi, Helicity s, double m) {
    if (std::round(m) != m) throw std::invalid_argument("e_m: m must be an integer");
    const int mi = static_cast<int>(m);
    return {e_m_vector(theta, phi, s, mi), s, GaugeSpec::azimuthal(mi)};
}

// Polarization vector for any gauge, valid at the poles as well.
inline CVec3 polarization(double theta, double phi, Helicity s, const GaugeSpec& g) {
    if (g.is_azimuthal()) return e_m_vector(theta, phi, s, g.m());
    return e_m_vector(theta, phi, s, 0) * std::exp(-I * (sign(s) * g.chi0()));
}

// (S_i)_{jk} = -i eps_{ijk}
inline std::array<CMat3, 3> spin_matrices() {
    std::array<CMat3, 3> S;
    for (auto& m : S) m.setZero();
    S[0](1, 2) = -I;
    S[0](2, 1) = I;
    S[1](2, 0) = -I;
    S[1](0, 2) = I;
    S[2](0, 1) = -I;
    S[2](1, 0) = I;
    return S;
}

// exp(-i psi n.S) = I + sin(psi)[n]x + (1 - cos(psi))[n]x^2
inline Mat3 rodrigues(const Vec3& n, double psi) {
    Mat3 K;
    K << 0.0, -n.z(), n.y(), n.z(), 0.0, -n.x(), -n.y(), n.x(), 0.0;
    return Mat3::Identity() + std::sin(psi) * K + (1.0 - std::cos(psi)) * K * K;
}

inline CMat3 rotation_D(double theta, double phi, double chi) {
    const Vec3 khat(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    const Mat3 D = rodrigues(khat, chi) * rodrigues(Vec3::UnitZ(), phi) * rodrigues(Vec3::UnitY(), theta);
    return D.cast<cplx>();
}

// psi = (psi+ + psi-)/sqrt2, phi = -i(psi+ - psi-)/sqrt2
inline std::pair<CVec3, CVec3> helicity_to_linear(const CVec3& plus, const CVec3& minus) {
    const double r = 1.0 / std::sqrt(2.0);
    return {(plus + minus) * r, (plus - minus) * (-I * r)};
}

inline std::pair<CVec3, CVec3> linear_to_helicity(const CVec3& psi, const CVec3& phi) {
    const double r = 1.0 / std::sqrt(2.0);
    return {(psi + I * phi) * r, (psi - I * phi) * r};
}

}  // namespace photonwf
