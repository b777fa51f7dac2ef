#pragma once

// Spherical product quadrature grid in k-space.
// Node index layout: idx = (ik * ntheta + itheta) * nphi + iphi.

#include "photonwf/types.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonwf {

enum class Normalization { box, continuum };

inline std::string to_string(Normalization n) { return n == Normalization::box ? "box" : "continuum"; }

inline Normalization normalization_from_string(const std::string& s) {
    if (s == "box") return Normalization::box;
    if (s == "continuum") return Normalization::continuum;
    throw std::invalid_argument("normalization must be 'box' or 'continuum', got '" + s + "'");
}

struct QuadratureRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes (ascending) and weights on [a, b].
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule q;
    q.x.resize(n);
    q.w.resize(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        q.x[i] = mid - half * z;
        q.x[n - 1 - i] = mid + half * z;
        q.w[i] = q.w[n - 1 - i] = half * w;
    }
    return q;
}

// 3-point first-derivative stencil: f'(x_i) ~ sum_j c[j] f(x_{first + j}).
struct Stencil3 {
    int first = 0;
    std::array<double, 3> c{};
};

inline std::vector<Stencil3> lagrange_stencils(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    if (n < 3) throw std::invalid_argument("lagrange_stencils: need at least 3 nodes");
    std::vector<Stencil3> out(n);
    for (int i = 0; i < n; ++i) {
        const int j0 = std::min(std::max(i - 1, 0), n - 3);
        Stencil3 s;
        s.first = j0;
        for (int a = 0; a < 3; ++a) {
            double sum = 0.0;
            for (int b = 0; b < 3; ++b) {
                if (b == a) continue;
                double p = 1.0 / (x[j0 + a] - x[j0 + b]);
                for (int c = 0; c < 3; ++c)
                    if (c != a && c != b) p *= (x[i] - x[j0 + c]) / (x[j0 + a] - x[j0 + c]);
                sum += p;
            }
            s.c[a] = sum;
        }
        out[i] = s;
    }
    return out;
}

struct GridSpec {
    int nk = 8;
    int ntheta = 8;
    int nphi = 16;
    double kmin = 1.0;
    double kmax = 2.0;
    Normalization mode = Normalization::continuum;
    double volume = 1.0;  // box mode only
};

class KGrid {
public:
    explicit KGrid(const GridSpec& spec) : spec_(spec) {
        if (spec.nk < 2 || spec.ntheta < 2 || spec.nphi < 2)
            throw std::invalid_argument("build_grid: node counts must be >= 2");
        if (!(spec.kmin > 0.0))
            throw std::invalid_argument("build_grid: kmin must be > 0 (1/k terms are singular at k=0)");
        if (!(spec.kmax > spec.kmin)) throw std::invalid_argument("build_grid: need kmin < kmax");
        if (!(spec.volume > 0.0)) throw std::invalid_argument("build_grid: volume must be > 0");

        auto rk = gauss_legendre(spec.nk, spec.kmin, spec.kmax);
        k_ = rk.x;
        wk_ = rk.w;
        auto rc = gauss_legendre(spec.ntheta);
        // ascending theta <=> descending cos(theta)
        for (int i = 0; i < spec.ntheta; ++i) {
            const double c = -rc.x[i];
            theta_.push_back(std::acos(c));
            cos_theta_.push_back(c);
            sin_theta_.push_back(std::sqrt(1.0 - c * c));
            wtheta_.push_back(rc.w[i]);
        }
        for (int j = 0; j < spec.nphi; ++j) {
            const double p = 2.0 * pi * j / spec.nphi;
            phi_.push_back(p);
            cos_phi_.push_back(std::cos(p));
            sin_phi_.push_back(std::sin(p));
        }
        if (spec.nk >= 3) kstencil_ = lagrange_stencils(k_);
        if (spec.ntheta >= 3) tstencil_ = lagrange_stencils(theta_);
    }

    const GridSpec& spec() const { return spec_; }
    int nk() const { return spec_.nk; }
    int ntheta() const { return spec_.ntheta; }
    int nphi() const { return spec_.nphi; }
    std::size_t size() const { return static_cast<std::size_t>(spec_.nk) * spec_.ntheta * spec_.nphi; }

    std::size_t index(int ik, int it, int ip) const {
        return (static_cast<std::size_t>(ik) * spec_.ntheta + it) * spec_.nphi + ip;
    }
    int ik_of(std::size_t i) const { return static_cast<int>(i / (spec_.ntheta * spec_.nphi)); }
    int itheta_of(std::size_t i) const { return static_cast<int>((i / spec_.nphi) % spec_.ntheta); }
    int iphi_of(std::size_t i) const { return static_cast<int>(i % spec_.nphi); }

    double k(std::size_t i) const { return k_[ik_of(i)]; }
    double theta(std::size_t i) const { return theta_[itheta_of(i)]; }
    double phi(std::size_t i) const { return phi_[iphi_of(i)]; }
    double sin_theta(std::size_t i) const { return sin_theta_[itheta_of(i)]; }
    double cos_theta(std::size_t i) const { return cos_theta_[itheta_of(i)]; }
    double sin_phi(std::size_t i) const { return sin_phi_[iphi_of(i)]; }
    double cos_phi(std::size_t i) const { return cos_phi_[iphi_of(i)]; }

    // Quadrature weight for the integral over d^3k.
    double weight(std::size_t i) const {
        const int ik = ik_of(i);
        return wk_[ik] * k_[ik] * k_[ik] * wtheta_[itheta_of(i)] * (2.0 * pi / spec_.nphi);
    }

    Vec3 khat(std::size_t i) const {
        const double s = sin_theta(i);
        return {s * cos_phi(i), s * sin_phi(i), cos_theta(i)};
    }
    Vec3 kvec(std::size_t i) const { return k(i) * khat(i); }

    const std::vector<double>& k_nodes() const { return k_; }
    const std::vector<double>& k_weights() const { return wk_; }
    const std::vector<double>& theta_nodes() const { return theta_; }
    const std::vector<double>& theta_weights() const { return wtheta_; }
    const std::vector<double>& phi_nodes() const { return phi_; }

    const Stencil3& radial_stencil(int ik) const { return kstencil_.at(ik); }
    const Stencil3& polar_stencil(int it) const { return tstencil_.at(it); }
    double phi_step() const { return 2.0 * pi / spec_.nphi; }

    double max_spacing_k() const { return max_gap(k_); }
    double max_spacing_theta() const {
        double g = std::max(theta_.front(), pi - theta_.back());
        return std::max(g, max_gap(theta_));
    }
    double max_spacing_phi() const { return phi_step(); }

    bool same_layout(const KGrid& o) const {
        return spec_.nk == o.spec_.nk && spec_.ntheta == o.spec_.ntheta && spec_.nphi == o.spec_.nphi &&
               spec_.kmin == o.spec_.kmin && spec_.kmax == o.spec_.kmax;
    }

private:
    static double max_gap(const std::vector<double>& x) {
        double g = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i) g = std::max(g, x[i] - x[i - 1]);
        return g;
    }

    GridSpec spec_;
    std::vector<double> k_, wk_;
    std::vector<double> theta_, wtheta_, cos_theta_, sin_theta_;
    std::vector<double> phi_, cos_phi_, sin_phi_;
    std::vector<Stencil3> kstencil_, tstencil_;
};

inline KGrid build_grid(int nk, int ntheta, int nphi, double kmin, double kmax,
                        Normalization mode = Normalization::continuum, double volume = 1.0) {
    return KGrid(GridSpec{nk, ntheta, nphi, kmin, kmax, mode, volume});
}

inline cplx quadrature(std::span<const cplx> f, const KGrid& g) {
    if (f.size() != g.size())
        throw std::invalid_argument("quadrature: got " + std::to_string(f.size()) + " values for " +
                                    std::to_string(g.size()) + " nodes");
    cplx s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += g.weight(i) * f[i];
    return s;
}

inline double quadrature(std::span<const double> f, const KGrid& g) {
    if (f.size() != g.size())
        throw std::invalid_argument("quadrature: got " + std::to_string(f.size()) + " values for " +
                                    std::to_string(g.size()) + " nodes");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += g.weight(i) * f[i];
    return s;
}

template <class F>
std::vector<cplx> sample(const KGrid& g, F&& f) {
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.k(i), g.theta(i), g.phi(i));
    return out;
}

inline KGrid refine(const KGrid& g) {
    GridSpec s = g.spec();
    s.nk *= 2;
    s.ntheta *= 2;
    s.nphi *= 2;
    return KGrid(s);
}

}  // namespace photonwf
