#pragma once

// Finite-difference position, J_z and boost operators on spherical k-grids, plus the residual
// checks built on them.
//
// Position operator (alpha-free part):
//   R_a = i d_a + (khat x S)_a / k + (khat.S) phihat_a (m - cos theta) / (k sin theta)
// and r^(alpha) = k^alpha R k^-alpha (factored) or R - i alpha khat_a / k (direct).

#include "photonwf/grid_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace photonwf {

enum class AlphaForm { factored, direct };

struct PositionOptions {
    bool include_cot_term = true;
    bool include_spin_term = true;
    bool include_alpha_term = true;
    AlphaForm alpha_form = AlphaForm::factored;
};

using Triple = std::array<GridField, 3>;

namespace detail {

inline void require_stencil_grid(const KGrid& g) {
    if (g.nk() < 4 || g.ntheta() < 4 || g.nphi() < 4)
        throw std::invalid_argument("operator needs at least 4 nodes per coordinate");
}

struct Partials {
    CVec3 dk, dth, dph;
};

inline Partials partials(const KGrid& g, const FieldArray& f, std::size_t i) {
    const int ik = g.ik_of(i), it = g.itheta_of(i), ip = g.iphi_of(i), np = g.nphi();
    Partials p;
    const Stencil3& sk = g.radial_stencil(ik);
    const Stencil3& st = g.polar_stencil(it);
    p.dk = sk.c[0] * f[g.index(sk.first, it, ip)] + sk.c[1] * f[g.index(sk.first + 1, it, ip)] +
           sk.c[2] * f[g.index(sk.first + 2, it, ip)];
    p.dth = st.c[0] * f[g.index(ik, st.first, ip)] + st.c[1] * f[g.index(ik, st.first + 1, ip)] +
            st.c[2] * f[g.index(ik, st.first + 2, ip)];
    p.dph = (f[g.index(ik, it, (ip + 1) % np)] - f[g.index(ik, it, (ip + np - 1) % np)]) / (2.0 * g.phi_step());
    return p;
}

inline Vec3 theta_hat(const KGrid& g, std::size_t i) {
    return {g.cos_theta(i) * g.cos_phi(i), g.cos_theta(i) * g.sin_phi(i), -g.sin_theta(i)};
}
inline Vec3 phi_hat(const KGrid& g, std::size_t i) { return {-g.sin_phi(i), g.cos_phi(i), 0.0}; }

// R_a f for a = x, y, z on one helicity array; alpha_direct adds -i alpha khat_a / k.
inline std::array<FieldArray, 3> position_core(const KGrid& g, const FieldArray& f, int m, bool cot,
                                               double alpha_direct, bool spin = true) {
    std::array<FieldArray, 3> out;
    for (auto& o : out) o.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Partials p = partials(g, f, i);
        const double k = g.k(i), st = g.sin_theta(i), ct = g.cos_theta(i);
        const Vec3 kh = g.khat(i), th = theta_hat(g, i), ph = phi_hat(g, i);
        const CVec3& v = f[i];
        const cplx kdotf = kh.cast<cplx>().dot(v);
        const CVec3 Skf = I * cross(kh.cast<cplx>(), v);
        const double gauge_term = ((cot ? m - ct : double(m)) / st) / k;
        for (int a = 0; a < 3; ++a) {
            CVec3 grad = kh[a] * p.dk + (th[a] / k) * p.dth + (ph[a] / (k * st)) * p.dph;
            CVec3 ea = CVec3::Zero();
            ea[a] = 1.0;
            const CVec3 kxS = -I * (ea * kdotf - kh.cast<cplx>() * v[a]);
            out[a][i] = I * grad + (spin ? CVec3(kxS / k) : CVec3::Zero()) + Skf * (ph[a] * gauge_term) - I * (alpha_direct * kh[a] / k) * v;
        }
    }
    return out;
}

inline FieldArray jz_core(const KGrid& g, const FieldArray& f) {
    FieldArray out(g.size());
    const int np = g.nphi();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const int ik = g.ik_of(i), it = g.itheta_of(i), ip = g.iphi_of(i);
        const CVec3 dph =
            (f[g.index(ik, it, (ip + 1) % np)] - f[g.index(ik, it, (ip + np - 1) % np)]) / (2.0 * g.phi_step());
        const CVec3& v = f[i];
        out[i] = -I * dph + CVec3(-I * v.y(), I * v.x(), 0.0);
    }
    return out;
}

inline void scale_k_power(const KGrid& g, FieldArray& f, double p) {
    if (p == 0.0) return;
    for (std::size_t i = 0; i < g.size(); ++i) f[i] *= std::pow(g.k(i), p);
}

inline Triple make_triple(const GridField& like) {
    return {GridField(like.grid_ptr(), like.alpha(), like.gauge()), GridField(like.grid_ptr(), like.alpha(), like.gauge()),
            GridField(like.grid_ptr(), like.alpha(), like.gauge())};
}

}  // namespace detail

inline Triple apply_position(const GridField& psi, AlphaWeight alpha, const GaugeSpec& gauge,
                             const PositionOptions& opt = {}) {
    const KGrid& g = psi.grid();
    detail::require_stencil_grid(g);
    Triple out = detail::make_triple(psi);
    const double a = opt.include_alpha_term ? alpha.value() : 0.0;
    for (Helicity s : kHelicities) {
        FieldArray f = psi.values(s);
        std::array<FieldArray, 3> r;
        if (opt.alpha_form == AlphaForm::factored) {
            detail::scale_k_power(g, f, -a);
            r = detail::position_core(g, f, gauge.m(), opt.include_cot_term, 0.0, opt.include_spin_term);
            for (auto& c : r) detail::scale_k_power(g, c, a);
        } else {
            r = detail::position_core(g, f, gauge.m(), opt.include_cot_term, a, opt.include_spin_term);
        }
        for (int c = 0; c < 3; ++c) out[c].values(s) = std::move(r[c]);
    }
    return out;
}

// Same operator written as k^alpha D (i grad) k^-alpha D^T with D = D(theta, phi, chi).
inline Triple apply_position_dform(const GridField& psi, AlphaWeight alpha, const GaugeSpec& gauge) {
    const KGrid& g = psi.grid();
    detail::require_stencil_grid(g);
    Triple out = detail::make_triple(psi);
    const double a = alpha.value();
    std::vector<CMat3> D(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        D[i] = rotation_D(g.theta(i), g.phi(i), gauge.chi(g.theta(i), g.phi(i)));
    for (Helicity s : kHelicities) {
        const FieldArray& f = psi.values(s);
        FieldArray body(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) body[i] = D[i].transpose() * f[i] * std::pow(g.k(i), -a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto p = detail::partials(g, body, i);
            const double k = g.k(i), st = g.sin_theta(i);
            const Vec3 kh = g.khat(i), th = detail::theta_hat(g, i), ph = detail::phi_hat(g, i);
            for (int c = 0; c < 3; ++c) {
                const CVec3 grad = kh[c] * p.dk + (th[c] / k) * p.dth + (ph[c] / (k * st)) * p.dph;
                out[c].values(s)[i] = std::pow(k, a) * (D[i] * (I * grad));
            }
        }
    }
    return out;
}

inline GridField apply_jz(const GridField& psi) {
    GridField out(psi.grid_ptr(), psi.alpha(), psi.gauge());
    for (Helicity s : kHelicities) out.values(s) = detail::jz_core(psi.grid(), psi.values(s));
    return out;
}

// K^(alpha) = k^(alpha-1/2) [k (i grad) + khat x S] k^(1/2-alpha)
inline Triple apply_boost(const GridField& psi, AlphaWeight alpha) {
    const KGrid& g = psi.grid();
    detail::require_stencil_grid(g);
    Triple out = detail::make_triple(psi);
    const double pre = alpha.value() - 0.5;
    for (Helicity s : kHelicities) {
        FieldArray f = psi.values(s);
        detail::scale_k_power(g, f, -pre);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto p = detail::partials(g, f, i);
            const double k = g.k(i), st = g.sin_theta(i);
            const Vec3 kh = g.khat(i), th = detail::theta_hat(g, i), ph = detail::phi_hat(g, i);
            const cplx kdotf = kh.cast<cplx>().dot(f[i]);
            for (int a = 0; a < 3; ++a) {
                const CVec3 grad = kh[a] * p.dk + (th[a] / k) * p.dth + (ph[a] / (k * st)) * p.dph;
                CVec3 ea = CVec3::Zero();
                ea[a] = 1.0;
                const CVec3 kxS = -I * (ea * kdotf - kh.cast<cplx>() * f[i][a]);
                out[a].values(s)[i] = (k * (I * grad) + kxS) * std::pow(k, pre);
            }
        }
    }
    return out;
}

// ---- residuals -------------------------------------------------------------------------

inline double triple_norm(const Triple& t) {
    double s = 0.0;
    for (const auto& c : t) s += std::real(inner(c, c));
    return std::sqrt(s);
}

// ||r psi - r0 psi|| / ||psi||
inline double eigen_residual(const GridField& psi, const Vec3& r0, AlphaWeight alpha, const GaugeSpec& gauge,
                             const PositionOptions& opt = {}) {
    Triple r = apply_position(psi, alpha, gauge, opt);
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        GridField d = r[a] - cplx(r0[a]) * psi;
        s += std::real(inner(d, d));
    }
    return std::sqrt(s) / norm(psi);
}

inline double commutator_residual(const GridField& psi, int i, int j, AlphaWeight alpha, const GaugeSpec& gauge,
                                  const PositionOptions& opt = {}) {
    if (i < 0 || i > 2 || j < 0 || j > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    if (i == j) return 0.0;
    Triple r = apply_position(psi, alpha, gauge, opt);
    GridField a = apply_position(r[j], alpha, gauge, opt)[i];
    GridField b = apply_position(r[i], alpha, gauge, opt)[j];
    return norm(a - b) / norm(psi);
}

// ||[J_z, r_k] psi - i eps_{zkl} r_l psi|| / ||psi||
inline double jz_commutator_residual(const GridField& psi, int k, AlphaWeight alpha, const GaugeSpec& gauge,
                                     const PositionOptions& opt = {}) {
    if (k < 0 || k > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
    Triple r = apply_position(psi, alpha, gauge, opt);
    GridField lhs = apply_jz(r[k]) - apply_position(apply_jz(psi), alpha, gauge, opt)[k];
    if (k == 0) lhs = lhs - I * r[1];
    if (k == 1) lhs = lhs - cplx(-I) * r[0];
    return norm(lhs) / norm(psi);
}

// Biorthogonal expectation <k^-2alpha psi | r^(alpha) psi> / <k^-2alpha psi | psi>.
inline CVec3 position_expectation(const GridField& psi, AlphaWeight alpha, const GaugeSpec& gauge,
                                  const PositionOptions& opt = {}) {
    const GridField partner = psi.scaled_by_k_power(-2.0 * alpha.value());
    const Triple r = apply_position(psi, alpha, gauge, opt);
    const cplx n = inner(partner, psi);
    return CVec3(inner(partner, r[0]) / n, inner(partner, r[1]) / n, inner(partner, r[2]) / n);
}

struct SimilarityReport {
    CVec3 biorthogonal;
    CVec3 lp;
    double position_difference = 0.0;
    cplx jz_biorthogonal, jz_lp;
    double jz_difference = 0.0;
};

// psi_tilde carries alpha = -1/2 and psi = k psi_tilde carries alpha = +1/2.
inline SimilarityReport similarity_check(const GridField& psi_tilde, const GridField& psi, const GaugeSpec& gauge,
                                         const PositionOptions& opt = {}) {
    require_same_grid(psi_tilde, psi);
    const KGrid& g = psi.grid();
    double mismatch = 0.0, scale = 0.0;
    for (Helicity s : kHelicities)
        for (std::size_t i = 0; i < g.size(); ++i) {
            mismatch = std::max(mismatch, (psi.values(s)[i] - g.k(i) * psi_tilde.values(s)[i]).norm());
            scale = std::max(scale, psi.values(s)[i].norm());
        }
    if (mismatch > 1e-10 * std::max(scale, 1e-300))
        throw std::invalid_argument("similarity_check: psi must equal k * psi_tilde");

    SimilarityReport rep;
    const Triple r = apply_position(psi_tilde, AlphaWeight::minus_half(), gauge, opt);
    const cplx nb = inner(psi, psi_tilde);
    rep.biorthogonal = CVec3(inner(psi, r[0]) / nb, inner(psi, r[1]) / nb, inner(psi, r[2]) / nb);

    const GridField lp = psi_tilde.scaled_by_k_power(0.5);
    const Triple r0 = apply_position(lp, AlphaWeight::zero(), gauge, opt);
    const cplx nl = inner(lp, lp);
    rep.lp = CVec3(inner(lp, r0[0]) / nl, inner(lp, r0[1]) / nl, inner(lp, r0[2]) / nl);
    rep.position_difference = (rep.biorthogonal - rep.lp).cwiseAbs().maxCoeff();

    rep.jz_biorthogonal = inner(psi, apply_jz(psi_tilde)) / nb;
    rep.jz_lp = inner(lp, apply_jz(lp)) / nl;
    rep.jz_difference = std::abs(rep.jz_biorthogonal - rep.jz_lp);
    return rep;
}

inline Vec3 mean_khat(const GridField& psi, AlphaWeight alpha) {
    const KGrid& g = psi.grid();
    const GridField partner = psi.scaled_by_k_power(-2.0 * alpha.value());
    Vec3 acc = Vec3::Zero();
    double n = 0.0;
    for (Helicity s : kHelicities)
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double w = g.weight(i) * std::real(partner.values(s)[i].dot(psi.values(s)[i]));
            acc += w * g.khat(i);
            n += w;
        }
    return acc / n;
}

// Heisenberg-picture position expectation at time t: <r> + c <khat> t.
inline Vec3 hp_drift(const GridField& psi, AlphaWeight alpha, const GaugeSpec& gauge, double t,
                     const PositionOptions& opt = {}) {
    return position_expectation(psi, alpha, gauge, opt).real() + mean_khat(psi, alpha) * t;
}

// Schroedinger evolution in k-space: psi(k) exp(-i k t).
inline GridField evolve(const GridField& psi, double t) {
    const KGrid& g = psi.grid();
    return psi.map([&](std::size_t i, const CVec3& v) { return CVec3(v * std::exp(-I * (g.k(i) * t))); });
}

// ||K^(0) psi - k^-p K^(1/2) (k^p psi)|| / ||psi||; p = 1/2 is the identity.
inline double boost_identity_residual(const GridField& psi, double weight_power = 0.5) {
    const Triple lhs = apply_boost(psi, AlphaWeight::zero());
    const Triple inner_op = apply_boost(psi.scaled_by_k_power(weight_power), AlphaWeight::plus_half());
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        GridField d = lhs[a] - inner_op[a].scaled_by_k_power(-weight_power);
        s += std::real(inner(d, d));
    }
    return std::sqrt(s) / norm(psi);
}

// max_a |<u, r_a^(alpha) v> - <r_a^(-alpha) u, v>| / (||u|| ||r_a v||)
inline double adjoint_residual(const GridField& u, const GridField& v, AlphaWeight alpha, const GaugeSpec& gauge,
                               const PositionOptions& opt = {}) {
    const Triple rv = apply_position(v, alpha, gauge, opt);
    const Triple ru = apply_position(u, alpha.negated(), gauge, opt);
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double d = std::abs(inner(u, rv[a]) - inner(ru[a], v));
        worst = std::max(worst, d / (norm(u) * norm(rv[a])));
    }
    return worst;
}

struct OperatorReport {
    std::string name;
    std::vector<double> residuals;
    std::vector<double> spacings;
    std::vector<double> ratios;
};

inline std::vector<double> convergence_ratios(const std::vector<double>& r) {
    std::vector<double> out;
    for (std::size_t i = 1; i < r.size(); ++i) out.push_back(r[i] > 0.0 ? r[i - 1] / r[i] : INFINITY);
    return out;
}

inline OperatorReport make_report(std::string name, std::vector<double> residuals, std::vector<double> spacings) {
    OperatorReport rep{std::move(name), std::move(residuals), std::move(spacings), {}};
    rep.ratios = convergence_ratios(rep.residuals);
    return rep;
}

}  // namespace photonwf
