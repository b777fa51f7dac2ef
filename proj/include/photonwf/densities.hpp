#pragma once

// Number, current, momentum and angular-momentum densities; inner products; continuity.
//   n^(alpha) = sum_s Re(Psi_s^(alpha)* . Psi_s^(-alpha))
//   j^(alpha) = sum_s s Im(Psi_s^(alpha)* x Psi_s^(-alpha))
//   P = D- x B+ + c.c.,  J = r x P

#include "photonwf/fields.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace photonwf {

struct DensitySample {
    Vec3 r = Vec3::Zero();
    double t = 0.0;
    double n = 0.0;
    Vec3 j = Vec3::Zero();
    Vec3 P = Vec3::Zero();
    Vec3 J = Vec3::Zero();
    AlphaWeight alpha = AlphaWeight::zero();
};

// Evaluates densities of a Fock state (one- and two-photon sectors) at arbitrary points.
class DensityEvaluator {
public:
    DensityEvaluator(const FockState& state, const GaugeSpec& gauge)
        : state_(state), gauge_(gauge), one_(state, gauge) {}

    double number(AlphaWeight alpha, const Vec3& r, double t) const {
        const auto p = one_.psi_pair(r, t, alpha.value());
        double n = 0.0;
        for (int s = 0; s < 2; ++s) n += std::real(p[0][s].dot(p[1][s]));
        if (state_.has_two_photon()) {
            const auto v = reduced(alpha.value(), r, t);
            for (std::size_t m = 0; m < v[0].size(); ++m) n += std::real(v[0][m].dot(v[1][m]));
        }
        return n;
    }

    Vec3 current(AlphaWeight alpha, const Vec3& r, double t) const {
        const auto p = one_.psi_pair(r, t, alpha.value());
        Vec3 j = Vec3::Zero();
        for (Helicity s : kHelicities) {
            const int i = slot(s);
            j += sign(s) * cross(CVec3(p[0][i].conjugate()), p[1][i]).imag();
        }
        if (state_.has_two_photon()) {
            const auto v = reduced(alpha.value(), r, t);
            for (std::size_t m = 0; m < v[0].size(); ++m)
                for (Helicity s : kHelicities) {
                    const int o = 3 * slot(s);
                    const CVec3 a = v[0][m].segment<3>(o), b = v[1][m].segment<3>(o);
                    j += sign(s) * cross(CVec3(a.conjugate()), b).imag();
                }
        }
        return j;
    }

    const Synthesizer& one_photon() const { return one_; }
    const FockState& state() const { return state_; }
    const GaugeSpec& gauge() const { return gauge_; }

private:
    // v_m(r) = sum_n f_n(r) A_mn over populated pairs, at weights {alpha, -alpha}.
    std::array<std::vector<Vec6>, 2> reduced(double alpha, const Vec3& r, double t) const {
        std::map<std::size_t, std::size_t> slotmap;
        std::array<std::vector<Vec6>, 2> v;
        auto at = [&](std::size_t key) -> std::size_t {
            auto [it, fresh] = slotmap.emplace(key, v[0].size());
            if (fresh) {
                v[0].push_back(Vec6::Zero());
                v[1].push_back(Vec6::Zero());
            }
            return it->second;
        };
        const ModeSet& ms = state_.modes();
        for (const auto& [key, b] : state_.pairs()) {
            for (int w = 0; w < 2; ++w) {
                const double a = w == 0 ? alpha : -alpha;
                const Vec6 fa = mode_function(ms, key.first, a, gauge_, r, t);
                if (key.first == key.second) {
                    v[w][at(key.first)] += (std::sqrt(2.0) * b) * fa;
                } else {
                    const Vec6 fb = mode_function(ms, key.second, a, gauge_, r, t);
                    v[w][at(key.first)] += b * fb;
                    v[w][at(key.second)] += b * fa;
                }
            }
        }
        return v;
    }

    FockState state_;
    GaugeSpec gauge_;
    Synthesizer one_;
};

inline double number_density(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge, const Vec3& r, double t) {
    return DensityEvaluator(s, gauge).number(alpha, r, t);
}

inline Vec3 current_density(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge, const Vec3& r, double t) {
    return DensityEvaluator(s, gauge).current(alpha, r, t);
}

// Same densities through the linear-polarization pair (psi, phi), one-photon sector.
struct LinearDensities {
    double n = 0.0;
    Vec3 j = Vec3::Zero();
};

inline LinearDensities linear_basis_densities(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge,
                                              const Vec3& r, double t) {
    const auto p = Synthesizer(s, gauge).psi_pair(r, t, alpha.value());
    const auto [psi, phi] = helicity_to_linear(p[0][0], p[0][1]);
    const auto [psi2, phi2] = helicity_to_linear(p[1][0], p[1][1]);
    LinearDensities out;
    const cplx nn = psi.dot(psi2) + phi.dot(phi2);
    out.n = std::real(nn);
    const CVec3 x = cross(CVec3(psi.conjugate()), phi2) - cross(CVec3(phi.conjugate()), psi2);
    out.j = x.real();
    return out;
}

// Two-photon density with the partner photon integrated over a periodic r' grid
// (box modes on the reciprocal lattice of a cube of side V^(1/3); exact for n' > max index spread).
inline double two_photon_density_rspace(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge, const Vec3& r,
                                        double t, int n_prime) {
    if (s.modes().normalization() != Normalization::box)
        throw std::invalid_argument("two_photon_density_rspace: needs a box-normalized mode set");
    if (n_prime < 2) throw std::invalid_argument("two_photon_density_rspace: n' must be >= 2");
    const double L = std::cbrt(s.modes().volume());
    const double w = s.modes().volume() / (double(n_prime) * n_prime * n_prime);
    const double a = alpha.value();
    double n = 0.0;
    for (int i = 0; i < n_prime; ++i)
        for (int j = 0; j < n_prime; ++j)
            for (int k = 0; k < n_prime; ++k) {
                const Vec3 r2 = Vec3(i, j, k) * (L / n_prime);
                const auto A = synthesize_two_photon(s, alpha, gauge, r, t, r2, t);
                const auto B = synthesize_two_photon(s, AlphaWeight::from_double(-a), gauge, r, t, r2, t);
                n += w * std::real((A.value.conjugate().cwiseProduct(B.value)).sum());
            }
    return n;
}

inline double continuity_residual(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge, const SampleBox& box,
                                  double t, const Steps& st) {
    if (!(st.h > 0.0) || !(st.dt > 0.0)) throw std::invalid_argument("continuity_residual: steps must be > 0");
    const DensityEvaluator ev(s, gauge);
    double num = 0.0, den = 0.0;
    double scale = 0.0;
    for (const auto& tm : ev.one_photon().terms()) scale = std::max(scale, tm.omega);
    for (const Vec3& r : box.points()) {
        const double dn = (ev.number(alpha, r, t + st.dt) - ev.number(alpha, r, t - st.dt)) / (2.0 * st.dt);
        double div = 0.0;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = st.h;
            div += (ev.current(alpha, r + e, t)[k] - ev.current(alpha, r - e, t)[k]) / (2.0 * st.h);
        }
        num += (dn + div) * (dn + div);
        const double n0 = ev.number(alpha, r, t);
        den += n0 * n0;
    }
    return std::sqrt(num / den) / scale;
}

// ---- momentum and angular momentum ----------------------------------------------------

// One-photon path: B+_s recovered from the helicity identity D+_s = i s B+_s.
inline Vec3 momentum_density(const FockState& s, const GaugeSpec& gauge, const Vec3& r, double t) {
    const auto f = Synthesizer(s, gauge).fields(r, t);
    CVec3 D = CVec3::Zero(), B = CVec3::Zero();
    for (Helicity h : kHelicities) {
        D += f.D[slot(h)];
        B += -I * double(sign(h)) * f.D[slot(h)];
    }
    return 2.0 * cross(CVec3(D.conjugate()), B).real();
}

// Coherent path: expectation fields with B+ = curl A+.
inline Vec3 momentum_density(const CoherentState& s, const GaugeSpec& gauge, const Vec3& r, double t) {
    const auto f = Synthesizer(s, gauge).fields(r, t);
    const CVec3 D = f.D[0] + f.D[1], B = f.B[0] + f.B[1];
    return 2.0 * cross(CVec3(D.conjugate()), B).real();
}

inline Vec3 am_density(const FockState& s, const GaugeSpec& gauge, const Vec3& r, double t) {
    return r.cross(momentum_density(s, gauge, r, t));
}
inline Vec3 am_density(const CoherentState& s, const GaugeSpec& gauge, const Vec3& r, double t) {
    return r.cross(momentum_density(s, gauge, r, t));
}

struct AMDecomposition {
    Vec3 orbital = Vec3::Zero();  // int 2Re sum_j D_j- (r x grad) A_j+
    Vec3 spin = Vec3::Zero();     // int 2Re D- x A+
    Vec3 direct = Vec3::Zero();   // int r x P
    Vec3 momentum = Vec3::Zero();
    double number = 0.0;          // int n^(0)
    double boundary_ratio = 0.0;  // max |D| on the box faces / max |D|
    bool surface_warning = false;
};

inline AMDecomposition am_decomposition(const FockState& s, const GaugeSpec& gauge, const SampleBox& box, double t,
                                        double boundary_threshold = 1e-4) {
    const Synthesizer syn(s, gauge);
    const auto pts = box.points();
    const auto w = box.weights();
    AMDecomposition out;
    double dmax = 0.0, dface = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const Vec3& r = pts[p];
        const auto f = syn.fields(r, t);
        const CVec3 D = f.D[0] + f.D[1], A = f.A[0] + f.A[1], B = f.B[0] + f.B[1];
        const CVec3 Dc = D.conjugate();
        Vec3 orb;
        for (int a = 0; a < 3; ++a) {
            const int b = (a + 1) % 3, c = (a + 2) % 3;
            cplx acc = 0.0;
            for (int j = 0; j < 3; ++j) acc += Dc[j] * (r[b] * f.gradA(j, c) - r[c] * f.gradA(j, b));
            orb[a] = 2.0 * std::real(acc);
        }
        const Vec3 P = 2.0 * cross(Dc, B).real();
        out.orbital += w[p] * orb;
        out.spin += w[p] * 2.0 * cross(Dc, A).real();
        out.direct += w[p] * r.cross(P);
        out.momentum += w[p] * P;
        const auto ps = syn.psi(r, t, 0.0);
        out.number += w[p] * (ps[0].squaredNorm() + ps[1].squaredNorm());
        const double dn = D.norm();
        dmax = std::max(dmax, dn);
        const Vec3 rel = (r - box.center).cwiseAbs() - box.half_width;
        if (rel.maxCoeff() > -1e-12 * box.half_width.maxCoeff()) dface = std::max(dface, dn);
    }
    out.boundary_ratio = dmax > 0.0 ? dface / dmax : 0.0;
    if (out.boundary_ratio > boundary_threshold) {
        out.surface_warning = true;
        std::cerr << "warning: am_decomposition field at the box boundary is " << out.boundary_ratio
                  << " of peak; surface term may not be negligible\n";
    }
    return out;
}

// ---- inner products --------------------------------------------------------------------

inline void require_same_modes(const FockState& a, const FockState& b) {
    if (a.modes_ptr() == b.modes_ptr()) return;
    const auto& ma = a.modes();
    const auto& mb = b.modes();
    bool same = ma.size() == mb.size() && ma.normalization() == mb.normalization();
    for (std::size_t i = 0; same && i < ma.size(); ++i) same = (ma[i].k - mb[i].k).norm() == 0.0;
    if (!same) throw std::invalid_argument("inner_product: states live on different grids");
}

// k-space form: sum of conj(c~) c over all sectors (alpha-independent).
inline cplx inner_product(const FockState& a, const FockState& b) {
    require_same_modes(a, b);
    cplx s = std::conj(a.vacuum()) * b.vacuum();
    for (std::size_t i = 0; i < a.one_photon().size(); ++i) s += std::conj(a.one_photon()[i]) * b.one_photon()[i];
    for (const auto& [k, v] : a.pairs()) {
        auto it = b.pairs().find(k);
        if (it != b.pairs().end()) s += std::conj(v) * it->second;
    }
    return s;
}

// r-space form over a box: sum_s int Psi~_s^(alpha)* . Psi_s^(-alpha), one-photon sector.
inline cplx inner_product_rspace(const FockState& a, const FockState& b, AlphaWeight alpha, const GaugeSpec& gauge,
                                 const SampleBox& box, double t) {
    require_same_modes(a, b);
    const Synthesizer sa(a, gauge), sb(b, gauge);
    const auto pts = box.points();
    const auto w = box.weights();
    cplx s = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
        const auto u = sa.psi(pts[p], t, alpha.value());
        const auto v = sb.psi(pts[p], t, -alpha.value());
        s += w[p] * (u[0].dot(v[0]) + u[1].dot(v[1]));
    }
    return s;
}

// int n^(alpha) d^3r over a box.
inline double integrated_number(const FockState& s, AlphaWeight alpha, const GaugeSpec& gauge, const SampleBox& box,
                                double t) {
    const DensityEvaluator ev(s, gauge);
    const auto pts = box.points();
    const auto w = box.weights();
    double n = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p) n += w[p] * ev.number(alpha, pts[p], t);
    return n;
}

// ---- two-mode negativity -----------------------------------------------------------------

struct NegativityResult {
    double min_numeric = 0.0;
    double min_closed_form = 0.0;
    double min_lp = 0.0;  // n^(0) minimum on the same state
    double position = 0.0;  // distance along k-hat at t = 0 where the minimum sits
};

inline double two_mode_closed_form_min(double k1, double k2, AlphaWeight alpha, double volume) {
    if (alpha.value() == 0.0) return 0.0;
    return (1.0 - 0.5 * (std::sqrt(k1 / k2) + std::sqrt(k2 / k1))) / volume;
}

// State c_{k1,s} = c_{k2,s} = 1/sqrt2 on collinear box modes; minimum of n^(alpha) over one beat.
inline NegativityResult two_mode_negativity_scan(const Vec3& k1, const Vec3& k2, AlphaWeight alpha,
                                                 double volume = 1.0, Helicity s = Helicity::plus) {
    const double a1 = k1.norm(), a2 = k2.norm();
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw std::invalid_argument("two_mode_negativity_scan: k = 0 is excluded");
    if (cross(k1, k2).norm() > 1e-12 * a1 * a2 || k1.dot(k2) <= 0.0)
        throw std::invalid_argument("two_mode_negativity_scan: wave vectors must be collinear and co-directed");
    if (std::abs(a1 - a2) <= 1e-12 * std::max(a1, a2))
        throw std::invalid_argument("two_mode_negativity_scan: k1 == k2 is degenerate (no beat)");

    auto modes = ModeSet::box(volume, {k1, k2});
    FockState st(modes);
    st.set_one(0, s, 1.0 / std::sqrt(2.0));
    st.set_one(1, s, 1.0 / std::sqrt(2.0));
    const DensityEvaluator ev(st, GaugeSpec{});
    const Vec3 dir = k1.normalized();
    const double period = 2.0 * pi / std::abs(a2 - a1);

    auto scan = [&](AlphaWeight al, double& where) {
        auto f = [&](double z) { return ev.number(al, z * dir, 0.0); };
        const int n = 64;
        int best = 0;
        double fb = f(0.0);
        for (int i = 1; i < n; ++i)
            if (const double v = f(period * i / n); v < fb) {
                fb = v;
                best = i;
            }
        const auto r = boost::math::tools::brent_find_minima(f, period * (best - 1) / n, period * (best + 1) / n, 52);
        where = r.first;
        return std::min(fb, r.second);
    };
    NegativityResult out;
    out.min_numeric = scan(alpha, out.position);
    double dummy = 0.0;
    out.min_lp = scan(AlphaWeight::zero(), dummy);
    out.min_closed_form = two_mode_closed_form_min(a1, a2, alpha, volume);
    return out;
}

// Comb of n collinear box modes around kbar with Gaussian weights of relative width rel;
// returns max_r |n^(1/2) - n^(0)| / max n^(0) over one box period along the axis.
inline double narrowband_deviation(double kbar, double rel, int n_modes = 21, int samples = 2000) {
    if (!(kbar > 0.0) || !(rel > 0.0) || n_modes < 2) throw std::invalid_argument("narrowband_deviation: bad input");
    const double dk = rel * kbar;
    const double span = 8.0 * dk;
    const double step = std::min(span / (n_modes - 1), 0.9 * (kbar / (n_modes / 2 + 1)));
    const double L = 2.0 * pi / step;
    std::vector<double> ks;
    for (int i = 0; i < n_modes; ++i) ks.push_back(kbar + (i - (n_modes - 1) / 2.0) * step);
    auto modes = ModeSet::collinear(L, Vec3::UnitX(), ks);
    FockState st(modes);
    for (int i = 0; i < n_modes; ++i) {
        const double x = (ks[i] - kbar) / dk;
        st.set_one(i, Helicity::plus, std::exp(-0.25 * x * x));
    }
    st = normalize(st);
    const DensityEvaluator ev(st, GaugeSpec{});
    double dev = 0.0, peak = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec3 r = (L * (i - samples / 2) / samples) * Vec3::UnitX();
        const double n0 = ev.number(AlphaWeight::zero(), r, 0.0);
        const double nh = ev.number(AlphaWeight::plus_half(), r, 0.0);
        dev = std::max(dev, std::abs(nh - n0));
        peak = std::max(peak, n0);
    }
    return dev / peak;
}

}  // namespace photonwf
