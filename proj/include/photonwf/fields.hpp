#pragma once

// Real-space synthesis by direct sums over modes, physical fields and residual checks.
//   Psi_sigma^(alpha)(r, t) = sum_k c_{k,sigma} e_{k,sigma} w_k^alpha exp(i k.r - i w_k t) * scale_k
// Natural units: hbar = c = eps0 = mu0 = 1.

#include "photonwf/states.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace photonwf {

using HelicityPair = std::array<CVec3, 2>;  // indexed by slot(sigma)

struct FieldSample {
    Vec3 r = Vec3::Zero();
    double t = 0.0;
    HelicityPair psi{CVec3::Zero(), CVec3::Zero()};
    AlphaWeight alpha = AlphaWeight::zero();
    GaugeSpec gauge;
    const CVec3& operator[](Helicity s) const { return psi[slot(s)]; }
    bool finite() const { return psi[0].allFinite() && psi[1].allFinite(); }
};

// Precomputed one-photon-like expansion: terms a = coeff * scale * e, evaluated at any (r, t).
class Synthesizer {
public:
    struct Term {
        Vec3 k;
        double omega;
        CVec3 a;
        int slot;
        double sqrt_omega;
        double weight(double alpha) const {
            if (alpha == 0.0) return 1.0;
            if (alpha == 0.5) return sqrt_omega;
            if (alpha == -0.5) return 1.0 / sqrt_omega;
            return std::pow(omega, alpha);
        }
    };

    Synthesizer(const ModeSet& modes, const std::vector<cplx>& coeffs, const GaugeSpec& gauge) {
        if (coeffs.size() != 2 * modes.size()) throw std::invalid_argument("Synthesizer: coefficient count mismatch");
        double p = 0.0;
        Vec3 kacc = Vec3::Zero();
        double wacc = 0.0;
        for (std::size_t key = 0; key < coeffs.size(); ++key) {
            const cplx c = coeffs[key];
            if (c == cplx(0.0)) continue;
            const Mode& m = modes[key_mode(key)];
            const Helicity s = key_helicity(key);
            terms_.push_back({m.k, m.kmag, polarization(m.theta, m.phi, s, gauge) * (c * m.scale), int(slot(s)),
                              std::sqrt(m.kmag)});
            const double w = std::norm(c);
            p += w;
            kacc += w * m.k;
            wacc += w * m.kmag;
        }
        if (p > 0.0) {
            mean_k_ = kacc / p;
            mean_omega_ = wacc / p;
        }
    }
    Synthesizer(const FockState& s, const GaugeSpec& gauge) : Synthesizer(s.modes(), s.one_photon(), gauge) {}
    Synthesizer(const CoherentState& s, const GaugeSpec& gauge) : Synthesizer(s.modes(), s.gamma(), gauge) {}

    const std::vector<Term>& terms() const { return terms_; }
    Vec3 mean_k() const { return mean_k_; }
    double mean_omega() const { return mean_omega_; }

    static cplx phase(const Term& tm, const Vec3& r, double t) {
        return std::polar(1.0, tm.k.dot(r) - tm.omega * t);
    }

    HelicityPair psi(const Vec3& r, double t, double alpha) const {
        HelicityPair out{CVec3::Zero(), CVec3::Zero()};
        for (const auto& tm : terms_) out[tm.slot] += tm.a * (phase(tm, r, t) * tm.weight(alpha));
        return out;
    }

    // Both weights at once: {alpha, -alpha}.
    std::array<HelicityPair, 2> psi_pair(const Vec3& r, double t, double alpha) const {
        std::array<HelicityPair, 2> out;
        for (auto& h : out) h = {CVec3::Zero(), CVec3::Zero()};
        for (const auto& tm : terms_) {
            const cplx ph = phase(tm, r, t);
            const double wa = tm.weight(alpha);
            out[0][tm.slot] += tm.a * (ph * wa);
            out[1][tm.slot] += tm.a * (ph / wa);
        }
        return out;
    }

    // psi_pair at r0 + i*step, i = 0..n-1; the phase is advanced by recurrence.
    std::vector<std::array<HelicityPair, 2>> psi_pair_line(const Vec3& r0, const Vec3& step, int n, double t,
                                                           double alpha) const {
        std::vector<std::array<HelicityPair, 2>> out(n);
        for (auto& p : out)
            for (auto& h : p) h = {CVec3::Zero(), CVec3::Zero()};
        for (const auto& tm : terms_) {
            const double wa = tm.weight(alpha);
            const CVec3 up = tm.a * wa, dn = tm.a / wa;
            cplx ph = phase(tm, r0, t);
            const cplx adv = std::polar(1.0, tm.k.dot(step));
            for (int i = 0; i < n; ++i) {
                out[i][0][tm.slot] += up * ph;
                out[i][1][tm.slot] += dn * ph;
                ph *= adv;
            }
        }
        return out;
    }

    // A+ = Psi^(-1/2)/sqrt2, D+ = i Psi^(1/2)/sqrt2, B+ = curl A+ (exact per mode), grad[j](c) = d_c A_j.
    struct Spectral {
        HelicityPair A, D, B;
        CMat3 gradA;  // total over helicities, row j = component, column c = derivative direction
    };
    Spectral fields(const Vec3& r, double t) const {
        Spectral f;
        f.A = f.D = f.B = {CVec3::Zero(), CVec3::Zero()};
        f.gradA.setZero();
        const double s2 = 1.0 / std::sqrt(2.0);
        for (const auto& tm : terms_) {
            const cplx ph = phase(tm, r, t);
            const double rw = tm.sqrt_omega;
            const CVec3 A = tm.a * (ph * (s2 / rw));
            f.A[tm.slot] += A;
            f.D[tm.slot] += tm.a * (I * ph * (s2 * rw));
            f.B[tm.slot] += I * cross(CVec3(tm.k.cast<cplx>()), A);
            f.gradA += I * A * tm.k.cast<cplx>().transpose();
        }
        return f;
    }

private:
    std::vector<Term> terms_;
    Vec3 mean_k_ = Vec3::Zero();
    double mean_omega_ = 0.0;
};

inline FieldSample synthesize_one_photon(const FockState& state, AlphaWeight alpha, const GaugeSpec& gauge,
                                         const Vec3& r, double t) {
    FieldSample s;
    s.r = r;
    s.t = t;
    s.alpha = alpha;
    s.gauge = gauge;
    s.psi = Synthesizer(state, gauge).psi(r, t, alpha.value());
    return s;
}

// ---- two photons -----------------------------------------------------------------------

// value(3*slot + j, 3*slot' + j') = <0| psi_{sigma j}(r,t) psi_{sigma' j'}(r',t') |Psi>
struct TwoPhotonSample {
    Vec3 r, r2;
    double t = 0.0, t2 = 0.0;
    Eigen::Matrix<cplx, 6, 6> value;
    cplx operator()(Helicity s, int j, Helicity s2, int j2) const { return value(3 * slot(s) + j, 3 * slot(s2) + j2); }
};

using Vec6 = Eigen::Matrix<cplx, 6, 1>;

// Six-component single-particle mode function of a (mode, helicity) key.
inline Vec6 mode_function(const ModeSet& modes, std::size_t key, double alpha, const GaugeSpec& gauge, const Vec3& r,
                          double t) {
    const Mode& m = modes[key_mode(key)];
    const Helicity s = key_helicity(key);
    Vec6 f = Vec6::Zero();
    const cplx ph = std::polar(m.scale * std::pow(m.kmag, alpha), m.k.dot(r) - m.kmag * t);
    f.segment<3>(3 * slot(s)) = polarization(m.theta, m.phi, s, gauge) * ph;
    return f;
}

inline TwoPhotonSample synthesize_two_photon(const FockState& state, AlphaWeight alpha, const GaugeSpec& gauge,
                                             const Vec3& r, double t, const Vec3& r2, double t2) {
    if (!state.has_two_photon()) throw std::invalid_argument("synthesize_two_photon: empty two-photon sector");
    TwoPhotonSample out;
    out.r = r;
    out.r2 = r2;
    out.t = t;
    out.t2 = t2;
    out.value.setZero();
    const double a = alpha.value();
    const ModeSet& ms = state.modes();
    for (const auto& [key, b] : state.pairs()) {
        const Vec6 fa = mode_function(ms, key.first, a, gauge, r, t);
        const Vec6 fa2 = mode_function(ms, key.first, a, gauge, r2, t2);
        if (key.first == key.second) {
            out.value += (std::sqrt(2.0) * b) * fa * fa2.transpose();
        } else {
            const Vec6 fb = mode_function(ms, key.second, a, gauge, r, t);
            const Vec6 fb2 = mode_function(ms, key.second, a, gauge, r2, t2);
            out.value += b * (fa * fb2.transpose() + fb * fa2.transpose());
        }
    }
    return out;
}

// ---- physical fields -------------------------------------------------------------------

struct FieldOptions {
    bool spectral_curl = false;  // exact i k x A per mode instead of central differences
    double h = 1e-3;
};

struct PhysicalFields {
    HelicityPair A, D, B, F;
    CVec3 A_total, D_total, B_total, E_total, F_total;
    double helicity_identity_residual = 0.0;  // ||D_s - i s B_s|| / ||D||
};

inline PhysicalFields physical_fields(const Synthesizer& syn, const Vec3& r, double t, const FieldOptions& opt = {}) {
    PhysicalFields out;
    const auto f = syn.fields(r, t);
    out.A = f.A;
    out.D = f.D;
    if (opt.spectral_curl) {
        out.B = f.B;
    } else {
        if (!(opt.h > 0.0)) throw std::invalid_argument("physical_fields: step must be > 0");
        std::array<HelicityPair, 3> plus, minus;
        for (int c = 0; c < 3; ++c) {
            Vec3 e = Vec3::Zero();
            e[c] = opt.h;
            plus[c] = syn.fields(r + e, t).A;
            minus[c] = syn.fields(r - e, t).A;
        }
        for (int s = 0; s < 2; ++s) {
            auto d = [&](int c, int j) { return (plus[c][s][j] - minus[c][s][j]) / (2.0 * opt.h); };
            out.B[s] = CVec3(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
        }
    }
    double num = 0.0, den = 0.0;
    for (Helicity s : kHelicities) {
        const int i = slot(s);
        out.F[i] = (out.D[i] + out.B[i]) / std::sqrt(2.0);
        num += (out.D[i] - I * double(sign(s)) * out.B[i]).squaredNorm();
        den += out.D[i].squaredNorm();
    }
    out.helicity_identity_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
    out.A_total = out.A[0] + out.A[1];
    out.D_total = out.D[0] + out.D[1];
    out.E_total = out.D_total;
    out.B_total = out.B[0] + out.B[1];
    out.F_total = out.F[0] + out.F[1];
    return out;
}

inline PhysicalFields physical_fields(const FockState& state, const GaugeSpec& gauge, const Vec3& r, double t,
                                      const FieldOptions& opt = {}) {
    return physical_fields(Synthesizer(state, gauge), r, t, opt);
}

inline PhysicalFields physical_fields(const CoherentState& state, const GaugeSpec& gauge, const Vec3& r, double t,
                                      const FieldOptions& opt = {}) {
    return physical_fields(Synthesizer(state, gauge), r, t, opt);
}

// ---- sample boxes and difference operators ---------------------------------------------

// n^3 points on [center - half_width, center + half_width] (n = 1: the center only).
struct SampleBox {
    Vec3 center = Vec3::Zero();
    Vec3 half_width = Vec3::Ones();
    int n = 3;

    std::vector<Vec3> points() const {
        if (n < 1) throw std::invalid_argument("SampleBox: n must be >= 1");
        std::vector<Vec3> p;
        p.reserve(std::size_t(n) * n * n);
        auto coord = [&](int a, int i) {
            return n == 1 ? center[a] : center[a] - half_width[a] + 2.0 * half_width[a] * i / (n - 1);
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) p.emplace_back(coord(0, i), coord(1, j), coord(2, k));
        return p;
    }

    // Trapezoid weights matching points().
    std::vector<double> weights() const {
        if (n < 2) throw std::invalid_argument("SampleBox: integration needs n >= 2");
        std::vector<double> w1(n);
        for (int i = 0; i < n; ++i) w1[i] = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        Vec3 h;
        for (int a = 0; a < 3; ++a) h[a] = 2.0 * half_width[a] / (n - 1);
        const double cell = h.prod();
        std::vector<double> w;
        w.reserve(std::size_t(n) * n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) w.push_back(cell * w1[i] * w1[j] * w1[k]);
        return w;
    }
};

struct Steps {
    double h = 1e-2;
    double dt = 1e-2;
};

// Central-difference denominator matched to a carrier wavenumber q: exact for exp(i q x).
inline double carrier_denominator(double q, double h) {
    return std::abs(q * h) < 1e-12 ? 2.0 * h : 2.0 * std::sin(q * h) / q;
}

namespace detail {

inline void check_steps(const Synthesizer& syn, const Steps& st) {
    if (!(st.h > 0.0) || !(st.dt > 0.0)) throw std::invalid_argument("residual: steps must be > 0");
    double kmax = 0.0;
    for (const auto& tm : syn.terms()) kmax = std::max(kmax, tm.omega);
    if (kmax * std::max(st.h, st.dt) >= 1.0)
        throw std::invalid_argument("residual: box too coarse (k*h >= 1 for the largest populated mode)");
}

// Carrier-matched derivative stencils for positive-frequency fields.
struct Differencer {
    Vec3 denom;
    double tdenom;
    Differencer(const Synthesizer& syn, const Steps& st) {
        const Vec3 kb = syn.mean_k();
        for (int a = 0; a < 3; ++a) denom[a] = carrier_denominator(kb[a], st.h);
        tdenom = carrier_denominator(syn.mean_omega(), st.dt);
    }
};

}  // namespace detail

// ||i d_t Psi_s - s curl Psi_s|| / (w ||Psi||) summed over box points and helicities.
inline double wave_equation_residual(const FockState& state, AlphaWeight alpha, const GaugeSpec& gauge,
                                     const SampleBox& box, double t, const Steps& st, bool flip_sign = false) {
    const Synthesizer syn(state, gauge);
    detail::check_steps(syn, st);
    const detail::Differencer D(syn, st);
    const double a = alpha.value();
    double num = 0.0, den = 0.0;
    for (const Vec3& r : box.points()) {
        const HelicityPair c = syn.psi(r, t, a);
        const HelicityPair tp = syn.psi(r, t + st.dt, a), tm = syn.psi(r, t - st.dt, a);
        std::array<HelicityPair, 3> xp, xm;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = st.h;
            xp[k] = syn.psi(r + e, t, a);
            xm[k] = syn.psi(r - e, t, a);
        }
        for (Helicity s : kHelicities) {
            const int i = slot(s);
            auto d = [&](int k, int j) { return (xp[k][i][j] - xm[k][i][j]) / D.denom[k]; };
            const CVec3 curl(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
            const CVec3 dt = (tp[i] - tm[i]) / D.tdenom;
            const double sg = flip_sign ? -sign(s) : sign(s);
            num += (I * dt - sg * curl).squaredNorm();
            den += c[i].squaredNorm();
        }
    }
    return std::sqrt(num / den) / syn.mean_omega();
}

// ||i d_t Psi^(beta) - Psi^(1/2)|| / ||Psi^(1/2)||; beta = -1/2 is the identity, beta = 0 a control.
inline double field_potential_residual(const FockState& state, const GaugeSpec& gauge, const SampleBox& box, double t,
                                       double dt, AlphaWeight differentiated = AlphaWeight::minus_half()) {
    const Synthesizer syn(state, gauge);
    detail::check_steps(syn, {dt, dt});
    const double td = carrier_denominator(syn.mean_omega(), dt);
    const double b = differentiated.value();
    double num = 0.0, den = 0.0;
    for (const Vec3& r : box.points()) {
        const HelicityPair tp = syn.psi(r, t + dt, b), tm = syn.psi(r, t - dt, b);
        const HelicityPair rhs = syn.psi(r, t, 0.5);
        for (int i = 0; i < 2; ++i) {
            num += (I * (tp[i] - tm[i]) / td - rhs[i]).squaredNorm();
            den += rhs[i].squaredNorm();
        }
    }
    return std::sqrt(num / den);
}

struct MaxwellReport {
    double div_b = 0.0;    // div B
    double faraday = 0.0;  // curl E + d_t B
    double div_d = 0.0;    // div D
    double ampere = 0.0;   // curl H - d_t D
    double max() const { return std::max({div_b, faraday, div_d, ampere}); }
};

// Fields are evaluated spectrally at the stencil points; the derivatives are central differences.
inline MaxwellReport maxwell_residual(const FockState& state, const GaugeSpec& gauge, const SampleBox& box, double t,
                                      const Steps& st) {
    const Synthesizer syn(state, gauge);
    detail::check_steps(syn, st);
    const detail::Differencer Df(syn, st);
    struct EB {
        CVec3 E, B;
    };
    auto at = [&](const Vec3& r, double tt) {
        const auto f = syn.fields(r, tt);
        return EB{f.D[0] + f.D[1], f.B[0] + f.B[1]};
    };
    double n_divb = 0, n_far = 0, n_divd = 0, n_amp = 0, dE = 0, dB = 0;
    for (const Vec3& r : box.points()) {
        const EB c = at(r, t), tp = at(r, t + st.dt), tm = at(r, t - st.dt);
        std::array<EB, 3> xp, xm;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero();
            e[k] = st.h;
            xp[k] = at(r + e, t);
            xm[k] = at(r - e, t);
        }
        auto dE_ = [&](int k, int j) { return (xp[k].E[j] - xm[k].E[j]) / Df.denom[k]; };
        auto dB_ = [&](int k, int j) { return (xp[k].B[j] - xm[k].B[j]) / Df.denom[k]; };
        const cplx divE = dE_(0, 0) + dE_(1, 1) + dE_(2, 2);
        const cplx divB = dB_(0, 0) + dB_(1, 1) + dB_(2, 2);
        const CVec3 curlE(dE_(1, 2) - dE_(2, 1), dE_(2, 0) - dE_(0, 2), dE_(0, 1) - dE_(1, 0));
        const CVec3 curlB(dB_(1, 2) - dB_(2, 1), dB_(2, 0) - dB_(0, 2), dB_(0, 1) - dB_(1, 0));
        const CVec3 dtE = (tp.E - tm.E) / Df.tdenom, dtB = (tp.B - tm.B) / Df.tdenom;
        n_divb += std::norm(divB);
        n_divd += std::norm(divE);
        n_far += (curlE + dtB).squaredNorm();
        n_amp += (curlB - dtE).squaredNorm();
        dE += c.E.squaredNorm();
        dB += c.B.squaredNorm();
    }
    const double w = syn.mean_omega();
    MaxwellReport rep;
    rep.div_b = std::sqrt(n_divb / dB) / w;
    rep.div_d = std::sqrt(n_divd / dE) / w;
    rep.faraday = std::sqrt(n_far / dE) / w;
    rep.ampere = std::sqrt(n_amp / dB) / w;
    return rep;
}

}  // namespace photonwf
