#pragma once

// Bessel beams, paraxial LG-type beams and their angular-momentum density, localized states.

#include "photonwf/densities.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonwf {

// ---- Bessel functions ------------------------------------------------------------------

namespace detail {

inline double bessel_series(int l, double x) {
    const double q = -0.25 * x * x;
    double term = std::exp(l * std::log(0.5 * x) - std::lgamma(l + 1.0));
    double sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (double(k) * (k + l));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Miller's downward recurrence normalized by J0 + 2 sum J_2k = 1.
inline double bessel_miller(int l, double x) {
    const double big = 1e250;
    const int n0 = std::max(l, int(x));
    int start = n0 + 20 + int(std::sqrt(60.0 * n0));
    start += start % 2;
    double jp = 0.0, j = 1e-300, result = 0.0, norm = 0.0;
    for (int k = start; k > 0; --k) {
        const double jm = 2.0 * k / x * j - jp;
        jp = j;
        j = jm;
        if (std::abs(j) > big) {
            j /= big;
            jp /= big;
            result /= big;
            norm /= big;
        }
        // j now holds J_{k-1}
        if (k - 1 == l) result = j;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    }
    norm += j;
    return result / norm;
}

}  // namespace detail

inline double bessel_j(int l, double x) {
    if (l < 0) return (l % 2 == 0 ? 1.0 : -1.0) * bessel_j(-l, x);
    if (x < 0.0) return (l % 2 == 0 ? 1.0 : -1.0) * bessel_j(l, -x);
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x < l || x < 1.0) return detail::bessel_series(l, x);
    return detail::bessel_miller(l, x);
}

enum class BeamPolarization { te, tm, helicity };

struct BesselBeamSpec {
    double k0 = 1.0;
    double kz = 0.5;
    int lz = 0;
    BeamPolarization polarization = BeamPolarization::helicity;
    Helicity sigma = Helicity::plus;

    double kperp() const { return std::sqrt(k0 * k0 - kz * kz); }
    void validate() const {
        if (!(k0 > 0.0)) throw std::invalid_argument("BesselBeamSpec: k0 must be > 0");
        if (!(std::abs(kz) < k0)) throw std::invalid_argument("BesselBeamSpec: need |kz| < k0 (k_perp > 0)");
    }
};

inline cplx bessel_mode(const BesselBeamSpec& s, double r, double phi, double z, double t) {
    s.validate();
    return std::polar(bessel_j(s.lz, s.kperp() * r), s.lz * phi + s.kz * z - s.k0 * t);
}

inline cplx bessel_mode_cartesian(const BesselBeamSpec& s, const Vec3& p, double t) {
    const double r = std::hypot(p.x(), p.y());
    const double phi = r == 0.0 ? 0.0 : std::atan2(p.y(), p.x());
    return bessel_mode(s, r, phi, p.z(), t);
}

// ||(lap + k0^2) psi|| / (k0^2 ||psi||) over box points, 7-point Laplacian with step h.
inline double helmholtz_residual(const BesselBeamSpec& s, const SampleBox& box, double h) {
    s.validate();
    if (!(h > 0.0)) throw std::invalid_argument("helmholtz_residual: step must be > 0");
    double num = 0.0, den = 0.0;
    for (const Vec3& p : box.points()) {
        const cplx c = bessel_mode_cartesian(s, p, 0.0);
        cplx lap = -6.0 * c;
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = h;
            lap += bessel_mode_cartesian(s, p + e, 0.0) + bessel_mode_cartesian(s, p - e, 0.0);
        }
        lap /= h * h;
        num += std::norm(lap + s.k0 * s.k0 * c);
        den += std::norm(c);
    }
    return std::sqrt(num / den) / (s.k0 * s.k0);
}

struct StandingWaveReport {
    double outgoing_phase = 0.0;  // arg of the outgoing amplitude, expected -l pi/2 - pi/4
    double incoming_phase = 0.0;  // = -outgoing_phase (real standing wave)
    double amplitude = 0.0;       // expected sqrt(2/pi)
    double envelope_power = 0.0;  // fitted p in x^-p, expected 1/2
    double fit_residual = 0.0;    // relative rms of the fixed-power fit
};

namespace detail {

// Least squares J(x) ~ 2 Re[a x^-p e^{ix} (1 + i mu/(8x))]; returns {a, relative rms}.
inline std::pair<cplx, double> fit_hankel(int l, const std::vector<double>& x, double p) {
    const double mu = 4.0 * l * l - 1.0;
    Eigen::MatrixXd M(x.size(), 2);
    Eigen::VectorXd y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cplx basis = 2.0 * std::pow(x[i], -p) * std::exp(I * x[i]) * (1.0 + I * mu / (8.0 * x[i]));
        M(i, 0) = std::real(basis);
        M(i, 1) = -std::imag(basis);
        y(i) = bessel_j(l, x[i]);
    }
    const Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
    const double rms = (M * c - y).norm() / y.norm();
    return {cplx(c(0), c(1)), rms};
}

}  // namespace detail

// Fit J_l(x) on x in [xmin, xmax] (x = k_perp r) to outgoing + incoming Hankel asymptotics.
inline StandingWaveReport standing_wave_check(const BesselBeamSpec& s, double xmin, double xmax, int npts = 400) {
    s.validate();
    if (xmin < std::max(10.0, 2.0 * std::abs(s.lz) * std::abs(s.lz)) || xmax <= xmin)
        throw std::invalid_argument("standing_wave_check: r-range too small for asymptotics (need k_perp r >= 10)");
    std::vector<double> x(npts);
    for (int i = 0; i < npts; ++i) x[i] = xmin + (xmax - xmin) * i / (npts - 1);
    const int l = std::abs(s.lz);
    StandingWaveReport rep;
    const auto [a, rms] = detail::fit_hankel(l, x, 0.5);
    rep.outgoing_phase = std::arg(a);
    rep.incoming_phase = -rep.outgoing_phase;
    rep.amplitude = 2.0 * std::abs(a);
    rep.fit_residual = rms;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double p) { return detail::fit_hankel(l, x, p).second; }, 0.0, 1.0, 40);
    rep.envelope_power = r.first;
    return rep;
}

// ---- paraxial beams ----------------------------------------------------------------------

enum class Profile { gaussian, lg_ring, flat_top };

inline Profile profile_from_string(const std::string& s) {
    if (s == "gaussian") return Profile::gaussian;
    if (s == "lg_ring") return Profile::lg_ring;
    if (s == "flat_top") return Profile::flat_top;
    throw std::invalid_argument("unknown beam profile '" + s + "'");
}

struct ParaxialLGSpec {
    double omega = 1.0;
    double kz = 1.0;
    int lz = 0;
    Helicity sigma = Helicity::plus;
    Profile profile = Profile::gaussian;
    double w = 50.0;     // waist (gaussian, lg_ring) or aperture radius (flat_top)
    double edge = 1.0;   // flat_top rim width

    void validate() const {
        if (!(w > 0.0)) throw std::invalid_argument("ParaxialLGSpec: w must be > 0");
        if (!(omega > 0.0) || !(kz > 0.0)) throw std::invalid_argument("ParaxialLGSpec: omega and kz must be > 0");
        if (profile == Profile::flat_top && !(edge > 0.0))
            throw std::invalid_argument("ParaxialLGSpec: flat_top edge width must be > 0");
    }

    // u(r) and d|u|^2/dr
    double u(double r) const {
        switch (profile) {
            case Profile::gaussian: return std::exp(-r * r / (2 * w * w));
            case Profile::lg_ring: return std::pow(r / w, std::abs(lz)) * std::exp(-r * r / (2 * w * w));
            case Profile::flat_top: return 0.5 * std::erfc((r - w) / edge);
        }
        return 0.0;
    }
    double du2(double r) const {
        switch (profile) {
            case Profile::gaussian: return -2.0 * r / (w * w) * std::exp(-r * r / (w * w));
            case Profile::lg_ring: {
                const int l = std::abs(lz);
                const double e = std::exp(-r * r / (w * w));
                const double lead = l == 0 ? 0.0 : 2.0 * l * std::pow(r / w, 2 * l - 1) / w;
                return (lead - 2.0 * r / (w * w) * std::pow(r / w, 2 * l)) * e;
            }
            case Profile::flat_top: {
                const double uu = u(r);
                const double du = -std::exp(-(r - w) * (r - w) / (edge * edge)) / (std::sqrt(pi) * edge);
                return 2.0 * uu * du;
            }
        }
        return 0.0;
    }
};

// A+ = 1/2 (x + i s y) u(r) exp(i l phi + i kz z - i w t)
inline CVec3 paraxial_lg_field(const ParaxialLGSpec& s, double r, double phi, double z, double t) {
    const CVec3 pol(0.5, I * (0.5 * sign(s.sigma)), 0.0);
    return pol * std::polar(s.u(r), s.lz * phi + s.kz * z - s.omega * t);
}

inline CVec3 paraxial_lg_field_cartesian(const ParaxialLGSpec& s, const Vec3& p, double t) {
    const double r = std::hypot(p.x(), p.y());
    const double phi = r == 0.0 ? 0.0 : std::atan2(p.y(), p.x());
    return paraxial_lg_field(s, r, phi, p.z(), t);
}

// Psi_sigma = sqrt2 A+ (natural units)
inline CVec3 paraxial_wave_function(const ParaxialLGSpec& s, double r, double phi, double z, double t) {
    return std::sqrt(2.0) * paraxial_lg_field(s, r, phi, z, t);
}

// J_z(r) = w [l |u|^2 - 1/2 s r d|u|^2/dr]
inline double jbeam_analytic(const ParaxialLGSpec& s, double r) {
    const double u = s.u(r);
    return s.omega * (s.lz * u * u - 0.5 * sign(s.sigma) * r * s.du2(r));
}

inline double beam_number_density_analytic(const ParaxialLGSpec& s, double r) {
    const double u = s.u(r);
    return s.omega * u * u;
}

struct BeamDensities {
    double jz = 0.0;
    double n = 0.0;
    Vec3 P = Vec3::Zero();
};

// Fields from A+ by central differences: E+ = i w A+ + (i/w) grad div A+ (Lorenz gauge), B+ = curl A+,
// P = 2 Re(D- x B+), n = 2 Re(i D- . A+).
inline BeamDensities beam_densities_numeric(const ParaxialLGSpec& s, const Vec3& p, double h) {
    auto A = [&](const Vec3& q) { return paraxial_lg_field_cartesian(s, q, 0.0); };
    auto e = [&](int a) {
        Vec3 v = Vec3::Zero();
        v[a] = h;
        return v;
    };
    auto div = [&](const Vec3& q) {
        cplx d = 0.0;
        for (int a = 0; a < 3; ++a) d += (A(q + e(a))[a] - A(q - e(a))[a]) / (2.0 * h);
        return d;
    };
    CVec3 grad_div;
    for (int a = 0; a < 3; ++a) grad_div[a] = (div(p + e(a)) - div(p - e(a))) / (2.0 * h);
    const CVec3 a0 = A(p);
    const CVec3 D = I * s.omega * a0 + (I / s.omega) * grad_div;
    std::array<CVec3, 3> ap, am;
    for (int a = 0; a < 3; ++a) {
        ap[a] = A(p + e(a));
        am[a] = A(p - e(a));
    }
    auto d = [&](int k, int j) { return (ap[k][j] - am[k][j]) / (2.0 * h); };
    const CVec3 B(d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0));
    BeamDensities out;
    const CVec3 Dc = D.conjugate();
    out.P = 2.0 * cross(Dc, B).real();
    out.jz = p.x() * out.P.y() - p.y() * out.P.x();
    out.n = 2.0 * std::real(I * D.dot(a0));
    return out;
}

struct JBeamReport {
    double max_profile_deviation = 0.0;  // max |numeric - analytic| / max |analytic| along the radius
    double total_jz = 0.0;
    double total_n = 0.0;
    double jz_per_photon = 0.0;
    double expected_per_photon = 0.0;  // l + sigma
    double interior_ratio = 0.0;       // max |J_z| for r < w - 6 edge over rim peak (flat_top)
};

struct JBeamOptions {
    int radial_nodes = 200;
    int profile_points = 120;
    double extent = 0.0;  // radial cutoff, 0: automatic
    double h = 0.0;       // difference step, 0: automatic
};

inline JBeamReport jbeam_numeric_match(const ParaxialLGSpec& s, const JBeamOptions& opt = {}) {
    s.validate();
    const double scale = s.profile == Profile::flat_top ? s.edge : s.w;
    if (s.w * s.kz < 20.0)
        throw std::invalid_argument("jbeam_numeric_match: non-paraxial spec (w*kz = " + std::to_string(s.w * s.kz) +
                                    " < 20)");
    const double R = opt.extent > 0.0 ? opt.extent
                                      : (s.profile == Profile::flat_top ? s.w + 10.0 * s.edge
                                                                        : s.w * (4.0 + std::sqrt(std::abs(s.lz) + 1.0)));
    const double h = opt.h > 0.0 ? opt.h : 0.02 * std::min(scale, 1.0 / s.kz);
    JBeamReport rep;
    rep.expected_per_photon = s.lz + sign(s.sigma);

    double amax = 0.0, dev = 0.0;
    for (int i = 0; i <= opt.profile_points; ++i) {
        const double r = R * i / opt.profile_points;
        const double ja = jbeam_analytic(s, r);
        const double jn = beam_densities_numeric(s, Vec3(r, 0.0, 0.0), h).jz;
        amax = std::max(amax, std::abs(ja));
        dev = std::max(dev, std::abs(jn - ja));
    }
    rep.max_profile_deviation = amax > 0.0 ? dev / amax : dev;

    // radial pieces split at the rim for the flat-top profile
    std::vector<std::pair<double, double>> pieces;
    if (s.profile == Profile::flat_top)
        pieces = {{0.0, s.w - 8.0 * s.edge}, {s.w - 8.0 * s.edge, s.w + 8.0 * s.edge}, {s.w + 8.0 * s.edge, R}};
    else
        pieces = {{0.0, R}};
    for (const auto& [a, b] : pieces) {
        if (b <= a) continue;
        const auto q = gauss_legendre(opt.radial_nodes, a, b);
        for (int i = 0; i < opt.radial_nodes; ++i) {
            const auto bd = beam_densities_numeric(s, Vec3(q.x[i], 0.0, 0.0), h);
            rep.total_jz += q.w[i] * 2.0 * pi * q.x[i] * bd.jz;
            rep.total_n += q.w[i] * 2.0 * pi * q.x[i] * bd.n;
        }
    }
    rep.jz_per_photon = rep.total_jz / rep.total_n;

    if (s.profile == Profile::flat_top) {
        double inner = 0.0, rim = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double r = R * i / 400;
            const double jn = std::abs(beam_densities_numeric(s, Vec3(r, 0.0, 0.0), h).jz);
            if (r < s.w - 6.0 * s.edge) inner = std::max(inner, jn);
            rim = std::max(rim, jn);
        }
        rep.interior_ratio = inner / rim;
    }
    return rep;
}

// ---- localized states --------------------------------------------------------------------

struct LocalizedScanSpec {
    GridSpec grid{16, 16, 32, 0.25, 5.25, Normalization::continuum, 1.0};
    double k_center = 2.75;
    double k_width = 0.5;  // Gaussian window exp(-(k - kc)^2 / (2 s^2))
    double rmax = 12.0;
    int points = 121;
};

struct RadialProfile {
    double t = 0.0;
    std::vector<double> r;
    std::array<std::vector<double>, 3> n;  // along x, y, z
    double center = 0.0;                   // n at r = 0
    double peak = 0.0;                     // max over the three axes
    double peak_radius = 0.0;
};

struct LocalizedScan {
    std::vector<RadialProfile> profiles;
    // Per axis: last radius where the t = 0 profile exceeds 1e-6 of the peak, and
    // max n(r > |t| + width, t) / n(0, 0) over t; -1 when no sample lies outside the cone.
    std::array<double, 3> initial_width{0.0, 0.0, 0.0};
    std::array<double, 3> light_cone_excess{-1.0, -1.0, -1.0};
    std::array<int, 3> winding{0, 0, 0};  // s_z = +1, 0, -1 components of Psi at t = 0
};

inline FockState localized_shell_state(const LocalizedScanSpec& spec, Helicity s, const GaugeSpec& /*gauge*/,
                                       bool normalized = true) {
    auto grid = std::make_shared<const KGrid>(spec.grid);
    auto modes = ModeSet::from_grid(grid);
    const double kc = spec.k_center, sw = spec.k_width;
    return localized_state(
        modes, Vec3::Zero(), s, [&](double k) { return std::exp(-(k - kc) * (k - kc) / (2 * sw * sw)); },
        normalized);
}

// Winding number of a closed loop of complex samples.
inline int winding_number(const std::vector<cplx>& loop) {
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) total += std::arg(loop[(i + 1) % loop.size()] / loop[i]);
    return int(std::lround(total / (2.0 * pi)));
}

inline LocalizedScan localized_state_scan(const LocalizedScanSpec& spec, const GaugeSpec& gauge, Helicity s,
                                          AlphaWeight alpha, const std::vector<double>& times) {
    const FockState st = localized_shell_state(spec, s, gauge);
    const DensityEvaluator ev(st, gauge);
    LocalizedScan out;
    for (double t : times) {
        RadialProfile p;
        p.t = t;
        for (int i = 0; i < spec.points; ++i) p.r.push_back(spec.rmax * i / (spec.points - 1));
        for (int a = 0; a < 3; ++a) {
            Vec3 step = Vec3::Zero();
            step[a] = spec.rmax / (spec.points - 1);
            const auto line = ev.one_photon().psi_pair_line(Vec3::Zero(), step, spec.points, t, alpha.value());
            for (int i = 0; i < spec.points; ++i) {
                const double n = std::real(line[i][0][0].dot(line[i][1][0]) + line[i][0][1].dot(line[i][1][1]));
                p.n[a].push_back(n);
                if (n > p.peak) {
                    p.peak = n;
                    p.peak_radius = p.r[i];
                }
            }
        }
        p.center = p.n[0][0];
        out.profiles.push_back(std::move(p));
    }
    if (out.profiles.empty()) return out;

    const auto& first = out.profiles.front();
    const double ref = first.center;
    for (int a = 0; a < 3; ++a) {
        for (std::size_t i = 0; i < first.r.size(); ++i)
            if (first.n[a][i] > 1e-6 * first.peak) out.initial_width[a] = first.r[i];
        for (const auto& p : out.profiles)
            for (std::size_t i = 0; i < p.r.size(); ++i)
                if (p.r[i] > std::abs(p.t) + out.initial_width[a])
                    out.light_cone_excess[a] = std::max(out.light_cone_excess[a], std::abs(p.n[a][i]) / ref);
    }

    const int si = slot(s);
    const double rho = 0.5 / spec.k_center, z0 = 0.3 / spec.k_center;
    const int ns = 64;
    std::array<std::vector<cplx>, 3> ring;
    for (int i = 0; i < ns; ++i) {
        const double ang = 2.0 * pi * i / ns;
        const CVec3 v = ev.one_photon().psi(Vec3(rho * std::cos(ang), rho * std::sin(ang), z0), 0.0, alpha.value())[si];
        ring[0].push_back((v.x() - I * v.y()) / std::sqrt(2.0));
        ring[1].push_back(v.z());
        ring[2].push_back((v.x() + I * v.y()) / std::sqrt(2.0));
    }
    for (int c = 0; c < 3; ++c) out.winding[c] = winding_number(ring[c]);
    return out;
}

}  // namespace photonwf
