#include "oracles.hpp"
#include "photonwf/fields.hpp"

#include <gtest/gtest.h>

using namespace photonwf;

namespace {

std::shared_ptr<const ModeSet> packet_modes(int n = 8) {
    return ModeSet::from_grid(std::make_shared<const KGrid>(GridSpec{n, n, 2 * n, 0.5, 3.5}));
}

}  // namespace

TEST(Synthesis, SinglePlaneWaveByHand) {
    const Vec3 k(0.3, -0.5, 1.1);
    const double V = 2.0, w = k.norm();
    const auto ms = ModeSet::box(V, {k});
    FockState st(ms);
    const cplx c(0.0, 0.7);
    st.set_one(0, Helicity::minus, c);
    const Vec3 r(0.2, 0.4, -0.6);
    const double t = 0.9;
    const double th = std::acos(k.z() / w), ph = std::atan2(k.y(), k.x());
    const Vec3 tv(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
    const Vec3 pv(-std::sin(ph), std::cos(ph), 0.0);
    const CVec3 e = (tv.cast<cplx>() - I * pv.cast<cplx>()) / std::sqrt(2.0);
    const cplx wave = std::exp(I * (k.dot(r) - w * t));
    for (auto a : {AlphaWeight::minus_half(), AlphaWeight::zero(), AlphaWeight::plus_half()}) {
        const auto s = synthesize_one_photon(st, a, GaugeSpec::constant(0.0), r, t);
        const CVec3 ref = c / std::sqrt(V) * std::pow(w, a.value()) * wave * e;
        EXPECT_LT((s[Helicity::minus] - ref).norm(), 1e-15);
        EXPECT_LT(s[Helicity::plus].norm(), 1e-300);
    }
    const auto f = physical_fields(st, GaugeSpec::constant(0.0), r, t, {true});
    EXPECT_LT((f.A[1] - c / std::sqrt(V * w) * wave * e / std::sqrt(2.0)).norm(), 1e-15);
    EXPECT_LT((f.D[1] - I * c * std::sqrt(w / V) * wave * e / std::sqrt(2.0)).norm(), 1e-15);
}

TEST(Synthesis, HelicityIdentityHolds) {
    auto st = gaussian_packet(packet_modes(), Vec3(0.3, 0, 2), 0.5, Helicity::plus);
    auto other = gaussian_packet(packet_modes(), Vec3(0, -1, 1), 0.4, Helicity::minus);
    for (std::size_t i = 0; i < st.one_photon().size(); ++i) st.one_photon()[i] += cplx(0, 0.5) * other.one_photon()[i];
    const Vec3 r(0.1, -0.3, 0.2);
    EXPECT_LT(physical_fields(st, {}, r, 0.4, {true}).helicity_identity_residual, 1e-13);
    const double e1 = physical_fields(st, {}, r, 0.4, {false, 1e-2}).helicity_identity_residual;
    const double e2 = physical_fields(st, {}, r, 0.4, {false, 5e-3}).helicity_identity_residual;
    EXPECT_NEAR(e1 / e2, 4.0, 0.2);
}

// The grid's polar rule integrates sin(theta) = sqrt(1 - u^2) only algebraically (~n^-3).
TEST(Synthesis, ShellLocalizedStateMatchesRadialIntegral) {
    const double kc = 3.0, sw = 0.8, kmin = 0.2, kmax = 6.2;
    auto g = [&](double k) { return std::exp(-(k - kc) * (k - kc) / (2 * sw * sw)); };
    const double pref = -1.0 / (4 * pi * std::sqrt(2.0));
    std::vector<double> errs;
    for (int n : {16, 32}) {
        const auto ms = ModeSet::from_grid(std::make_shared<const KGrid>(GridSpec{n, n, 8, kmin, kmax}));
        const auto st = localized_state(ms, Vec3::Zero(), Helicity::plus, g, false);
        const Synthesizer syn(st, GaugeSpec::constant(0.0));
        double scale = 0.0, err = 0.0, transverse = 0.0;
        for (double t : {0.0, 0.7})
            for (double z : {0.0, 0.3, 0.9, 2.0}) {
                auto integrand = [&](double k, bool imag) {
                    const double x = k * z;
                    const double j1x = x == 0.0 ? 0.5 : std::cyl_bessel_j(1, x) / x;
                    const cplx v = k * k * g(k) * std::exp(-I * k * t) * j1x;
                    return imag ? v.imag() : v.real();
                };
                const cplx ref =
                    pref * cplx(oracle::simpson([&](double k) { return integrand(k, false); }, kmin, kmax, 2000),
                                oracle::simpson([&](double k) { return integrand(k, true); }, kmin, kmax, 2000));
                const CVec3 v = syn.psi(Vec3(0, 0, z), t, 0.0)[0];
                scale = std::max(scale, std::abs(ref));
                err = std::max(err, std::abs(v.z() - ref));
                transverse = std::max({transverse, std::abs(v.x()), std::abs(v.y())});
            }
        EXPECT_LT(transverse / scale, 1e-15);
        errs.push_back(err / scale);
    }
    EXPECT_LT(errs[1], 3e-5);
    EXPECT_GT(errs[0] / errs[1], 6.0);
}

TEST(Synthesis, RegaugingLeavesPhysicalFieldsInvariant) {
    const auto st = gaussian_packet(packet_modes(), Vec3(0.4, 0.2, 1.8), 0.5, Helicity::minus);
    const GaugeSpec g0 = GaugeSpec::constant(0.0), g1 = GaugeSpec::azimuthal(2);
    const auto moved = regauge(st, g0, g1);
    const Vec3 r(0.5, -0.2, 0.1);
    const auto a = physical_fields(st, g0, r, 0.3, {true});
    const auto b = physical_fields(moved, g1, r, 0.3, {true});
    EXPECT_LT((a.D_total - b.D_total).norm(), 1e-14 * a.D_total.norm());
    EXPECT_LT((a.B_total - b.B_total).norm(), 1e-14 * a.B_total.norm());
}

TEST(Synthesis, LineEvaluationMatchesPointwise) {
    const auto st = gaussian_packet(packet_modes(), Vec3(0, 0, 2), 0.5, Helicity::plus);
    const Synthesizer syn(st, {});
    const Vec3 r0(0.1, 0.2, -0.4), step(0.05, 0.0, 0.12);
    const auto line = syn.psi_pair_line(r0, step, 30, 0.6, 0.5);
    for (int i = 0; i < 30; i += 7) {
        const auto p = syn.psi_pair(r0 + i * step, 0.6, 0.5);
        EXPECT_LT((line[i][0][0] - p[0][0]).norm(), 1e-12);
        EXPECT_LT((line[i][1][0] - p[1][0]).norm(), 1e-12);
    }
}

TEST(TwoPhoton, ExchangeSymmetricAndRequiresPairs) {
    const auto ms = ModeSet::box(1.0, {Vec3(1, 0, 0), Vec3(0, 1, 2)});
    FockState st(ms);
    EXPECT_THROW(synthesize_two_photon(st, AlphaWeight::zero(), {}, Vec3::Zero(), 0, Vec3::Ones(), 0), std::invalid_argument);
    st.set_pair(0, Helicity::plus, 1, Helicity::minus, cplx(0.3, 0.4));
    st.set_pair(1, Helicity::plus, 1, Helicity::plus, 0.5);
    const Vec3 r(0.1, 0.2, 0.3), r2(-0.4, 0.5, 0.0);
    const auto a = synthesize_two_photon(st, AlphaWeight::plus_half(), {}, r, 0.1, r2, 0.5);
    const auto b = synthesize_two_photon(st, AlphaWeight::plus_half(), {}, r2, 0.5, r, 0.1);
    EXPECT_LT((a.value - b.value.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Residuals, ExactOnSinglePlaneWave) {
    const auto ms = ModeSet::box(1.0, {Vec3(0.3, -0.5, 1.1)});
    FockState st(ms);
    st.set_one(0, Helicity::minus, 1.0);
    const SampleBox box{Vec3(0.1, 0.2, 0.3), Vec3::Constant(0.5), 3};
    const Steps s{0.05, 0.05};
    EXPECT_LT(wave_equation_residual(st, AlphaWeight::minus_half(), {}, box, 0.3, s), 1e-12);
    EXPECT_LT(field_potential_residual(st, {}, box, 0.3, 0.05), 1e-12);
    EXPECT_LT(maxwell_residual(st, {}, box, 0.3, s).max(), 1e-12);
}

TEST(Residuals, SecondOrderOnPackets) {
    const auto st = gaussian_packet(packet_modes(), Vec3(0, 0, 2), 0.5, Helicity::plus);
    const SampleBox box{Vec3(0.2, -0.1, 0.3), Vec3::Ones(), 3};
    const auto m1 = maxwell_residual(st, {}, box, 0.4, {0.1, 0.1});
    const auto m2 = maxwell_residual(st, {}, box, 0.4, {0.05, 0.05});
    EXPECT_NEAR(m1.faraday / m2.faraday, 4.0, 0.3);
    EXPECT_NEAR(m1.div_d / m2.div_d, 4.0, 0.3);
    const double w1 = wave_equation_residual(st, AlphaWeight::zero(), {}, box, 0.4, {0.1, 0.1});
    const double w2 = wave_equation_residual(st, AlphaWeight::zero(), {}, box, 0.4, {0.05, 0.05});
    EXPECT_NEAR(w1 / w2, 4.0, 0.3);
    EXPECT_GT(wave_equation_residual(st, AlphaWeight::zero(), {}, box, 0.4, {0.05, 0.05}, true), 0.1);
    EXPECT_THROW(maxwell_residual(st, {}, box, 0.4, {0.5, 0.05}), std::invalid_argument);
}

TEST(SampleBoxes, TrapezoidWeightsAndCarrierStencil) {
    const SampleBox b{Vec3(1, 2, 3), Vec3(0.5, 1.0, 2.0), 5};
    double s = 0.0;
    for (double w : b.weights()) s += w;
    EXPECT_NEAR(s, 8.0 * 0.5 * 1.0 * 2.0, 1e-14);
    EXPECT_EQ(b.points().size(), 125u);
    EXPECT_THROW((SampleBox{Vec3::Zero(), Vec3::Ones(), 1}.weights()), std::invalid_argument);
    const double q = 1.7, h = 0.2, x = 0.3;
    const cplx d = (std::exp(I * q * (x + h)) - std::exp(I * q * (x - h))) / carrier_denominator(q, h);
    EXPECT_LT(std::abs(d - I * q * std::exp(I * q * x)), 1e-14);
}

TEST(Synthesis, RejectsCoefficientMismatch) {
    const auto ms = ModeSet::box(1.0, {Vec3(1, 0, 0)});
    EXPECT_THROW(Synthesizer(*ms, std::vector<cplx>(3), {}), std::invalid_argument);
}
