#include "oracles.hpp"
#include "photonwf/densities.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace photonwf;

namespace {

// Box mode function scale * k^alpha * e * exp(i(k.r - k t)) in the chi = 0 gauge.
CVec3 plane_mode(const Vec3& k, int s, double V, double alpha, const Vec3& r, double t) {
    const double w = k.norm(), th = std::acos(k.z() / w), ph = std::atan2(k.y(), k.x());
    const Vec3 tv(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
    const Vec3 pv(-std::sin(ph), std::cos(ph), 0.0);
    const CVec3 e = (tv.cast<cplx>() + cplx(0, s) * pv.cast<cplx>()) / std::sqrt(2.0);
    return e * (std::pow(w, alpha) / std::sqrt(V) * std::exp(I * (k.dot(r) - w * t)));
}

std::shared_ptr<const ModeSet> packet_modes(int n = 8) {
    return ModeSet::from_grid(std::make_shared<const KGrid>(GridSpec{n, n, 2 * n, 0.5, 3.5}));
}

}  // namespace

TEST(NumberDensity, TwoModeClosedForm) {
    const double V = 3.0;
    const auto ms = ModeSet::collinear(V, Vec3::UnitZ(), {1.0, 4.0});
    FockState st(ms);
    st.set_one(0, Helicity::plus, 1 / std::sqrt(2.0));
    st.set_one(1, Helicity::plus, 1 / std::sqrt(2.0));
    for (double a : {-0.5, 0.0, 0.5})
        for (double z = 0.0; z < 2.2; z += 0.17)
            EXPECT_NEAR(number_density(st, AlphaWeight::from_double(a), {}, Vec3(0.3, -0.1, z), 0.0),
                        oracle::two_mode_density(1.0, 4.0, a, V, z), 1e-14);
}

TEST(NumberDensity, LandauPeierlsIsNonNegative) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec3> ks;
    for (int i = 0; i < 6; ++i) ks.push_back(Vec3(u(rng), u(rng), u(rng)) * 4.0);
    FockState st(ModeSet::box(1.0, ks));
    for (auto& c : st.one_photon()) c = cplx(u(rng), u(rng));
    for (int i = 0; i < 200; ++i)
        EXPECT_GE(number_density(st, AlphaWeight::zero(), {}, Vec3(u(rng), u(rng), u(rng)) * 3, u(rng)), -1e-15);
}

TEST(NumberDensity, LinearBasisPathAgrees) {
    auto st = gaussian_packet(packet_modes(), Vec3(0.2, 0, 2), 0.5, Helicity::plus);
    const auto other = gaussian_packet(packet_modes(), Vec3(0, 0.5, 1.5), 0.5, Helicity::minus);
    for (std::size_t i = 0; i < st.one_photon().size(); ++i) st.one_photon()[i] += cplx(0.3, 0.4) * other.one_photon()[i];
    const Vec3 r(0.3, 0.1, -0.2);
    for (auto a : {AlphaWeight::zero(), AlphaWeight::plus_half()}) {
        const auto lin = linear_basis_densities(st, a, {}, r, 0.2);
        EXPECT_NEAR(lin.n, number_density(st, a, {}, r, 0.2), 1e-14);
        EXPECT_LT((lin.j - current_density(st, a, {}, r, 0.2)).norm(), 1e-14);
    }
}

TEST(TwoPhotonDensity, HandExpandedTwoPairState) {
    const double V = 8.0, q = 2 * pi / 2.0;
    const Vec3 ka(q, 0, 0), kb(0, q, q), kc(0, 0, -q);
    FockState st(ModeSet::box(V, {ka, kb, kc}));
    st.set_pair(0, Helicity::plus, 1, Helicity::plus, cplx(0.6, 0.2));
    st.set_pair(0, Helicity::plus, 2, Helicity::plus, cplx(-0.3, 0.5));
    st = normalize(st);
    const cplx b1 = st.pair(0, Helicity::plus, 1, Helicity::plus), b2 = st.pair(0, Helicity::plus, 2, Helicity::plus);
    for (double a : {0.0, 0.5})
        for (const Vec3& r : {Vec3(0.1, 0.2, 0.3), Vec3(-0.7, 0.4, 1.1)}) {
            const double t = 0.35;
            const CVec3 fa = plane_mode(ka, 1, V, a, r, t), fa2 = plane_mode(ka, 1, V, -a, r, t);
            const CVec3 g = b1 * plane_mode(kb, 1, V, a, r, t) + b2 * plane_mode(kc, 1, V, a, r, t);
            const CVec3 g2 = b1 * plane_mode(kb, 1, V, -a, r, t) + b2 * plane_mode(kc, 1, V, -a, r, t);
            const double ref = (std::norm(b1) + std::norm(b2)) * std::real(fa.dot(fa2)) + std::real(g.dot(g2));
            const AlphaWeight al = AlphaWeight::from_double(a);
            EXPECT_NEAR(number_density(st, al, {}, r, t), ref, 1e-14);
            EXPECT_NEAR(two_photon_density_rspace(st, al, {}, r, t, 4), ref, 1e-14);
        }
}

TEST(TwoPhotonDensity, RealSpacePathNeedsBoxModes) {
    auto st = gaussian_packet(packet_modes(4), Vec3(0, 0, 2), 0.5, Helicity::plus);
    st.set_pair(0, Helicity::plus, 1, Helicity::plus, 1.0);
    EXPECT_THROW(two_photon_density_rspace(st, AlphaWeight::zero(), {}, Vec3::Zero(), 0, 4), std::invalid_argument);
}

TEST(Current, ContinuityExactForPlaneWaveAndSecondOrderForPackets) {
    FockState one(ModeSet::box(1.0, {Vec3(0.3, -0.5, 1.1)}));
    one.set_one(0, Helicity::plus, 1.0);
    const SampleBox box{Vec3(0.2, -0.1, 0.3), Vec3::Ones(), 3};
    EXPECT_LT(continuity_residual(one, AlphaWeight::plus_half(), {}, box, 0.4, {0.05, 0.05}), 1e-12);
    const auto pk = gaussian_packet(packet_modes(), Vec3(0, 0, 2), 0.5, Helicity::plus);
    const double c1 = continuity_residual(pk, AlphaWeight::plus_half(), {}, box, 0.4, {0.1, 0.1});
    const double c2 = continuity_residual(pk, AlphaWeight::plus_half(), {}, box, 0.4, {0.05, 0.05});
    EXPECT_NEAR(c1 / c2, 4.0, 0.3);
}

TEST(Momentum, PlaneWaveCarriesOnePhotonMomentum) {
    const Vec3 k(0.4, -0.3, 1.2);
    const double V = 5.0;
    FockState st(ModeSet::box(V, {k}));
    st.set_one(0, Helicity::minus, cplx(0, 1));
    const Vec3 P = momentum_density(st, {}, Vec3(0.2, 0.3, 0.4), 0.1);
    EXPECT_LT((P - k / V).norm(), 1e-15);
    const auto coh = CoherentState::from_amplitudes(st, 3.0);
    EXPECT_LT((momentum_density(coh, {}, Vec3(0.2, 0.3, 0.4), 0.1) - 3.0 * k / V).norm(), 1e-14);
}

// Full-period trapezoid is exact for the box's trigonometric polynomials.
TEST(Momentum, PeriodicPacketIntegralsAreExact) {
    const double L = 8.0, q = 2 * pi / L;
    std::vector<Vec3> ks;
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = 2; k <= 4; ++k) ks.push_back(Vec3(i, j, k) * q);
    const auto pk = gaussian_packet(ModeSet::box(L * L * L, ks), Vec3(0, 0, 3 * q), 0.8 * q, Helicity::plus);
    const auto d = am_decomposition(pk, {}, SampleBox{Vec3::Zero(), Vec3::Constant(L / 2), 9}, 0.3);
    EXPECT_LT((d.momentum - mean_wavevector(pk)).norm(), 1e-13);
    EXPECT_NEAR(d.number, 1.0, 1e-13);
    EXPECT_TRUE(d.surface_warning);
}

TEST(InnerProduct, KSpaceAndMismatchedModes) {
    const auto pk = gaussian_packet(packet_modes(), Vec3(0, 0, 2), 0.5, Helicity::plus);
    EXPECT_NEAR(std::abs(inner_product(pk, pk) - 1.0), 0.0, 1e-14);
    const auto other = gaussian_packet(packet_modes(6), Vec3(0, 0, 2), 0.5, Helicity::plus);
    EXPECT_THROW(inner_product(pk, other), std::invalid_argument);
}

TEST(Negativity, ScanMatchesClosedForm) {
    const auto r = two_mode_negativity_scan(Vec3(0, 0, 1), Vec3(0, 0, 4), AlphaWeight::plus_half(), 2.0);
    EXPECT_NEAR(r.min_numeric, -0.125, 1e-12);
    EXPECT_NEAR(r.min_closed_form, -0.125, 1e-15);
    EXPECT_GE(r.min_lp, -1e-15);
    EXPECT_NEAR(two_mode_closed_form_min(1, 9, AlphaWeight::plus_half(), 1.0),
                oracle::two_mode_density(1, 9, 0.5, 1.0, pi / 8), 1e-14);
    EXPECT_THROW(two_mode_negativity_scan(Vec3(0, 0, 1), Vec3(0, 1, 4), AlphaWeight::plus_half()), std::invalid_argument);
    EXPECT_THROW(two_mode_negativity_scan(Vec3(0, 0, 1), Vec3(0, 0, 1), AlphaWeight::plus_half()), std::invalid_argument);
}

TEST(Negativity, NarrowbandEquivalenceBreaksForBroadband) {
    EXPECT_LT(narrowband_deviation(2.0, 0.05), 1e-2);
    EXPECT_GT(narrowband_deviation(2.0, 0.5), 1e-2);
}
