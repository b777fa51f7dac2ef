#include "oracles.hpp"
#include "photonwf/beams.hpp"

#include <gtest/gtest.h>

using namespace photonwf;

namespace {

double wrap(double a) { return std::remainder(a, 2 * pi); }

ParaxialLGSpec lg(int l, int s) {
    ParaxialLGSpec p;
    p.omega = 1;
    p.kz = 1;
    p.w = 50;
    p.lz = l;
    p.sigma = helicity_from_int(s);
    p.profile = l == 0 ? Profile::gaussian : Profile::lg_ring;
    return p;
}

}  // namespace

TEST(Bessel, MatchesPowerSeries) {
    for (int l = 0; l <= 8; ++l)
        for (double x = 0.0; x <= 10.0; x += 0.37) EXPECT_NEAR(bessel_j(l, x), oracle::bessel_series(l, x), 1e-12);
}

TEST(Bessel, LargeArgumentsAndSymmetries) {
    for (int l = 0; l <= 12; ++l)
        for (double x : {15.0, 33.3, 80.0}) EXPECT_NEAR(bessel_j(l, x), std::cyl_bessel_j(l, x), 1e-13);
    for (int l = 1; l <= 4; ++l) {
        EXPECT_NEAR(bessel_j(-l, 2.7), (l % 2 ? -1.0 : 1.0) * bessel_j(l, 2.7), 1e-15);
        EXPECT_NEAR(bessel_j(l, -2.7), (l % 2 ? -1.0 : 1.0) * bessel_j(l, 2.7), 1e-15);
    }
}

TEST(Bessel, ModeSolvesHelmholtzSecondOrder) {
    const BesselBeamSpec b{2.0, 1.0, 2};
    const SampleBox box{Vec3(0.3, 0.2, 0.1), Vec3::Ones(), 3};
    const double r1 = helmholtz_residual(b, box, 0.1), r2 = helmholtz_residual(b, box, 0.05);
    EXPECT_NEAR(r1 / r2, 4.0, 0.05);
    EXPECT_LT(r2, 1e-3);
}

TEST(Bessel, StandingWaveDecomposition) {
    for (int l = 0; l <= 3; ++l) {
        const auto s = standing_wave_check(BesselBeamSpec{2.0, 1.0, l}, 20.0, 60.0);
        EXPECT_NEAR(wrap(s.outgoing_phase + l * pi / 2 + pi / 4), 0.0, 2e-2) << "l=" << l;
        EXPECT_NEAR(s.incoming_phase, -s.outgoing_phase, 1e-15);
        EXPECT_NEAR(s.amplitude, std::sqrt(2 / pi), 1e-2);
        const auto far = standing_wave_check(BesselBeamSpec{2.0, 1.0, l}, 80.0, 240.0);
        EXPECT_NEAR(s.envelope_power, 0.5, 2e-2);
        EXPECT_LT(std::abs(far.envelope_power - 0.5), std::abs(s.envelope_power - 0.5) + 1e-4);
        EXPECT_NEAR(far.envelope_power, 0.5, 5e-3);
    }
    EXPECT_THROW(standing_wave_check(BesselBeamSpec{2.0, 1.0, 4}, 20.0, 60.0), std::invalid_argument);
    EXPECT_THROW((BesselBeamSpec{1.0, 1.0, 0}.validate()), std::invalid_argument);
}

TEST(Paraxial, AngularMomentumPerPhoton) {
    const int cases[4][2] = {{0, 1}, {1, 1}, {-1, 1}, {2, -1}};
    for (const auto& c : cases) {
        const auto r = jbeam_numeric_match(lg(c[0], c[1]));
        EXPECT_NEAR(r.jz_per_photon, c[0] + c[1], 0.01 * std::max(1, std::abs(c[0] + c[1])));
        EXPECT_LT(r.max_profile_deviation, 0.02);
    }
}

TEST(Paraxial, FlatTopConcentratesAngularMomentumAtRim) {
    ParaxialLGSpec f = lg(0, 1);
    f.profile = Profile::flat_top;
    f.edge = 2;
    const auto r = jbeam_numeric_match(f);
    EXPECT_LT(r.interior_ratio, 1e-3);
    EXPECT_NEAR(r.jz_per_photon, 1.0, 0.01);
}

TEST(Paraxial, NumericDensitiesMatchClosedForms) {
    const auto s = lg(1, 1);
    for (double r : {20.0, 50.0, 80.0}) {
        const auto d = beam_densities_numeric(s, Vec3(r * std::cos(0.4), r * std::sin(0.4), 0.3), 1e-2);
        EXPECT_NEAR(d.jz, jbeam_analytic(s, r), 0.02 * jbeam_analytic(s, 50.0));
        EXPECT_NEAR(d.n, beam_number_density_analytic(s, r), 0.02 * beam_number_density_analytic(s, 50.0));
    }
}

TEST(Paraxial, RejectsBadSpecs) {
    ParaxialLGSpec s = lg(1, 1);
    s.w = 5;
    EXPECT_THROW(jbeam_numeric_match(s), std::invalid_argument);
    s.w = -1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_THROW(profile_from_string("tophat"), std::invalid_argument);
}

TEST(Localized, WindingNumbersOfSpinComponents) {
    LocalizedScanSpec sp;
    sp.grid = GridSpec{12, 12, 24, 0.2, 6.2};
    sp.k_center = 3.0;
    sp.k_width = 0.8;
    sp.rmax = 3.0;
    sp.points = 16;
    const auto sc = localized_state_scan(sp, GaugeSpec::azimuthal(0), Helicity::plus, AlphaWeight::zero(), {0.0, 0.5});
    EXPECT_EQ(sc.winding[0], -1);
    EXPECT_EQ(sc.winding[1], 0);
    EXPECT_EQ(sc.winding[2], 1);
    EXPECT_EQ(sc.profiles[0].peak_radius, 0.0);
    EXPECT_LT(sc.profiles[1].peak, sc.profiles[0].peak);
}

TEST(Localized, WindingNumberOfSimpleLoops) {
    std::vector<cplx> loop;
    for (int i = 0; i < 32; ++i) loop.push_back(std::polar(1.0, -2 * 2 * pi * i / 32));
    EXPECT_EQ(winding_number(loop), -2);
    std::vector<cplx> flat(16, cplx(1.0, 0.5));
    EXPECT_EQ(winding_number(flat), 0);
}
