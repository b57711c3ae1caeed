#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/spectral.hpp"

using namespace blowup;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("hypergeometric parameters of the radial problem") {
    const SpectralParams p(cplx(2.0, 1.0), 3);
    CHECK(p.a == cplx(2.0, 0.5));
    CHECK(p.b == cplx(4.5, 0.5));
    CHECK(p.c == cplx(5.5, 0.0));
    CHECK_THROWS_AS(SpectralParams(1.0, 0, 7), UnsupportedDimension);
}

TEST_CASE("indicator values from Gamma tables") {
    // lambda = 2, l = 0: a = 1/2, b = 3
    CHECK(std::abs(mode_indicator(SpectralParams(2.0, 0))) == doctest::Approx(1.0 / (2.0 * std::sqrt(kPi))));
    // lambda = 1, l = 0: a = 0 is a pole; lambda = 0, l = 1: a = 0 again
    CHECK(mode_indicator(SpectralParams(1.0, 0)) == cplx(0.0, 0.0));
    CHECK(mode_indicator(SpectralParams(0.0, 1)) == cplx(0.0, 0.0));
    // lambda = -1, l = 0 sits on the boundary of the scan region: a = -1
    CHECK(mode_indicator(SpectralParams(-1.0, 0)) == cplx(0.0, 0.0));
}

TEST_CASE("coarse scan flags exactly the symmetry modes") {
    ModeScanOptions o;
    o.step = 0.05;
    o.re_lo = -19;
    o.re_hi = 60;
    o.im_hi = 100;
    o.lmax = 3;
    const ModeScan s = mode_stability_scan(o);
    CHECK(s.flags_exact);
    REQUIRE(s.flagged.size() == 2);
    for (const auto& p : s.flagged) CHECK(p.modulus < 1e-8);
    REQUIRE(s.min_nonadjacent.size() == 4);
    for (double m : s.min_nonadjacent) CHECK(m > 1e-3);
    // the job pool must not change the outcome
    o.jobs = 3;
    const ModeScan t = mode_stability_scan(o);
    CHECK(t.min_nonadjacent == s.min_nonadjacent);
    CHECK(t.heat.size() == s.heat.size());
}

TEST_CASE("closed forms agree with the series") {
    const ClosedFormCheck c = closed_form_check(6, 46);
    CHECK(c.max_err_phi0 < 1e-10);
    CHECK(c.max_err_phi1 < 1e-10);
    // l = 0 closed form: independent evaluation against 2F1 with a = 5/4
    for (double z : {0.1, 0.5, 0.9}) CHECK(phi0_closed(0, z) == doctest::Approx(phi0_series(0, z)).epsilon(1e-12));
}

TEST_CASE("Wronskian identity") {
    std::vector<double> rhos;
    for (int k = 0; k <= 40; ++k) rhos.push_back(0.1 + 0.02 * k);
    for (int l = 0; l <= 6; ++l) {
        const WronskianCheck w = wronskian_check(l, rhos);
        CHECK(w.max_rel_error < 1e-8);
        CHECK(w.negative);
    }
}

TEST_CASE("hypergeometric equation residuals") {
    std::vector<double> zs;
    for (int k = 0; k <= 30; ++k) zs.push_back(0.05 + 0.03 * k);
    for (cplx lam : {cplx(0.3, 1.2), cplx(-0.5, -2.0), cplx(2.0, 0.0)})
        for (int l : {0, 2, 5}) {
            const HypResidual r = hyp_ode_residual(SpectralParams(lam, l), zs);
            CHECK(r.w0 < 1e-10);
            CHECK(r.w1_defined);
            CHECK(r.w1 < 1e-10);
        }
    // lambda = 0, l = 1: the solution analytic at 1 degenerates (a + b + 1 - c = 0)
    const HypResidual r = hyp_ode_residual(SpectralParams(0.0, 1), zs);
    CHECK_FALSE(r.w1_defined);
    CHECK(r.w0 < 1e-10);
}

TEST_CASE("multiplicity solution solves its ODE") {
    const double h = 1e-5;
    for (double c0 : {0.0, 1.3})
        for (double rho : {0.05, 0.3, 0.39, 0.41, 0.7, 0.95}) {
            const double u = multiplicity_solution(rho, c0, 0);
            const double du = multiplicity_solution(rho, c0, 1);
            const double d2u = multiplicity_solution(rho, c0, 2);
            CHECK(d2u + 4 * du / rho - 4 * u / (rho * rho) + rho / (1 - rho * rho) ==
                  doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
            const double fd = (multiplicity_solution(rho + h, c0, 0) - multiplicity_solution(rho - h, c0, 0)) / (2 * h);
            CHECK(fd == doctest::Approx(du).epsilon(1e-7));
        }
    // series form near the origin: u = -sum_{k>=1} rho^{2k+1} / (2k (2k + 5)) for c0 = 0
    double s = 0.0;
    const double rho = 0.2;
    for (int k = 1; k < 40; ++k) s -= std::pow(rho, 2 * k + 1) / (2.0 * k * (2.0 * k + 5.0));
    CHECK(multiplicity_solution(rho, 0.0, 0) == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("multiplicity check report") {
    std::vector<double> rhos;
    for (int k = 0; k <= 90; ++k) rhos.push_back(0.05 + 0.01 * k);
    const MultiplicityCheck m = multiplicity_ode_check(rhos, 0.0);
    CHECK(m.max_residual < 1e-8);
    CHECK(m.homogeneous_residual < 1e-12);
    CHECK(m.wronskian_error < 1e-12);
    CHECK(m.second_derivative_monotone);
    // u' ~ -(1/2) log(1 - rho) near the light cone
    CHECK(m.log_slope.back() == doctest::Approx(0.5).epsilon(0.2));
}
