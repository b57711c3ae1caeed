#include <doctest.h>

#include <cmath>
#include <random>

#include "blowup/geometry.hpp"

using namespace blowup;

namespace {
const double kSqrt2 = std::sqrt(2.0);

double interval(const Event& e, double T) {
    double s = -(T - e.t) * (T - e.t);
    for (double x : e.x) s += x * x;
    return s;
}
}  // namespace

TEST_CASE("single-axis boost coefficients are cosh and sinh") {
    for (double a : {-0.7, 0.0, 0.3, 1.1}) {
        const BoostCoeffs b = boost_coeffs(axis_rapidity(5, 2, a));
        REQUIRE(b.d() == 5);
        CHECK(b.A[0] == doctest::Approx(std::cosh(a)).epsilon(1e-15));
        CHECK(b.A[2] == doctest::Approx(std::sinh(a)).epsilon(1e-15));
        for (int j : {1, 3, 4, 5}) CHECK(b.A[j] == 0.0);
        CHECK(admissible(axis_rapidity(5, 2, a)));
    }
}

TEST_CASE("boosts preserve the Minkowski interval about the tip") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        Rapidity a(5);
        for (double& x : a) x = u(rng);
        Event e{0.3 + u(rng), {u(rng), u(rng), u(rng), u(rng), u(rng)}};
        const Event b = apply_boost(e, 1.0, a);
        CHECK(interval(b, 1.0) == doctest::Approx(interval(e, 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("unboosted blowup solution is the ODE solution") {
    for (double t : {0.0, 0.4, 0.9}) CHECK(blowup_solution(t, {0.1, 0, 0, 0, 0.2}, 1.0, Rapidity(5, 0.0)) ==
                                            doctest::Approx(kSqrt2 / (1.0 - t)));
}

TEST_CASE("boosted blowup solution solves u_tt - lap u = u^3") {
    const Rapidity a = {0.1, 0.0, -0.2, 0.0, 0.3};
    const double h = 1e-3, T = 1.0;
    const std::vector<double> x = {0.05, -0.1, 0.02, 0.07, 0.0};
    const double t = 0.2;
    const double u0 = blowup_solution(t, x, T, a);
    const double utt = (blowup_solution(t + h, x, T, a) - 2 * u0 + blowup_solution(t - h, x, T, a)) / (h * h);
    double lap = 0.0;
    for (int j = 0; j < 5; ++j) {
        auto xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        lap += (blowup_solution(t, xp, T, a) - 2 * u0 + blowup_solution(t, xm, T, a)) / (h * h);
    }
    CHECK(utt - lap - u0 * u0 * u0 == doctest::Approx(0.0).epsilon(1e-5).scale(u0 * u0 * u0));
}

TEST_CASE("similarity map round trip") {
    const SimilarityFrame f{1.3, 5};
    const std::vector<double> x = {0.1, -0.2, 0.3, 0.0, 0.05};
    const SimilarityPoint p = similarity_map(0.4, x, f);
    CHECK(p.tau == doctest::Approx(std::log(1.3 / 0.9)));
    const Event e = inverse_similarity_map(p.tau, p.xi, f);
    CHECK(e.t == doctest::Approx(0.4).epsilon(1e-14));
    for (int j = 0; j < 5; ++j) CHECK(e.x[j] == doctest::Approx(x[j]).epsilon(1e-14));
}

TEST_CASE("axis profile against its closed form") {
    for (double a : {-0.15, 0.05, 0.3}) {
        const AxisProfile p(a);
        for (double z : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
            const double D = std::cosh(a) - std::sinh(a) * z;
            CHECK(p.psi1(z) == doctest::Approx(kSqrt2 / D).epsilon(1e-14));
            CHECK(p.psi2(z) == doctest::Approx(kSqrt2 * std::cosh(a) / (D * D)).epsilon(1e-14));
            CHECK(p.potential(z) == doctest::Approx(3.0 * p.psi1(z) * p.psi1(z)).epsilon(1e-14));
            CHECK(p.deviation1(z) == doctest::Approx(p.psi1(z) - kSqrt2).epsilon(1e-12).scale(1.0));
            CHECK(p.deviation2(z) == doctest::Approx(p.psi2(z) - kSqrt2).epsilon(1e-12).scale(1.0));
            const double h = 1e-5;
            CHECK(p.dpsi1_dalpha(z) ==
                  doctest::Approx((AxisProfile(a + h).psi1(z) - AxisProfile(a - h).psi1(z)) / (2 * h)).epsilon(1e-8));
            CHECK(p.dpsi2_dalpha(z) ==
                  doctest::Approx((AxisProfile(a + h).psi2(z) - AxisProfile(a - h).psi2(z)) / (2 * h)).epsilon(1e-8));
        }
    }
}

TEST_CASE("profile deviation keeps relative accuracy for tiny rapidities") {
    const double a = 1e-9;
    const AxisProfile p(a);
    for (double z : {-0.8, 0.5, 1.0}) {
        // psi1 - sqrt2 = sqrt2 (a z) + O(a^2)
        CHECK(p.deviation1(z) == doctest::Approx(kSqrt2 * a * z).epsilon(1e-8));
        CHECK(p.deviation2(z) == doctest::Approx(2.0 * kSqrt2 * a * z).epsilon(1e-8));
    }
}

TEST_CASE("static profile pair matches the axis profile") {
    const double a = 0.2;
    const std::vector<double> xi = {0.1, 0.0, 0.3, -0.2, 0.4};
    const auto pr = static_profile_pair(xi, axis_rapidity(5, 5, a));
    const AxisProfile p(a);
    CHECK(pr[0] == doctest::Approx(p.psi1(0.4)));
    CHECK(pr[1] == doctest::Approx(p.psi2(0.4)));
}
