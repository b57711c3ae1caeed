#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "blowup/energy.hpp"
#include "blowup/operators.hpp"

using namespace blowup;

namespace {
double sup(const FieldPair& u) { return std::max(u.first.max_abs(), u.second.max_abs()); }
}  // namespace

TEST_CASE("collocated free operator matches the exact polynomial operator") {
    const GridPtr g = make_grid({5, 14, 8, 5});
    std::mt19937_64 rng(17);
    for (int s = 0; s < 5; ++s) {
        const AxisPolyPair u = random_pair(5, rng);
        const FieldPair a = apply_free(sample(g, u));
        const FieldPair b = sample(g, apply_free(u, 5));
        CHECK(sup(a - b) <= 1e-9 * std::max(1.0, sup(b)));
    }
}

TEST_CASE("symmetry eigenfunctions of the linearized operator") {
    const GridPtr g = make_grid({5, 16, 12, 5});
    for (double a : {0.0, 0.05, 0.1, 0.15}) {
        const FieldPair G = growing_mode(g, a), H = profile_velocity(g, a);
        CHECK(sup(apply_linearized(G, a) - G) <= 1e-9);
        CHECK(sup(apply_linearized(H, a)) <= 1e-9);
    }
}

TEST_CASE("static profiles are stationary for the full flow") {
    // L~ Psi + (0, Psi1^3) = 0 written for the free part: the profile satisfies
    // psi2 = xi.grad psi1 + psi1 and lap psi1 - xi.grad psi2 - 2 psi2 + psi1^3 = 0
    const GridPtr g = make_grid({5, 16, 12, 5});
    const double a = 0.12;
    const FieldPair p = static_profile(g, a);
    FieldPair r = apply_free(p);
    r.second += p.first * p.first * p.first;
    CHECK(sup(r) <= 1e-9);
    CHECK(sup(static_profile(g, a) - static_profile(g, 0.0) - profile_deviation(g, a)) <= 1e-14);
}

TEST_CASE("generator matrix reproduces the operator") {
    const GridPtr g = make_grid({5, 8, 4, 5});
    const GeneratorMatrix m = assemble_generator(g, 0.1, Generator::Linearized);
    std::mt19937_64 rng(4);
    const FieldPair u = sample(g, random_pair(4, rng));
    const Eigen::VectorXd direct = stack(apply_linearized(u, 0.1));
    CHECK((m.M * stack(u) - direct).cwiseAbs().maxCoeff() <= 1e-10 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("sector spectra contain the symmetry eigenvalues in the right sectors") {
    SpectrumOptions o;
    o.nr = 24;
    auto near = [](const std::vector<SpectrumEntry>& s, double target) {
        for (const auto& e : s)
            if (e.converged && std::abs(e.lambda - target) < 1e-6) return true;
        return false;
    };
    const auto s0 = sector_spectrum(o, 0), s1 = sector_spectrum(o, 1), s2 = sector_spectrum(o, 2);
    CHECK(near(s0, 1.0));
    CHECK_FALSE(near(s0, 0.0));
    CHECK(near(s1, 0.0));
    CHECK_FALSE(near(s1, 1.0));
    for (const auto& s : {s0, s1, s2})
        for (const auto& e : s)
            if (e.converged && e.lambda.real() > -0.5) CHECK(std::min(std::abs(e.lambda), std::abs(e.lambda - 1.0)) < 1e-6);
}

TEST_CASE("left modes are normalized and annihilate the other mode") {
    const GridPtr g = make_grid({5, 10, 6, 5});
    const GeneratorMatrix m = assemble_generator(g, 0.05, Generator::Linearized);
    const FieldPair G = growing_mode(g, 0.05), H = profile_velocity(g, 0.05);
    const LeftModes lm = left_modes(m, G, H);
    CHECK(lm.ell1.dot(stack(G)) == doctest::Approx(1.0));
    CHECK(lm.ell0.dot(stack(H)) == doctest::Approx(1.0));
    CHECK(std::abs(lm.ell1.dot(stack(H))) < 1e-8);
    CHECK(std::abs(lm.ell0.dot(stack(G))) < 1e-8);
}

TEST_CASE("log-linear fit") {
    std::vector<double> tau, v;
    for (int k = 0; k <= 100; ++k) {
        tau.push_back(0.1 * k);
        v.push_back(3.0 * std::exp(-0.7 * tau.back()));
    }
    const LinearFit f = fit_log_linear(tau, v, 2.0, 8.0);
    CHECK(f.rate == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(f.samples == 61);
    CHECK_THROWS_AS(fit_log_linear(tau, v, 2.0, 2.5), NonConvergedFit);
    v[50] = -1.0;
    CHECK_THROWS_AS(fit_log_linear(tau, v, 2.0, 8.0), NonConvergedFit);
    for (size_t k = 0; k < v.size(); ++k) v[k] = 1.0 + (k % 2 ? 5.0 : 0.0);
    CHECK_THROWS_AS(fit_log_linear(tau, v, 2.0, 8.0, 0.1), NonConvergedFit);
}

TEST_CASE("semigroup rates of the symmetry modes") {
    const GridPtr g = make_grid({5, 12, 6, 5});
    const GeneratorMatrix m = assemble_generator(g, 0.0, Generator::Linearized);
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(m.M, false).eigenvalues().cwiseAbs().maxCoeff();
    const double dt = 2.5 / radius;
    const FieldPair G = growing_mode(g, 0.0), H = profile_velocity(g, 0.0);
    CHECK(semigroup_decay_probe(m, g, G, nullptr, nullptr, nullptr, 5.0, dt, 1.0, 5.0).fit.rate ==
          doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(semigroup_decay_probe(m, g, H, nullptr, nullptr, nullptr, 5.0, dt, 1.0, 5.0).fit.rate) < 1e-3);
    const LeftModes lm = left_modes(m, G, H);
    std::mt19937_64 rng(8);
    const FieldPair r = sample(g, random_pair(5, rng));
    CHECK(semigroup_decay_probe(m, g, r, &lm, &G, &H, 8.0, dt, 2.0, 8.0).fit.rate <= -0.6);
}
