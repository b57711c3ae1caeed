#include <doctest.h>

#include <cmath>

#include "blowup/energy.hpp"
#include "blowup/evolution.hpp"

using namespace blowup;

namespace {
const double kSqrt2 = std::sqrt(2.0);
double sup(const FieldPair& u) { return std::max(u.first.max_abs(), u.second.max_abs()); }

EvolutionConfig small_config() {
    EvolutionConfig c;
    c.grid = {5, 12, 6, 5};
    return c;
}
}  // namespace

TEST_CASE("perturbation shapes") {
    Perturbation p{Shape::AxisOdd, 2.0, 0.5, true, false};
    CHECK(p.value(0.3, 0.2) == doctest::Approx(-p.value(-0.3, 0.2)));
    CHECK(p.value(0.3, 0.2) == doctest::Approx(2.0 * 0.3 * std::exp(-0.8)));
    p.shape = Shape::Radial;
    CHECK(p.value(0.3, 0.2) == doctest::Approx(p.value(-0.3, 0.2)));
    p.shape = Shape::None;
    CHECK(p.value(0.3, 0.2) == 0.0);
    CHECK(parse_shape("mixed") == Shape::Mixed);
    CHECK(shape_name(Shape::AxisOdd) == "axis_odd");
    CHECK_THROWS_AS(parse_shape("square"), ConfigError);
}

TEST_CASE("time step rule") {
    const GridPtr g = make_grid({5, 48, 12, 5});
    CHECK(time_step(*g, 0.5, 1e-2) == doctest::Approx(0.5 * g->step_scale()));
    CHECK(time_step(*g, 0.5, 1e-4) == 1e-4);
    CHECK_THROWS_AS(time_step(*g, -1.0, 1e-2), ConfigError);
}

TEST_CASE("initial data in the similarity frame") {
    const GridPtr g = make_grid({5, 10, 4, 5});
    const Perturbation none;
    const FieldPair psi = prepare_initial_data(g, none, 1.1, 0.25);
    // u0 = sqrt2, u1 = sqrt2 rescaled: (T sqrt2, T^2 sqrt2)
    CHECK(sup(psi - FieldPair{constant_field(g, 1.1 * kSqrt2), constant_field(g, 1.21 * kSqrt2)}) < 1e-14);
    CHECK_THROWS_AS(prepare_initial_data(g, none, 1.3, 0.25), DomainError);
    CHECK_THROWS_AS(prepare_initial_data(g, none, 0.7, 0.25), DomainError);
}

TEST_CASE("the constant profile and boosted profiles are stationary") {
    const GridPtr g = make_grid({5, 16, 12, 5});
    CHECK(sup(deviation_rhs(FieldPair{constant_field(g, 0.0), constant_field(g, 0.0)})) == 0.0);
    for (double a : {0.05, -0.1}) CHECK(sup(deviation_rhs(profile_deviation(g, a))) < 1e-9);
    FieldPair psi = static_profile(g, 0.08);
    for (int s = 0; s < 10; ++s) psi = step(psi, 1e-2);
    CHECK(sup(psi - static_profile(g, 0.08)) < 1e-9);
}

TEST_CASE("spatially constant data blow up like the ODE") {
    const auto rows = ode_blowup_check({5, 8, 4, 5}, 1.0, {0.2, 0.5, 0.9});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
        CHECK(r.exact == doctest::Approx(kSqrt2 / (1.0 - r.t)));
        CHECK(r.rel_error < 1e-10);
    }
    for (const auto& r : ode_blowup_check({5, 8, 4, 5}, 1.2, {0.5, 0.9})) CHECK(r.rel_error < 1e-6);
}

TEST_CASE("guard raises BlowupDetected") {
    const GridPtr g = make_grid({5, 8, 4, 5});
    FieldPair w{constant_field(g, 100.0), constant_field(g, 0.0)};
    CHECK_THROWS_AS(rk4_step(w, 1e-3, 50.0, 0.001), BlowupDetected);
}

TEST_CASE("modulation recovers the rapidity of a boosted profile") {
    const GridPtr g = make_grid({5, 12, 8, 5});
    Modulator mod(g);
    for (double a : {0.05, -0.12, 0.15}) {
        const ModulationState st = mod.extract_deviation(profile_deviation(g, a), 0.0);
        CHECK(st.alpha == doctest::Approx(a).epsilon(1e-9));
        CHECK(energy_norm(st.phi) < 1e-7);
        CHECK(std::abs(st.p) < 1e-7);
    }
    // a multiple of the growing mode is carried by p, not by alpha
    const double eps = 1e-4;
    const ModulationState st = mod.extract_deviation(eps * growing_mode(g, 0.0), 0.0);
    CHECK(std::abs(st.alpha) < 1e-10);
    CHECK(st.p == doctest::Approx(eps).epsilon(1e-6));
}

TEST_CASE("unperturbed evolution stays on the profile") {
    EvolutionConfig c = small_config();
    EvolveOptions o;
    o.tau_max = 1.0;
    const EvolutionTrace tr = evolve(c, 1.0, o);
    REQUIRE(tr.rows.size() == 21);
    for (const auto& r : tr.rows) {
        CHECK(r.phi_norm <= 1e-10);
        CHECK(r.alpha == 0.0);
    }
    CHECK_FALSE(tr.blowup);
}

TEST_CASE("a wrong blowup time excites the growing mode with the right sign") {
    EvolutionConfig c = small_config();
    c.tau_class = 4.0;
    const ShootSample early = classify_blowup_time(c, 0.99), late = classify_blowup_time(c, 1.01);
    // T > 1 lowers the data relative to the profile of frame T: the amplitude signs differ
    CHECK(early.amplitude * late.amplitude < 0.0);
    // the unperturbed problem has its root at T = 1
    c.T_lo = 0.99;
    c.T_hi = 1.013;
    c.probe_points = 2;
    const ShootResult r = shoot_blowup_time(c);
    CHECK(r.T_star == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.hi - r.lo <= c.bracket_tol);
    c.T_hi = 0.995;
    CHECK_THROWS_AS(shoot_blowup_time(c), BracketError);
}

TEST_CASE("decay fits on a synthetic trace") {
    EvolutionTrace tr;
    // long tail so that the tail value is alpha_inf to roundoff
    for (int k = 0; k <= 800; ++k) {
        TraceRecord r;
        r.tau = 0.05 * k;
        r.phi_norm = 1e-3 * std::exp(-0.5 * r.tau);
        r.alpha = 0.01 + 1e-3 * std::exp(-r.tau);
        tr.rows.push_back(r);
    }
    const DecayFit f = fit_decay_rate(tr, 2.0, 8.0);
    REQUIRE(f.phi);
    CHECK(f.phi->rate == doctest::Approx(-0.5).epsilon(1e-10));
    REQUIRE(f.alpha);
    CHECK(f.alpha->rate == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(f.alpha_inf == doctest::Approx(0.01 + 1e-3 * std::exp(-40.0)));
    for (auto& r : tr.rows) r.alpha = 0.0;
    const DecayFit g = fit_decay_rate(tr, 2.0, 8.0);
    CHECK_FALSE(g.alpha);
    CHECK_FALSE(g.alpha_error.empty());
}

TEST_CASE("envelope check needs stored states") {
    EvolutionTrace tr;
    tr.rows.push_back(TraceRecord{});
    const GridPtr g = make_grid({5, 8, 4, 5});
    CHECK_THROWS_AS(envelope_check(tr, g, 0.0, 1.0, 0.0, 1.0), ConfigError);
}
