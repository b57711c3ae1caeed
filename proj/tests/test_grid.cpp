#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "blowup/grid.hpp"

using namespace blowup;

namespace {
const double kPi = 3.14159265358979323846;
const double kSphere5 = 8.0 * kPi * kPi / 3.0;  // |S^4|
}  // namespace

TEST_CASE("grid layout") {
    const GridPtr g = make_grid({5, 12, 6, 5});
    CHECK(g->size() == 72);
    CHECK(g->rho()(g->nr() - 1) == doctest::Approx(1.0));
    for (int i = 0; i < g->nr(); ++i) CHECK(g->rho()(i) > 0.0);
    for (int i = 1; i < g->nr(); ++i) CHECK(g->rho()(i) > g->rho()(i - 1));
    for (int j = 1; j < g->nt(); ++j) CHECK(g->mu()(j) < g->mu()(j - 1));
    CHECK(g->step_scale() > 0.0);
    CHECK_THROWS_AS(make_grid({5, 1, 6, 5}), ConfigError);
}

TEST_CASE("ball and sphere measures in d = 5") {
    const GridPtr g = make_grid({5, 16, 8, 5});
    CHECK(g->sphere_area() == doctest::Approx(kSphere5).epsilon(1e-13));
    CHECK(g->ball_volume() == doctest::Approx(kSphere5 / 5.0).epsilon(1e-13));
}

TEST_CASE("quadrature integrates radial and axial monomials exactly") {
    const GridPtr g = make_grid({5, 16, 8, 5});
    for (int k = 0; k <= 4; ++k) {
        const ScalarField f = sample(g, [&](double r, double) { return std::pow(r, 2 * k); });
        CHECK(g->integrate_ball(f.values()) == doctest::Approx(kSphere5 / (2 * k + 5)).epsilon(1e-13));
    }
    // z^2 averages to |xi|^2 / d
    const ScalarField z2 = sample(g, [](double r, double m) { return r * r * m * m; });
    CHECK(g->integrate_ball(z2.values()) == doctest::Approx(kSphere5 / 35.0).epsilon(1e-13));
    // odd in z integrates to zero
    const ScalarField z3 = sample(g, [](double r, double m) { return std::pow(r * m, 3) + r * m; });
    CHECK(std::abs(g->integrate_ball(z3.values())) < 1e-14);
}

TEST_CASE("spectral derivatives of polynomials") {
    const GridPtr g = make_grid({5, 14, 8, 5});
    const ScalarField q = sample(g, [](double r, double) { return r * r; });
    const ScalarField q2 = sample(g, [](double r, double) { return std::pow(r, 4); });
    const ScalarField zq = sample(g, [](double r, double m) { return r * m * r * r; });
    // lap q = 2d, lap q^2 = 4 (d + 2) q, lap (z q) = 2 (d + 2) z
    CHECK((laplacian(q) - constant_field(g, 10.0)).max_abs() < 1e-9);
    CHECK((laplacian(q2) - 28.0 * q).max_abs() < 1e-9);
    CHECK((laplacian(zq) - 14.0 * axial_coordinate(g)).max_abs() < 1e-9);
    // xi . grad of a homogeneous polynomial of degree n is n times itself
    CHECK((euler(zq) - 3.0 * zq).max_abs() < 1e-10);
    CHECK((euler(q2) - 4.0 * q2).max_abs() < 1e-10);
}

TEST_CASE("interpolation reproduces polynomials off the nodes") {
    const GridPtr g = make_grid({5, 12, 8, 5});
    auto F = [](double r, double m) { return 1.0 + r * m - 2.0 * r * r + std::pow(r * m, 3); };
    const ScalarField f = sample(g, F);
    for (double r : {0.0, 0.13, 0.5, 0.97})
        for (double m : {-1.0, -0.2, 0.45, 1.0}) CHECK(evaluate(f, r, m) == doctest::Approx(F(r, m)).epsilon(1e-12));
}

TEST_CASE("resolution warning on an under-resolved field") {
    const GridPtr g = make_grid({5, 10, 6, 5});
    const ScalarField smooth = sample(g, [](double r, double) { return r * r; });
    const ScalarField sharp = sample(g, [](double r, double) { return std::exp(-200.0 * (r - 0.5) * (r - 0.5)); });
    CHECK_FALSE(check_resolution(smooth).raised);
    CHECK(check_resolution(sharp).raised);
}

TEST_CASE("snapshot round trips") {
    const GridPtr g = make_grid({5, 8, 4, 5});
    const FieldPair u{sample(g, [](double r, double m) { return r * m + 0.1; }),
                      sample(g, [](double r, double) { return 1.0 / (1.0 + r); })};
    const auto dir = std::filesystem::temp_directory_path();
    const std::string csv = (dir / "blowup_snapshot_test.csv").string();
    const std::string bin = (dir / "blowup_snapshot_test.bin").string();
    write_snapshot_csv(csv, u, 1.25);
    write_snapshot_binary(bin, u, 1.25);
    for (const Snapshot& s : {read_snapshot_csv(csv), read_snapshot_binary(bin)}) {
        CHECK(s.spec.nr == 8);
        CHECK(s.spec.nt == 4);
        CHECK(s.tau == 1.25);
        REQUIRE(s.slots.size() == 2);
        CHECK((s.slots[0] - u.first.values()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((s.slots[1] - u.second.values()).cwiseAbs().maxCoeff() == 0.0);
    }
    std::remove(csv.c_str());
    std::remove(bin.c_str());
}
