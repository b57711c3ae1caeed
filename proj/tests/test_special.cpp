#include <doctest.h>

#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/special.hpp"

using namespace blowup;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("gamma at integers and half integers") {
    double fact = 1.0;
    for (int n = 1; n <= 15; ++n) {
        CHECK(complex_gamma(double(n)).real() == doctest::Approx(fact).epsilon(1e-13));
        fact *= n;
    }
    CHECK(complex_gamma(0.5).real() == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
    CHECK(complex_gamma(-0.5).real() == doctest::Approx(-2.0 * std::sqrt(kPi)).epsilon(1e-14));
    // value from tables: Gamma(1 + i) = 0.49801566811835604 - 0.15494982830181069 i
    const cplx g = complex_gamma(cplx(1.0, 1.0));
    CHECK(g.real() == doctest::Approx(0.49801566811835604).epsilon(1e-13));
    CHECK(g.imag() == doctest::Approx(-0.15494982830181069).epsilon(1e-13));
}

TEST_CASE("reciprocal gamma is exactly zero at the poles") {
    for (int n = 0; n <= 30; ++n) CHECK(rgamma(cplx(-n, 0.0)) == cplx(0.0, 0.0));
    CHECK(std::abs(rgamma(cplx(-3.0 + 1e-9, 0.0))) < 1e-8);
}

TEST_CASE("reflection formula as a property") {
    for (double x : {0.1, 0.3, 0.77})
        for (double y : {0.0, 0.5, 2.0}) {
            const cplx z(x, y);
            const cplx lhs = complex_gamma(z) * complex_gamma(1.0 - z);
            const cplx rhs = kPi / std::sin(kPi * z);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
            CHECK(std::abs(rgamma(z) * complex_gamma(z) - 1.0) <= 1e-13);
        }
}

TEST_CASE("hypergeometric function against elementary closed forms") {
    // all three regimes: Pfaff (z < -1/2), series, connection near 1
    for (double z : {-3.0, -0.8, -0.2, 0.1, 0.5, 0.85, 0.93, 0.99}) {
        CHECK(hyp2f1(1.0, 1.0, 2.0, z).real() == doctest::Approx(-std::log1p(-z) / z).epsilon(1e-13));
        CHECK(hyp2f1(0.7, 1.3, 1.3, z).real() == doctest::Approx(std::pow(1.0 - z, -0.7)).epsilon(1e-13));
    }
    for (double x : {0.3, 0.9, 1.7}) {
        const double z = -x * x;
        CHECK(hyp2f1(0.5, 1.0, 1.5, z).real() == doctest::Approx(std::atan(x) / x).epsilon(1e-13));
    }
    for (double x : {0.2, 0.6, 0.95}) {
        const double z = x * x;
        CHECK(hyp2f1(0.5, 0.5, 1.5, z).real() == doctest::Approx(std::asin(x) / x).epsilon(1e-12));
    }
    // terminating series: 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z^2/(c(c+1))
    const double b = 1.5, c = 2.5, z = 0.97;
    CHECK(hyp2f1(-2.0, b, c, z).real() == doctest::Approx(1 - 2 * b * z / c + b * (b + 1) * z * z / (c * (c + 1))));
}

TEST_CASE("Gauss summation at the edge of the connection branch") {
    // 2F1(a, b; c; 1) = Gamma(c) Gamma(c - a - b) / (Gamma(c - a) Gamma(c - b))
    const cplx a(0.3, 0.4), b(0.8, -0.1), c(2.6, 0.2);
    const cplx limit = complex_gamma(c) * complex_gamma(c - a - b) / (complex_gamma(c - a) * complex_gamma(c - b));
    CHECK(std::abs(hyp2f1(a, b, c, 0.999999) - limit) < 1e-4);
}

TEST_CASE("hypergeometric derivatives") {
    const cplx a(0.4, 0.3), b(1.7, 0.0), c(2.9, -0.2);
    const double h = 1e-4, h1 = 1e-5;
    for (double z : {-0.7, 0.2, 0.8, 0.95}) {
        const cplx fd1 = (hyp2f1(a, b, c, z + h1) - hyp2f1(a, b, c, z - h1)) / (2 * h1);
        const cplx fd2 = (hyp2f1(a, b, c, z + h) - 2.0 * hyp2f1(a, b, c, z) + hyp2f1(a, b, c, z - h)) / (h * h);
        CHECK(std::abs(hyp2f1_d1(a, b, c, z) - fd1) <= 1e-7 * std::abs(fd1));
        CHECK(std::abs(hyp2f1_d2(a, b, c, z) - fd2) <= 1e-4 * std::abs(fd2));
    }
}

TEST_CASE("hypergeometric errors") {
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, -2.0, 0.3), PoleError);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 2.0, 1.5), DomainError);
}
