#include "blowup/special.hpp"

#include <array>
#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

constexpr double kG = 7.0;
constexpr std::array<double, 9> kLanczos = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                            771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                            -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma(z) for Re z >= 1/2
cplx log_gamma_right(cplx z) {
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + double(i));
    const cplx t = z + kG + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// sin(pi z) with the real part reduced so integers give exact zeros
cplx sin_pi(cplx z) {
    const double n = std::round(z.real());
    const cplx r(z.real() - n, z.imag());
    const cplx s = std::sin(M_PI * r);
    return (std::fmod(std::abs(n), 2.0) == 1.0) ? -s : s;
}

bool nonpositive_integer(cplx c) {
    return c.imag() == 0.0 && c.real() <= 0.0 && c.real() == std::round(c.real());
}

bool near_integer(cplx c) {
    return std::abs(c.imag()) < 1e-12 && std::abs(c.real() - std::round(c.real())) < 1e-12;
}

cplx series(cplx a, cplx b, cplx c, double z) {
    cplx sum = 1.0, term = 1.0;
    int small = 0;
    for (int k = 0; k < 20000; ++k) {
        term *= (a + double(k)) * (b + double(k)) / ((c + double(k)) * double(k + 1)) * z;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) {
            if (++small == 2) return sum;
        } else {
            small = 0;
        }
    }
    throw ConvergenceError("hypergeometric series failed to reach the error target");
}

}  // namespace

cplx complex_gamma(cplx z) {
    if (nonpositive_integer(z)) throw PoleError("Gamma has a pole at a non-positive integer");
    if (z.real() < 0.5) return M_PI / (sin_pi(z) * std::exp(log_gamma_right(1.0 - z)));
    return std::exp(log_gamma_right(z));
}

cplx rgamma(cplx z) {
    if (z.real() < 0.5) return sin_pi(z) * std::exp(log_gamma_right(1.0 - z)) / M_PI;
    return std::exp(-log_gamma_right(z));
}

cplx hyp2f1(cplx a, cplx b, cplx c, double z) {
    if (nonpositive_integer(c)) throw PoleError("2F1 undefined: c is a non-positive integer");
    if (!(z < 1.0)) throw DomainError("2F1 evaluated at z >= 1");
    // Pfaff: maps z < -1/2 into (1/3, 1)
    if (z < -0.5) return std::exp(-a * std::log(1.0 - z)) * hyp2f1(a, c - b, c, z / (z - 1.0));
    // the direct series is more accurate than the connection formula while it converges fast enough
    if (z <= 0.9 || nonpositive_integer(a) || nonpositive_integer(b)) return series(a, b, c, z);
    const cplx s = c - a - b;
    if (near_integer(s)) return series(a, b, c, z);
    const double w = 1.0 - z;
    const cplx gc = complex_gamma(c);
    const cplx t1 = gc * complex_gamma(s) * rgamma(c - a) * rgamma(c - b) * series(a, b, 1.0 - s, w);
    const cplx t2 = gc * complex_gamma(-s) * rgamma(a) * rgamma(b) * std::exp(s * std::log(w)) * series(c - a, c - b, s + 1.0, w);
    return t1 + t2;
}

cplx hyp2f1_d1(cplx a, cplx b, cplx c, double z) { return a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z); }

cplx hyp2f1_d2(cplx a, cplx b, cplx c, double z) {
    return a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * hyp2f1(a + 2.0, b + 2.0, c + 2.0, z);
}

}  // namespace blowup
