#include "blowup/geometry.hpp"

#include <cmath>
#include <string>

#include "blowup/errors.hpp"

namespace blowup {

namespace {
const double kSqrt2 = std::sqrt(2.0);

double dot_tail(const std::vector<double>& A, const std::vector<double>& x) {
    double s = 0.0;
    for (size_t j = 0; j < x.size(); ++j) s += A[j + 1] * x[j];
    return s;
}

void check_dims(const std::vector<double>& x, const Rapidity& alpha) {
    if (x.size() != alpha.size())
        throw DomainError("dimension mismatch between point and rapidity");
}
}  // namespace

BoostCoeffs boost_coeffs(const Rapidity& alpha) {
    const int d = static_cast<int>(alpha.size());
    BoostCoeffs out;
    out.A.assign(d + 1, 0.0);
    // tail[j] = prod_{i > j} cosh alpha^i
    std::vector<double> tail(d + 1, 1.0);
    for (int j = d - 1; j >= 0; --j) tail[j] = tail[j + 1] * std::cosh(alpha[j]);
    out.A[0] = tail[0];
    for (int j = 0; j < d; ++j) out.A[j + 1] = tail[j + 1] * std::sinh(alpha[j]);
    return out;
}

Rapidity axis_rapidity(int d, int axis, double alpha) {
    if (axis < 1 || axis > d) throw DomainError("axis index out of range");
    Rapidity a(d, 0.0);
    a[axis - 1] = alpha;
    return a;
}

double admissibility_margin(const Rapidity& alpha) {
    const auto B = boost_coeffs(alpha);
    double m = B.A[0];
    for (int j = 1; j <= B.d(); ++j) m -= std::abs(B.A[j]);
    return m;
}

bool admissible(const Rapidity& alpha) {
    for (double a : alpha)
        if (!std::isfinite(a)) return false;
    return admissibility_margin(alpha) > 0.0;
}

Event apply_boost(const Event& e, double T, const Rapidity& alpha) {
    check_dims(e.x, alpha);
    Event out = e;
    double s = out.t - T;
    for (size_t j = 0; j < alpha.size(); ++j) {
        const double ch = std::cosh(alpha[j]), sh = std::sinh(alpha[j]);
        const double sj = s * ch + out.x[j] * sh;
        out.x[j] = s * sh + out.x[j] * ch;
        s = sj;
    }
    out.t = s + T;
    return out;
}

double blowup_solution(double t, const std::vector<double>& x, double T, const Rapidity& alpha) {
    check_dims(x, alpha);
    const auto B = boost_coeffs(alpha);
    const double den = B.A[0] * (T - t) - dot_tail(B.A, x);
    if (!(den > 0.0)) throw DomainError("point outside the boosted cone of regularity");
    return kSqrt2 / den;
}

SimilarityPoint similarity_map(double t, const std::vector<double>& x, const SimilarityFrame& frame) {
    const double T = frame.T;
    if (!(t < T)) throw DomainError("t must be below the blowup time");
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double h = T - t;
    if (std::sqrt(r2) > h * (1.0 + 1e-14)) throw DomainError("point outside the backward light cone");
    SimilarityPoint p;
    p.tau = std::log(T / h);
    p.xi.resize(x.size());
    for (size_t j = 0; j < x.size(); ++j) p.xi[j] = x[j] / h;
    return p;
}

Event inverse_similarity_map(double tau, const std::vector<double>& xi, const SimilarityFrame& frame) {
    const double h = frame.T * std::exp(-tau);
    Event e;
    e.t = frame.T - h;
    e.x.resize(xi.size());
    for (size_t j = 0; j < xi.size(); ++j) e.x[j] = h * xi[j];
    return e;
}

std::array<double, 2> static_profile_pair(const std::vector<double>& xi, const Rapidity& alpha) {
    check_dims(xi, alpha);
    const auto B = boost_coeffs(alpha);
    const double den = B.A[0] - dot_tail(B.A, xi);
    if (!(den > 0.0)) throw DomainError("profile denominator vanishes");
    // xi.grad psi + psi = sqrt2 A_0 / den^2
    return {kSqrt2 / den, kSqrt2 * B.A[0] / (den * den)};
}

std::vector<double> static_profile_gradient(const std::vector<double>& xi, const Rapidity& alpha) {
    check_dims(xi, alpha);
    const auto B = boost_coeffs(alpha);
    const double den = B.A[0] - dot_tail(B.A, xi);
    if (!(den > 0.0)) throw DomainError("profile denominator vanishes");
    std::vector<double> g(xi.size());
    for (size_t j = 0; j < xi.size(); ++j) g[j] = kSqrt2 * B.A[j + 1] / (den * den);
    return g;
}

AxisProfile::AxisProfile(double alpha_) : alpha(alpha_), c(std::cosh(alpha_)), s(std::sinh(alpha_)) {
    if (!(c - std::abs(s) > 0.0)) throw DomainError("inadmissible rapidity");
}

double AxisProfile::denom(double z) const {
    const double D = c - s * z;
    if (!(D > 0.0)) throw DomainError("profile denominator vanishes");
    return D;
}

double AxisProfile::psi1(double z) const { return kSqrt2 / denom(z); }

double AxisProfile::psi2(double z) const {
    const double D = denom(z);
    return kSqrt2 * c / (D * D);
}

// psi_alpha - sqrt2 without cancellation: D = 1 + e with e = (cosh - 1) - sinh z
double AxisProfile::deviation1(double z) const {
    const double D = denom(z), e = 2.0 * std::pow(std::sinh(0.5 * alpha), 2) - s * z;
    return -kSqrt2 * e / D;
}

double AxisProfile::deviation2(double z) const {
    const double D = denom(z), cm1 = 2.0 * std::pow(std::sinh(0.5 * alpha), 2), e = cm1 - s * z;
    return kSqrt2 * (cm1 - 2.0 * e - e * e) / (D * D);
}

double AxisProfile::dpsi1_dalpha(double z) const {
    const double D = denom(z), Da = s - c * z;
    return -kSqrt2 * Da / (D * D);
}

double AxisProfile::dpsi2_dalpha(double z) const {
    const double D = denom(z), Da = s - c * z;
    return kSqrt2 * (s / (D * D) - 2.0 * c * Da / (D * D * D));
}

double AxisProfile::grow1(double z) const {
    const double D = denom(z);
    return c / (D * D);
}

double AxisProfile::grow2(double z) const {
    const double D = denom(z);
    return 2.0 * c * c / (D * D * D);
}

double AxisProfile::potential(double z) const {
    const double D = denom(z);
    return 6.0 / (D * D);
}

}  // namespace blowup
