#pragma once

#include <array>
#include <vector>

namespace blowup {

// Hyperbolic angles of the boost, one per space direction.
using Rapidity = std::vector<double>;

struct BoostCoeffs {
    std::vector<double> A;  // A[0] time coefficient, A[1..d] space coefficients
    int d() const { return static_cast<int>(A.size()) - 1; }
};

BoostCoeffs boost_coeffs(const Rapidity& alpha);

// Rapidity with a single nonzero entry alpha at the 1-based index axis.
Rapidity axis_rapidity(int d, int axis, double alpha);

// A_0 - sum_j |A_j| > 0 keeps the profile denominator positive on the closed ball.
bool admissible(const Rapidity& alpha);
double admissibility_margin(const Rapidity& alpha);

struct Event {
    double t;
    std::vector<double> x;
};

// Composite boost about the event (T, 0); direction 1 is applied first.
Event apply_boost(const Event& e, double T, const Rapidity& alpha);

// sqrt(2) / (A_0 (T - t) - A_j x^j)
double blowup_solution(double t, const std::vector<double>& x, double T, const Rapidity& alpha);

struct SimilarityFrame {
    double T = 1.0;
    int d = 5;
};

struct SimilarityPoint {
    double tau;
    std::vector<double> xi;
};

SimilarityPoint similarity_map(double t, const std::vector<double>& x, const SimilarityFrame& frame);
Event inverse_similarity_map(double tau, const std::vector<double>& xi, const SimilarityFrame& frame);

// (psi_alpha(xi), xi.grad psi_alpha + psi_alpha), closed form.
std::array<double, 2> static_profile_pair(const std::vector<double>& xi, const Rapidity& alpha);
std::vector<double> static_profile_gradient(const std::vector<double>& xi, const Rapidity& alpha);

// Single-axis boost in terms of z = xi^axis only. Profiles, alpha-derivatives,
// the growing mode and the potential, all rational in z.
struct AxisProfile {
    double alpha;
    double c, s;  // cosh alpha, sinh alpha
    explicit AxisProfile(double alpha_);
    double denom(double z) const;
    double psi1(double z) const;
    double psi2(double z) const;
    // psi1 - sqrt2 and psi2 - sqrt2, accurate for small alpha
    double deviation1(double z) const;
    double deviation2(double z) const;
    double dpsi1_dalpha(double z) const;
    double dpsi2_dalpha(double z) const;
    double grow1(double z) const;  // first slot of the lambda = 1 eigenfunction
    double grow2(double z) const;
    double potential(double z) const;
};

}  // namespace blowup
