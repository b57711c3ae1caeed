#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "blowup/grid.hpp"

namespace blowup {

// All operators act on axisymmetric fields; a rapidity is a single hyperbolic angle along
// the grid's boost axis.

// (psi_alpha, xi.grad psi_alpha + psi_alpha) sampled from the closed form
FieldPair static_profile(const GridPtr& g, double alpha);
// static_profile minus the constant profile, without cancellation
FieldPair profile_deviation(const GridPtr& g, double alpha);
// d/d alpha of the static profile (lambda = 0 eigenfunction along the axis)
FieldPair profile_velocity(const GridPtr& g, double alpha);
// the lambda = 1 eigenfunction (A_0 D^{-2}, 2 A_0^2 D^{-3}) along the axis
FieldPair growing_mode(const GridPtr& g, double alpha);
// 6 / (A_0 - A_axis z)^2
ScalarField potential_field(const GridPtr& g, double alpha);

FieldPair apply_free(const FieldPair& u, ResolutionWarning* warn = nullptr);
FieldPair apply_linearized(const FieldPair& u, double alpha, ResolutionWarning* warn = nullptr);
// (0, 3 psi_alpha u1^2 + u1^3)
FieldPair apply_nonlinear(const FieldPair& u, double alpha);

enum class Generator { Free, Linearized };

struct GeneratorMatrix {
    Eigen::MatrixXd M;  // acts on stack(u)
    GridSpec spec;
    double alpha = 0.0;
    Generator which = Generator::Linearized;
};

GeneratorMatrix assemble_generator(const GridPtr& g, double alpha, Generator which);

// Radial block of the linearized operator at alpha = 0 restricted to harmonic degree l,
// acting on [v1(rho_i); v2(rho_i)].
Eigen::MatrixXd sector_matrix(const GridPtr& g, int l);

struct SpectrumEntry {
    std::complex<double> lambda;
    int sector = -1;       // dominant harmonic degree
    bool converged = false;
    double drift = 0.0;    // distance to the nearest eigenvalue after refinement
};

struct SpectrumOptions {
    int nr = 64;
    int lmax = 4;
    double alpha = 0.0;
    double converge_tol = 1e-4;
    double refine_factor = 1.5;
    int d = 5;
    int axis = 5;
};

// Coupled axisymmetric spectrum with harmonic truncation N_theta = lmax + 1 and refinement filter.
std::vector<SpectrumEntry> discrete_spectrum(const SpectrumOptions& opt);
// Per-sector spectrum at alpha = 0 with the same refinement filter.
std::vector<SpectrumEntry> sector_spectrum(const SpectrumOptions& opt, int l);

// Left eigenvectors for eigenvalues 1 and 0 of M, normalized against the right
// eigenvectors: ell1 . grow = 1, ell0 . velocity = 1.
struct LeftModes {
    Eigen::VectorXd ell1;
    Eigen::VectorXd ell0;
    double alpha = 0.0;
};
LeftModes left_modes(const GeneratorMatrix& gm, const FieldPair& grow, const FieldPair& velocity);

struct LinearFit {
    double rate = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
    int samples = 0;
};

// Least-squares fit of log(values) against tau over [lo, hi]; NonConvergedFit if fewer than
// min_samples points or if the largest residual exceeds max_residual.
LinearFit fit_log_linear(const std::vector<double>& tau, const std::vector<double>& values, double lo, double hi,
                         double max_residual = 0.1, int min_samples = 20);

struct DecayProbe {
    LinearFit fit;
    std::vector<double> tau;
    std::vector<double> norm;
};

// Integrate u' = M u with classical RK4 and fit the exponential rate of the energy norm.
// If modes is given, the lambda = 1 and lambda = 0 directions are removed from the data.
DecayProbe semigroup_decay_probe(const GeneratorMatrix& gm, const GridPtr& g, const FieldPair& data,
                                 const LeftModes* modes, const FieldPair* grow, const FieldPair* velocity,
                                 double tau_max, double dt, double fit_lo, double fit_hi);

}  // namespace blowup
