#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/operators.hpp"

namespace blowup {

// Perturbations (f, g) of the constant profile, closed form on all of R^d.
// radial:   eps exp(-|xi|^2 / w^2)
// axis_odd: eps xi^axis exp(-|xi|^2 / w^2)
// mixed:    the sum of both
enum class Shape { None, Radial, AxisOdd, Mixed };
Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);

struct Perturbation {
    Shape shape = Shape::None;
    double amplitude = 0.0;
    double width = 0.5;
    bool first = true;    // perturb psi1
    bool second = false;  // perturb psi2
    // value at xi given by its axial coordinate z and squared radius q
    double value(double z, double q) const;
};

struct EvolutionConfig {
    GridSpec grid{5, 48, 12, 5};
    Perturbation perturbation;
    double T = 1.0;
    double T_window = 0.25;   // admissible blowup times (1 - w, 1 + w)
    double cfl = 0.5;
    double dt_max = 1e-2;
    double tau_max = 10.0;
    double record_every = 0.05;
    double guard = 50.0 * std::sqrt(2.0);
    bool modulate = true;
    double alpha_max = 0.5;         // Newton must stay inside |alpha| < alpha_max
    double mode_refresh = 1e-2;     // recompute left modes when alpha moves this far
    double newton_tol = 1e-13;
    // shooting
    double T_lo = 0.98;
    double T_hi = 1.02;
    double bracket_tol = 1e-6;      // required width of the returned bracket
    double shoot_tol = 1e-11;       // width at which the root search stops
    double tau_class = 10.0;        // classification time of the lambda = 1 amplitude
    double p_exit = 0.1;            // stop a classification run once |p| exceeds this
    int probe_points = 5;           // monotonicity scan across the initial bracket
    // fits
    double fit_lo = 2.0;
    double fit_hi = 8.0;
    bool keep_states = false;       // keep psi1 at every record (needed for envelopes)
    int jobs = 1;
};

// Delta tau = min(cfl * smallest radial node * angular spacing, dt_max)
double time_step(const Grid& g, double cfl, double dt_max);

// Psi(0) = Psi_0 + U(T, v) with w^T(xi) = (T w1(T xi), T^2 w2(T xi)); DomainError outside the
// admissible window of blowup times.
FieldPair prepare_initial_data(const GridPtr& g, const Perturbation& v, double T, double T_window);
// the perturbation itself sampled at T = 1
FieldPair sample_perturbation(const GridPtr& g, const Perturbation& v);

// Right-hand side of the similarity system written for the deviation W = Psi - Psi_0 from the
// constant profile: W' = L~ W + (0, 6 w1 + 3 sqrt2 w1^2 + w1^3).
FieldPair deviation_rhs(const FieldPair& w);
// one classical RK4 step of the deviation; BlowupDetected if max |Psi| exceeds the guard
void rk4_step(FieldPair& w, double dt, double guard, double tau_after);
// the same step on the full state
FieldPair step(const FieldPair& psi, double dt, double guard = 50.0 * std::sqrt(2.0));

struct ModulationState {
    double alpha = 0.0;
    FieldPair phi;      // Psi - Psi_alpha
    double p = 0.0;     // lambda = 1 amplitude
    double q = 0.0;     // normalized constraint value, zero after the solve
    int iterations = 0;
};

// Solves (Pi (Psi - Psi_alpha) | h)_E = 0 for alpha along the grid axis, where ( | )_E is the
// energy inner product, h the profile velocity and Pi = I - g ell1 removes the growing mode
// through its numerically computed left eigenvector. Unlike the exact left null vector, this
// functional is not conserved by the linear flow, so alpha relaxes as Phi decays. The modes
// are taken at a cached alpha, refreshed when the solution moves further than the refresh
// distance; Newton uses the derivative at the cached alpha.
class Modulator {
public:
    Modulator(GridPtr g, double alpha_max = 0.5, double refresh = 1e-2, double tol = 1e-13);
    ModulationState extract(const FieldPair& psi, double alpha_prev);
    // same from the deviation w = Psi - Psi_0, which keeps small Phi free of cancellation
    ModulationState extract_deviation(const FieldPair& w, double alpha_prev);
    double cached_alpha() const { return modes_alpha_; }
    int refreshes() const { return refreshes_; }

private:
    void refresh(double alpha);
    double constraint(const FieldPair& u) const;  // (Pi u | h)_E
    GridPtr g_;
    double alpha_max_, refresh_, tol_;
    double modes_alpha_ = 0.0;
    int refreshes_ = 0;
    Eigen::VectorXd ell1_, grow_;
    FieldPair velocity_;
    double slope_ = 1.0;  // (Pi h | h)_E at the cached alpha
    bool ready_ = false;
};

struct TraceRecord {
    double tau = 0.0;
    double phi_norm = 0.0;       // energy norm of Phi
    double seminorm[4] = {0, 0, 0, 0};  // homogeneous H^k seminorms of the first slot of Phi
    double alpha = 0.0;
    double p = 0.0;
    double q = 0.0;
};

struct EvolutionTrace {
    double T = 1.0;
    double dt = 0.0;
    std::vector<TraceRecord> rows;
    std::vector<Nodal> first_slot;  // psi1 - sqrt2 at every record when keep_states is set
    bool blowup = false;
    double blowup_tau = 0.0;
    bool stopped_early = false;     // classification exit on |p| > p_exit
    int mode_refreshes = 0;
    FieldPair final_deviation;      // Psi - Psi_0 at the last completed step
};

struct EvolveOptions {
    double tau_max = 10.0;
    double p_exit = 0.0;            // 0 disables the early exit
    bool catch_blowup = true;       // record blowup in the trace instead of throwing
};

EvolutionTrace evolve(const EvolutionConfig& cfg, double T, const EvolveOptions& opt);

// Fit of log ||Phi|| and of log |alpha - alpha_inf| over the window; alpha_inf is the tail value.
// A fit that does not converge is left empty with the reason recorded.
struct DecayFit {
    std::optional<LinearFit> phi;
    std::string phi_error;
    std::optional<LinearFit> alpha;  // also empty when alpha moves less than 1e-10 over the window
    std::string alpha_error;
    double alpha_inf = 0.0;
};
DecayFit fit_decay_rate(const EvolutionTrace& trace, double lo, double hi, double max_residual = 0.5);

struct ShootSample {
    double T = 0.0;
    double amplitude = 0.0;  // p e^{-tau} at the classification or exit time
    double tau = 0.0;
    bool blowup = false;
};

struct ShootResult {
    double T_star = 0.0;
    double lo = 0.0, hi = 0.0;  // final bracket
    int evaluations = 0;
    std::vector<ShootSample> samples;
    std::vector<ShootSample> probe;  // monotonicity scan across the initial bracket
    int probe_flips = 0;
};

// Lambda = 1 amplitude classification of one blowup time.
ShootSample classify_blowup_time(const EvolutionConfig& cfg, double T);
// Bracketing root search on the classified amplitude; BracketError if both ends agree.
ShootResult shoot_blowup_time(const EvolutionConfig& cfg);

// (T - t)^{k - d/2 + 1} ||u - u_{T, alpha}||_{H^k} = ||psi1 - psi_alpha||_{H^k} in the frame,
// compared with factor * delta (T - t)^{1/2} = factor * delta sqrt(T) e^{-tau/2}.
struct EnvelopeRow {
    double tau = 0.0;
    double scaled[4] = {0, 0, 0, 0};
    double bound = 0.0;
};
struct EnvelopeCheck {
    std::vector<EnvelopeRow> rows;
    double delta = 0.0;
    double worst_ratio = 0.0;  // max scaled / bound over the window and k
};
EnvelopeCheck envelope_check(const EvolutionTrace& trace, const GridPtr& g, double alpha_inf, double delta,
                             double lo, double hi, double factor = 2.0);

// u(t, 0) = psi1(tau, 0) / (T - t) against sqrt2 / (1 - t) at the requested times.
struct OdeCheckRow {
    double t = 0.0;
    double u = 0.0;
    double exact = 0.0;
    double rel_error = 0.0;
};
std::vector<OdeCheckRow> ode_blowup_check(const GridSpec& spec, double T, const std::vector<double>& times,
                                          double cfl = 0.5, double dt_max = 1e-2);

}  // namespace blowup
