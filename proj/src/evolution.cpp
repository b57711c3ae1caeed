#include "blowup/evolution.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "blowup/energy.hpp"
#include "blowup/geometry.hpp"
#include "blowup/jets.hpp"

namespace blowup {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Shape parse_shape(const std::string& name) {
    if (name == "none") return Shape::None;
    if (name == "radial") return Shape::Radial;
    if (name == "axis_odd") return Shape::AxisOdd;
    if (name == "mixed") return Shape::Mixed;
    throw ConfigError("unknown perturbation shape '" + name + "' (none, radial, axis_odd, mixed)");
}

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::None: return "none";
        case Shape::Radial: return "radial";
        case Shape::AxisOdd: return "axis_odd";
        case Shape::Mixed: return "mixed";
    }
    return "none";
}

double Perturbation::value(double z, double q) const {
    const double bump = amplitude * std::exp(-q / (width * width));
    switch (shape) {
        case Shape::None: return 0.0;
        case Shape::Radial: return bump;
        case Shape::AxisOdd: return z * bump;
        case Shape::Mixed: return (1.0 + z) * bump;
    }
    return 0.0;
}

double time_step(const Grid& g, double cfl, double dt_max) {
    if (!(cfl > 0.0) || !(dt_max > 0.0)) throw ConfigError("time step parameters must be positive");
    return std::min(cfl * g.step_scale(), dt_max);
}

namespace {

void check_window(double T, double window) {
    if (!(T > 1.0 - window && T < 1.0 + window))
        throw DomainError("blowup time outside the admissible window around 1");
}

// U(T, v) + Psi_0^T - Psi_0 written directly as the deviation from Psi_0
FieldPair initial_deviation(const GridPtr& g, const Perturbation& v, double T) {
    auto slot = [&](bool on, double power) {
        const double base = (std::pow(T, power) - 1.0) * kSqrt2;
        return sample_axial(g, [&, on, power, base](double z, double r) {
            const double zt = T * z, qt = T * T * (z * z + r * r);
            return base + (on ? std::pow(T, power) * v.value(zt, qt) : 0.0);
        });
    };
    return {slot(v.first, 1.0), slot(v.second, 2.0)};
}

FieldPair constant_profile(const GridPtr& g) { return {constant_field(g, kSqrt2), constant_field(g, kSqrt2)}; }

double max_state(const FieldPair& w) {
    const double a = (w.first.values().array() + kSqrt2).abs().maxCoeff();
    const double b = (w.second.values().array() + kSqrt2).abs().maxCoeff();
    return std::max(a, b);
}

}  // namespace

FieldPair prepare_initial_data(const GridPtr& g, const Perturbation& v, double T, double T_window) {
    check_window(T, T_window);
    return constant_profile(g) + initial_deviation(g, v, T);
}

FieldPair sample_perturbation(const GridPtr& g, const Perturbation& v) {
    const ScalarField f = sample_axial(g, [&](double z, double r) { return v.value(z, z * z + r * r); });
    const ScalarField zero = constant_field(g, 0.0);
    return {v.first ? f : zero, v.second ? f : zero};
}

FieldPair deviation_rhs(const FieldPair& w) {
    FieldPair out = apply_free(w);
    const auto a = w.first.values().array();
    out.second.values().array() += a * (6.0 + a * (3.0 * kSqrt2 + a));
    return out;
}

void rk4_step(FieldPair& w, double dt, double guard, double tau_after) {
    const FieldPair k1 = deviation_rhs(w);
    const FieldPair k2 = deviation_rhs(w + (0.5 * dt) * k1);
    const FieldPair k3 = deviation_rhs(w + (0.5 * dt) * k2);
    const FieldPair k4 = deviation_rhs(w + dt * k3);
    w = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double m = max_state(w);
    if (!std::isfinite(m) || m > guard) throw BlowupDetected("state left the perturbative regime", tau_after);
}

FieldPair step(const FieldPair& psi, double dt, double guard) {
    const GridPtr& g = psi.first.grid();
    FieldPair w = psi - constant_profile(g);
    rk4_step(w, dt, guard, dt);
    return constant_profile(g) + w;
}

// ---------------------------------------------------------------- modulation

Modulator::Modulator(GridPtr g, double alpha_max, double refresh, double tol)
    : g_(std::move(g)), alpha_max_(alpha_max), refresh_(refresh), tol_(tol) {}

void Modulator::refresh(double alpha) {
    const GeneratorMatrix gm = assemble_generator(g_, alpha, Generator::Linearized);
    const FieldPair grow = growing_mode(g_, alpha);
    velocity_ = profile_velocity(g_, alpha);
    ell1_ = left_modes(gm, grow, velocity_).ell1;
    grow_ = stack(grow);
    modes_alpha_ = alpha;
    ready_ = true;
    slope_ = constraint(velocity_);
    if (!(std::abs(slope_) > 0.0)) throw ModulationDiverged("profile velocity has no energy");
    ++refreshes_;
}

double Modulator::constraint(const FieldPair& u) const {
    const Eigen::VectorXd x = stack(u);
    return inner_full(unstack(g_, x - ell1_.dot(x) * grow_), velocity_);
}

ModulationState Modulator::extract(const FieldPair& psi, double alpha_prev) {
    return extract_deviation(psi - constant_profile(g_), alpha_prev);
}

ModulationState Modulator::extract_deviation(const FieldPair& w, double alpha_prev) {
    if (!ready_ || std::abs(alpha_prev - modes_alpha_) > refresh_) refresh(alpha_prev);
    ModulationState st;
    double alpha = alpha_prev;
    for (int round = 0; round < 3; ++round) {
        bool converged = false;
        double previous = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 60 && !converged; ++it) {
            const double F = constraint(w - profile_deviation(g_, alpha));
            if (!std::isfinite(F)) throw ModulationDiverged("modulation equation is not finite");
            const double delta = std::clamp(F / slope_, -0.1, 0.1);
            alpha += delta;
            ++st.iterations;
            if (!(std::abs(alpha) < alpha_max_)) throw ModulationDiverged("rapidity left the admissible ball");
            // done at the tolerance, or once the iteration stalls at the roundoff floor of the form
            converged = std::abs(delta) <= tol_ * (1.0 + std::abs(alpha)) ||
                        (std::abs(delta) <= 1e-9 && std::abs(delta) > 0.5 * previous);
            previous = std::abs(delta);
        }
        if (!converged) throw ModulationDiverged("iteration for the rapidity did not settle");
        if (std::abs(alpha - modes_alpha_) <= refresh_) break;
        refresh(alpha);
    }
    st.alpha = alpha;
    st.phi = w - profile_deviation(g_, alpha);
    st.p = ell1_.dot(stack(st.phi));
    st.q = constraint(st.phi) / slope_;
    return st;
}

// ---------------------------------------------------------------- evolution

EvolutionTrace evolve(const EvolutionConfig& cfg, double T, const EvolveOptions& opt) {
    check_window(T, cfg.T_window);
    const GridPtr g = make_grid(cfg.grid);
    EvolutionTrace tr;
    tr.T = T;
    const double dt0 = time_step(*g, cfg.cfl, cfg.dt_max);
    const int per_record = std::max(1, static_cast<int>(std::ceil(cfg.record_every / dt0 - 1e-9)));
    const double dt = cfg.record_every / per_record;
    tr.dt = dt;
    const int records = static_cast<int>(std::lround(opt.tau_max / cfg.record_every));

    FieldPair w = initial_deviation(g, cfg.perturbation, T);
    Modulator mod(g, cfg.alpha_max, cfg.mode_refresh, cfg.newton_tol);
    double alpha = 0.0;

    auto record = [&](double tau) {
        TraceRecord r;
        r.tau = tau;
        FieldPair phi = w;
        if (cfg.modulate) {
            const ModulationState st = mod.extract_deviation(w, alpha);
            alpha = st.alpha;
            phi = st.phi;
            r.alpha = st.alpha;
            r.p = st.p;
            r.q = st.q;
        }
        r.phi_norm = energy_norm(phi);
        for (int k = 0; k < 4; ++k) r.seminorm[k] = sobolev_seminorm(phi.first, k);
        tr.rows.push_back(r);
        if (cfg.keep_states) tr.first_slot.push_back(w.first.values());
        return r;
    };

    try {
        TraceRecord last = record(0.0);
        for (int rec = 1; rec <= records; ++rec) {
            if (opt.p_exit > 0.0 && std::abs(last.p) > opt.p_exit) {
                tr.stopped_early = true;
                break;
            }
            for (int s = 0; s < per_record; ++s) rk4_step(w, dt, cfg.guard, ((rec - 1) * per_record + s + 1) * dt);
            last = record(rec * cfg.record_every);
        }
    } catch (const BlowupDetected& e) {
        if (!opt.catch_blowup) throw;
        tr.blowup = true;
        tr.blowup_tau = e.tau;
    } catch (const ModulationDiverged&) {
        if (!opt.catch_blowup) throw;
        tr.blowup = true;
        tr.blowup_tau = tr.rows.empty() ? 0.0 : tr.rows.back().tau;
    }
    tr.mode_refreshes = mod.refreshes();
    tr.final_deviation = w;
    return tr;
}

DecayFit fit_decay_rate(const EvolutionTrace& trace, double lo, double hi, double max_residual) {
    std::vector<double> tau, phi, dalpha;
    for (const auto& r : trace.rows) {
        tau.push_back(r.tau);
        phi.push_back(r.phi_norm);
    }
    DecayFit out;
    try {
        out.phi = fit_log_linear(tau, phi, lo, hi, max_residual);
    } catch (const NonConvergedFit& e) {
        out.phi_error = e.what();
    }
    if (trace.rows.empty()) return out;
    out.alpha_inf = trace.rows.back().alpha;
    bool moves = false;
    for (const auto& r : trace.rows) {
        dalpha.push_back(std::abs(r.alpha - out.alpha_inf));
        if (r.tau >= lo && r.tau <= hi && dalpha.back() > 1e-10) moves = true;
    }
    if (!moves) {
        out.alpha_error = "alpha does not move over the fit window";
        return out;
    }
    try {
        out.alpha = fit_log_linear(tau, dalpha, lo, hi, max_residual);
    } catch (const NonConvergedFit& e) {
        out.alpha_error = e.what();
    }
    return out;
}

// ---------------------------------------------------------------- shooting

ShootSample classify_blowup_time(const EvolutionConfig& cfg, double T) {
    EvolutionConfig c = cfg;
    c.keep_states = false;
    EvolveOptions opt;
    opt.tau_max = cfg.tau_class;
    opt.p_exit = cfg.p_exit;
    const EvolutionTrace tr = evolve(c, T, opt);
    ShootSample s;
    s.T = T;
    if (tr.blowup) {
        // only the growing direction leaves the regime; its sign is the sign of the last amplitude
        s.blowup = true;
        s.tau = tr.blowup_tau;
        const double p = tr.rows.empty() ? 1.0 : tr.rows.back().p;
        s.amplitude = std::copysign(std::max(cfg.p_exit, std::abs(p)), p) * std::exp(-s.tau);
        return s;
    }
    s.tau = tr.rows.back().tau;
    s.amplitude = tr.rows.back().p * std::exp(-s.tau);
    return s;
}

namespace {
std::vector<ShootSample> classify_many(const EvolutionConfig& cfg, const std::vector<double>& Ts) {
    std::vector<ShootSample> out(Ts.size());
    const size_t jobs = static_cast<size_t>(std::max(1, cfg.jobs));
    for (size_t start = 0; start < Ts.size(); start += jobs) {
        std::vector<std::future<ShootSample>> fut;
        for (size_t k = start; k < std::min(Ts.size(), start + jobs); ++k)
            fut.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, classify_blowup_time,
                                     std::cref(cfg), Ts[k]));
        for (size_t k = 0; k < fut.size(); ++k) out[start + k] = fut[k].get();
    }
    return out;
}
}  // namespace

ShootResult shoot_blowup_time(const EvolutionConfig& cfg) {
    if (!(cfg.T_lo < cfg.T_hi)) throw ConfigError("shooting bracket must satisfy T_lo < T_hi");
    check_window(cfg.T_lo, cfg.T_window);
    check_window(cfg.T_hi, cfg.T_window);
    ShootResult res;
    std::vector<double> Ts{cfg.T_lo};
    for (int k = 1; k <= cfg.probe_points; ++k)
        Ts.push_back(cfg.T_lo + (cfg.T_hi - cfg.T_lo) * k / (cfg.probe_points + 1));
    Ts.push_back(cfg.T_hi);
    res.probe = classify_many(cfg, Ts);
    res.evaluations = static_cast<int>(Ts.size());
    const auto& ends = res.probe;
    if ((ends.front().amplitude > 0) == (ends.back().amplitude > 0))
        throw BracketError("both ends of the blowup-time bracket classify identically");
    size_t pick = 0;
    for (size_t k = 0; k + 1 < ends.size(); ++k)
        if ((ends[k].amplitude > 0) != (ends[k + 1].amplitude > 0)) {
            if (res.probe_flips == 0) pick = k;
            ++res.probe_flips;
        }
    double a = ends[pick].T, b = ends[pick + 1].T;
    double fa = ends[pick].amplitude, fb = ends[pick + 1].amplitude;
    if (fa == 0.0 || fb == 0.0) {
        res.T_star = fa == 0.0 ? a : b;
        res.lo = res.hi = res.T_star;
        return res;
    }
    auto f = [&](double T) {
        const ShootSample s = classify_blowup_time(cfg, T);
        res.samples.push_back(s);
        ++res.evaluations;
        return s.amplitude;
    };
    const double width = std::min(cfg.shoot_tol, cfg.bracket_tol);
    auto tol = [width](double x, double y) { return std::abs(y - x) <= width; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    res.lo = r.first;
    res.hi = r.second;
    res.T_star = 0.5 * (r.first + r.second);
    if (res.hi - res.lo > cfg.bracket_tol) throw ConvergenceError("blowup-time bracket did not shrink to tolerance");
    return res;
}

// ---------------------------------------------------------------- diagnostics

EnvelopeCheck envelope_check(const EvolutionTrace& trace, const GridPtr& g, double alpha_inf, double delta,
                             double lo, double hi, double factor) {
    if (trace.first_slot.size() != trace.rows.size()) throw ConfigError("envelope check needs stored states");
    EnvelopeCheck out;
    out.delta = delta;
    const ScalarField target = profile_deviation(g, alpha_inf).first;
    for (size_t i = 0; i < trace.rows.size(); ++i) {
        const double tau = trace.rows[i].tau;
        if (tau < lo - 1e-12 || tau > hi + 1e-12) continue;
        EnvelopeRow row;
        row.tau = tau;
        row.bound = factor * delta * std::sqrt(trace.T) * std::exp(-0.5 * tau);
        const ScalarField diff = ScalarField(g, trace.first_slot[i]) - target;
        for (int k = 0; k < 4; ++k) {
            row.scaled[k] = sobolev_seminorm(diff, k);
            out.worst_ratio = std::max(out.worst_ratio, row.scaled[k] / row.bound);
        }
        out.rows.push_back(row);
    }
    return out;
}

std::vector<OdeCheckRow> ode_blowup_check(const GridSpec& spec, double T, const std::vector<double>& times,
                                          double cfl, double dt_max) {
    const GridPtr g = make_grid(spec);
    FieldPair w = initial_deviation(g, Perturbation{}, T);
    const double dt0 = time_step(*g, cfl, dt_max);
    double tau = 0.0;
    std::vector<OdeCheckRow> out;
    for (double t : times) {
        if (!(t >= 0.0 && t < T)) throw DomainError("check time outside [0, T)");
        const double target = std::log(T / (T - t));
        if (target < tau) throw ConfigError("check times must be increasing");
        const int n = static_cast<int>(std::ceil((target - tau) / dt0 - 1e-12));
        const double dt = n > 0 ? (target - tau) / n : 0.0;
        for (int s = 0; s < n; ++s) rk4_step(w, dt, std::numeric_limits<double>::infinity(), tau + (s + 1) * dt);
        tau = target;
        OdeCheckRow r;
        r.t = t;
        r.u = (kSqrt2 + evaluate(w.first, 0.0, 1.0)) / (T - t);
        r.exact = kSqrt2 / (1.0 - t);
        r.rel_error = std::abs(r.u - r.exact) / std::abs(r.exact);
        out.push_back(r);
    }
    return out;
}

}  // namespace blowup
