// Acceptance runner: one PASS/FAIL line per criterion. "acceptance N" runs criterion N,
// no argument runs all of them.
#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "blowup/energy.hpp"
#include "blowup/evolution.hpp"
#include "blowup/operators.hpp"
#include "blowup/spectral.hpp"

using namespace blowup;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double sup(const FieldPair& u) { return std::max(u.first.max_abs(), u.second.max_abs()); }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
    return out;
}

// reciprocal-Gamma scan over -1 < Re <= 3, |Im| <= 5, l <= 8, step 0.02
void mode_stability(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    ModeScanOptions opt;
    const ModeScan s = mode_stability_scan(opt);
    const double t = seconds_since(t0);
    double flag_max = 0.0;
    for (const auto& p : s.flagged) flag_max = std::max(flag_max, p.modulus);
    o.detail << "flags " << s.flagged.size() << " exact " << s.flags_exact << ", max |s| at flags " << flag_max
             << ", min |s| away from flags per l:";
    for (double m : s.min_nonadjacent) o.detail << " " << m;
    o.detail << ", " << t << " s";
    o.require(s.flags_exact, "flag set");
    o.require(flag_max < 1e-8, "|s| < 1e-8 at flags");
    for (size_t l = 0; l < s.min_nonadjacent.size(); ++l)
        o.require(s.min_nonadjacent[l] > 1e-3, "|s| > 1e-3 away from flags at l = " + std::to_string(l));
    o.require(t < 60.0, "runtime");
}

void closed_forms(Outcome& o) {
    const ClosedFormCheck c = closed_form_check(6, 91);
    double w = 0.0;
    bool negative = true;
    for (int l = 0; l <= 6; ++l) {
        const WronskianCheck r = wronskian_check(l, linspace(0.1, 0.9, 81));
        w = std::max(w, r.max_rel_error);
        negative = negative && r.negative;
    }
    o.detail << "phi0 abs " << c.max_err_phi0 << ", phi1 rel " << c.max_err_phi1 << ", Wronskian rel " << w;
    o.require(c.max_err_phi0 <= 1e-10 && c.max_err_phi1 <= 1e-10, "closed forms");
    o.require(w <= 1e-8 && negative, "Wronskian");
}

void dissipativity(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr g = make_grid({5, 64, 8, 5});
    std::mt19937_64 rng(20240917);
    double worst[6] = {-1e300, -1e300, -1e300, -1e300, -1e300, -1e300};
    int rows = 0;
    for (int s = 0; s < 100; ++s)
        for (const auto& r : dissipativity_report(random_pair(5, rng), g, 1e-8)) {
            worst[r.component - 1] = std::max(worst[r.component - 1], r.margin / r.u_u);
            ++rows;
        }
    const double t = seconds_since(t0);
    o.detail << rows << " rows, largest relative margins";
    for (double w : worst) o.detail << " " << w;
    o.detail << ", " << t << " s";
    for (int c = 0; c < 6; ++c) o.require(worst[c] <= 1e-8, "form " + std::to_string(c + 1));
    o.require(rows == 600, "row count");
    o.require(t < 120.0, "runtime");
}

void zeta_identities(Outcome& o) {
    std::mt19937_64 rng(7);
    for (int d : {5, 7, 9, 11}) {
        double rel = 0.0, stokes = 0.0;
        for (int s = 0; s < 20; ++s) {
            const ZetaCheck z = verify_zeta_identity(random_pair(5, rng), d);
            rel = std::max(rel, z.relative);
            stokes = std::max(stokes, z.stokes);
        }
        o.detail << "d=" << d << ": " << rel << " / " << stokes << "  ";
        o.require(rel <= 1e-10, "identity in d = " + std::to_string(d));
        o.require(stokes <= 1e-10, "surface integral in d = " + std::to_string(d));
    }
}

void eigen_structure(Outcome& o) {
    // sup norm on a moderate grid: collocation roundoff grows like N^4 eps
    const GridPtr g = make_grid({5, 16, 12, 5});
    double wg = 0.0, wh = 0.0;
    for (double a : {0.0, 0.05, 0.1, 0.15}) {
        const FieldPair G = growing_mode(g, a), H = profile_velocity(g, a);
        wg = std::max(wg, sup(apply_linearized(G, a) - G));
        wh = std::max(wh, sup(apply_linearized(H, a)));
    }
    o.detail << "sup |(L - 1) g| " << wg << ", sup |L h| " << wh;
    o.require(wg <= 1e-9, "growing mode");
    o.require(wh <= 1e-9, "profile velocity");
}

void spectral_gap(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    for (double a : {0.0, 0.1}) {
        SpectrumOptions opt;
        opt.alpha = a;
        double off = 0.0;
        bool one = false, zero = false, sectors = true;
        int counted = 0;
        for (const auto& e : discrete_spectrum(opt)) {
            if (!e.converged || e.lambda.real() <= -0.5) continue;
            ++counted;
            const double d1 = std::abs(e.lambda - 1.0), d0 = std::abs(e.lambda);
            off = std::max(off, std::min(d0, d1));
            if (d1 <= 1e-6) {
                one = true;
                sectors = sectors && e.sector == 0;
            }
            if (d0 <= 1e-6) {
                zero = true;
                sectors = sectors && e.sector == 1;
            }
        }
        o.detail << "alpha " << a << ": " << counted << " eigenvalues right of -1/2, largest distance to {0,1} " << off
                 << "; ";
        o.require(off <= 1e-6, "gap at alpha = " + std::to_string(a));
        o.require(one && zero && sectors, "sector placement at alpha = " + std::to_string(a));
    }
    const double t = seconds_since(t0);
    o.detail << t << " s";
    o.require(t < 300.0, "runtime");
}

void semigroup_rates(Outcome& o) {
    const GridPtr g = make_grid({5, 16, 8, 5});
    const GeneratorMatrix m = assemble_generator(g, 0.0, Generator::Linearized);
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(m.M, false).eigenvalues().cwiseAbs().maxCoeff();
    const double dt = 2.5 / radius;
    const FieldPair G = growing_mode(g, 0.0), H = profile_velocity(g, 0.0);
    const LeftModes lm = left_modes(m, G, H);
    std::mt19937_64 rng(20240917);
    const FieldPair R = sample(g, random_pair(5, rng));
    const double rg = semigroup_decay_probe(m, g, G, nullptr, nullptr, nullptr, 10.0, dt, 1.0, 10.0).fit.rate;
    const double rh = semigroup_decay_probe(m, g, H, nullptr, nullptr, nullptr, 10.0, dt, 1.0, 10.0).fit.rate;
    const double rr = semigroup_decay_probe(m, g, R, &lm, &G, &H, 10.0, dt, 2.0, 10.0).fit.rate;
    o.detail << "growing " << rg << ", velocity " << rh << ", deflated random " << rr;
    o.require(std::abs(rg - 1.0) <= 1e-3, "growing rate");
    o.require(std::abs(rh) <= 1e-3, "velocity rate");
    o.require(rr <= -0.6, "deflated rate");
}

void multiplicity(Outcome& o) {
    const MultiplicityCheck m = multiplicity_ode_check(linspace(0.05, 0.95, 91), 0.0);
    o.detail << "residual " << m.max_residual << ", homogeneous " << m.homogeneous_residual << ", Wronskian "
             << m.wronskian_error;
    o.require(m.max_residual <= 1e-8, "particular solution");
    o.require(m.homogeneous_residual <= 1e-12, "homogeneous pair");
    o.require(m.wronskian_error <= 1e-12, "Wronskian");
}

struct ShootReport {
    ShootResult shot;
    DecayFit fit;
    EnvelopeCheck env;
    double seconds = 0.0;
};

ShootReport shoot(Shape shape) {
    const auto t0 = std::chrono::steady_clock::now();
    EvolutionConfig c;
    c.perturbation.shape = shape;
    c.perturbation.amplitude = 1e-3;
    ShootReport r;
    r.shot = shoot_blowup_time(c);
    c.keep_states = true;
    EvolveOptions opt;
    opt.tau_max = c.tau_max;
    const EvolutionTrace tr = evolve(c, r.shot.T_star, opt);
    r.fit = fit_decay_rate(tr, 2.0, 8.0);
    const GridPtr g = make_grid(c.grid);
    const double delta = sobolev_pair_norm(sample_perturbation(g, c.perturbation));
    r.env = envelope_check(tr, g, r.fit.alpha_inf, delta, 2.0, 8.0, 2.0);
    r.seconds = seconds_since(t0);
    return r;
}

void shooting_and_decay(Outcome& o) {
    const ShootReport rad = shoot(Shape::Radial);
    const double rate = rad.fit.phi ? rad.fit.phi->rate : NAN;
    o.detail << "radial: T* " << rad.shot.T_star << " bracket " << rad.shot.hi - rad.shot.lo << ", ||Phi|| rate " << rate
             << ", envelope ratio " << rad.env.worst_ratio << ", " << rad.seconds << " s; ";
    o.require(rad.shot.hi - rad.shot.lo <= 1e-6, "radial bracket");
    o.require(rate <= -0.45, "radial decay rate");
    o.require(rad.env.worst_ratio <= 1.0, "radial envelope");
    o.require(rad.seconds < 900.0, "radial runtime");

    const ShootReport odd = shoot(Shape::AxisOdd);
    const double arate = odd.fit.alpha ? odd.fit.alpha->rate : NAN;
    o.detail << "axis-odd: T* " << odd.shot.T_star << " bracket " << odd.shot.hi - odd.shot.lo
             << ", |alpha - alpha_inf| rate " << arate << ", alpha_inf " << odd.fit.alpha_inf << ", envelope ratio "
             << odd.env.worst_ratio << ", " << odd.seconds << " s";
    o.require(odd.shot.hi - odd.shot.lo <= 1e-6, "axis-odd bracket");
    o.require(arate <= -0.45, "rapidity rate");
    o.require(std::isfinite(odd.fit.alpha_inf) && std::abs(odd.fit.alpha_inf) <= 0.05, "limiting rapidity");
    o.require(odd.env.worst_ratio <= 1.0, "axis-odd envelope");
    o.require(odd.seconds < 900.0, "axis-odd runtime");
}

void ode_blowup(Outcome& o) {
    double worst = 0.0;
    for (const auto& r : ode_blowup_check({5, 16, 4, 5}, 1.0, {0.1, 0.3, 0.5, 0.7, 0.8, 0.9}))
        worst = std::max(worst, r.rel_error);
    o.detail << "largest relative error up to t = 0.9: " << worst;
    o.require(worst <= 1e-6, "ODE blowup");
}

struct Criterion {
    const char* title;
    std::function<void(Outcome&)> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"mode stability scan", mode_stability},
        {"closed forms and Wronskian", closed_forms},
        {"dissipativity", dissipativity},
        {"surface identities", zeta_identities},
        {"eigen-structure", eigen_structure},
        {"spectral gap", spectral_gap},
        {"semigroup rates", semigroup_rates},
        {"multiplicity ODE", multiplicity},
        {"shooting and decay", shooting_and_decay},
        {"ODE blowup", ode_blowup},
    };
    std::vector<int> which;
    if (argc > 1) {
        for (int k = 1; k < argc; ++k) which.push_back(std::atoi(argv[k]));
    } else {
        for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) which.push_back(k);
    }
    int failures = 0;
    for (int n : which) {
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::printf("FAIL criterion %d: no such criterion\n", n);
            ++failures;
            continue;
        }
        Outcome o;
        try {
            criteria[n - 1].check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [error: " << e.what() << "]";
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, criteria[n - 1].title,
                    o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
