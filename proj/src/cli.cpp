#include "blowup/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "blowup/energy.hpp"
#include "blowup/operators.hpp"
#include "blowup/polynomial.hpp"
#include "blowup/spectral.hpp"

namespace blowup {

namespace fs = std::filesystem;

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- assertions, manifest

Assertion check_at_most(const std::string& name, double measured, double threshold) {
    return {name, measured <= threshold, measured, threshold, "<="};
}
Assertion check_below(const std::string& name, double measured, double threshold) {
    return {name, measured < threshold, measured, threshold, "<"};
}
Assertion check_above(const std::string& name, double measured, double threshold) {
    return {name, measured > threshold, measured, threshold, ">"};
}
Assertion check_true(const std::string& name, bool ok) { return {name, ok, ok ? 1.0 : 0.0, 1.0, "=="}; }

bool RunManifest::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

int exit_code(const RunManifest& m) { return m.passed() ? 0 : 1; }

// ---------------------------------------------------------------- CSV

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& kind, const std::vector<std::string>& columns)
    : path_(path), width_(columns.size()), out_(path, std::ios::binary) {
    if (!out_) throw IOError("cannot write '" + path + "'");
    out_ << "# blowup-lab " << kind << " v1\n";
    for (size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw IOError("row width mismatch in '" + path_ + "'");
    for (size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << "\n";
    if (!out_) throw IOError("write failed on '" + path_ + "'");
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    row(cells);
}

std::vector<double> CsvTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("no column '" + name + "' in " + kind + " table");
    const size_t k = static_cast<size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(std::stod(r.at(k)));
    return out;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot read '" + path + "'");
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    if (!std::getline(in, line) || line.rfind("# blowup-lab ", 0) != 0) throw IOError("'" + path + "' has no version header");
    {
        std::istringstream ss(line.substr(13));
        std::string v;
        ss >> t.kind >> v;
        if (v.size() < 2 || v[0] != 'v') throw IOError("'" + path + "' has a malformed version header");
        t.version = std::stoi(v.substr(1));
    }
    if (!std::getline(in, line)) throw IOError("'" + path + "' has no column header");
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto r = split(line);
        if (r.size() != t.columns.size()) throw IOError("ragged row in '" + path + "'");
        t.rows.push_back(std::move(r));
    }
    return t;
}

// ---------------------------------------------------------------- helpers

namespace {

struct Output {
    fs::path dir;
    RunManifest* m;
    CsvWriter open(const std::string& name, const std::string& kind, const std::vector<std::string>& cols) {
        m->artifacts.push_back(name);
        return CsvWriter((dir / name).string(), kind, cols);
    }
};

std::string num(double x) { return format_number(x); }
std::string num(int x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "1" : "0"; }

GridSpec grid_spec(const Config& cfg) {
    GridSpec s;
    s.d = static_cast<int>(cfg.get_int("d"));
    s.nr = static_cast<int>(cfg.get_int("nr"));
    s.nt = static_cast<int>(cfg.get_int("nt"));
    s.axis = s.d;
    return s;
}

void require_positive(const Config& cfg, const std::vector<std::string>& keys) {
    for (const auto& k : keys)
        if (!(cfg.get_real(k) > 0)) throw ConfigError("'" + k + "' must be positive");
}

void require_five(const Config& cfg) {
    if (cfg.get_int("d") != 5) throw ConfigError("'d' must be 5 for this subcommand");
}

double max_abs_pair(const FieldPair& u) { return std::max(u.first.max_abs(), u.second.max_abs()); }

// ---------------------------------------------------------------- dissipativity

void run_dissipativity(const Config& cfg, const RunContext& ctx, Output& out) {
    require_five(cfg);
    const int samples = static_cast<int>(cfg.get_int("samples"));
    const int degree = static_cast<int>(cfg.get_int("degree"));
    const double tol = cfg.get_real("tol");
    if (samples < 1 || degree < 0) throw ConfigError("'samples' must be positive and 'degree' non-negative");
    const GridPtr g = make_grid(grid_spec(cfg));
    std::mt19937_64 rng(ctx.seed);
    std::vector<AxisPolyPair> pairs;
    for (int s = 0; s < samples; ++s) pairs.push_back(random_pair(degree, rng));
    const auto reports = parallel_map(samples, ctx.jobs, [&](int s) { return dissipativity_report(pairs[s], g, tol); });

    auto csv = out.open("margins.csv", "dissipativity", {"sample", "component", "lu_u", "u_u", "margin", "pass"});
    double worst[6] = {-1e300, -1e300, -1e300, -1e300, -1e300, -1e300};
    int failures = 0, rows = 0;
    for (int s = 0; s < samples; ++s)
        for (const auto& r : reports[s]) {
            csv.row({num(s), num(r.component), num(r.lu_u), num(r.u_u), num(r.margin), flag(r.pass)});
            ++rows;
            if (!r.pass) ++failures;
            const double rel = r.u_u > 0 ? r.margin / r.u_u : r.margin;
            worst[r.component - 1] = std::max(worst[r.component - 1], rel);
        }
    for (int c = 1; c <= 6; ++c) {
        const std::string name = c <= 5 ? "form " + std::to_string(c) : "full form";
        out.m->assertions.push_back(check_at_most(name + ": largest relative margin", worst[c - 1], tol));
    }
    out.m->assertions.push_back(check_true("every row non-positive within tolerance", failures == 0));
    out.m->summary.emplace_back("rows", rows);
    out.m->summary.emplace_back("failures", failures);

    // surface identity in several dimensions on exact polynomials
    const std::vector<double> dims = cfg.get_list("zeta_dims");
    const double ztol = cfg.get_real("zeta_tol");
    auto zcsv = out.open("zeta.csv", "zeta", {"d", "sample", "residual", "scale", "relative", "stokes"});
    double zworst = 0.0, sworst = 0.0;
    std::mt19937_64 zrng(ctx.seed + 1);
    for (double dd : dims) {
        const int d = static_cast<int>(dd);
        if (d != dd || d < 5 || d % 2 == 0) throw ConfigError("'zeta_dims' must hold odd dimensions >= 5");
        for (int s = 0; s < 10; ++s) {
            const AxisPolyPair u = random_pair(degree, zrng);
            const ZetaCheck z = verify_zeta_identity(u, d);
            zcsv.row({num(d), num(s), num(z.residual), num(z.scale), num(z.relative), num(z.stokes)});
            zworst = std::max(zworst, z.relative);
            sworst = std::max(sworst, z.stokes);
        }
    }
    out.m->assertions.push_back(check_at_most("surface identity relative residual", zworst, ztol));
    out.m->assertions.push_back(check_at_most("surface integral of the correction (Stokes)", sworst, ztol));
}

// ---------------------------------------------------------------- mode scan

void run_mode_scan(const Config& cfg, const RunContext& ctx, Output& out) {
    ModeScanOptions o;
    o.re_lo = static_cast<int>(cfg.get_int("re_lo"));
    o.re_hi = static_cast<int>(cfg.get_int("re_hi"));
    o.im_hi = static_cast<int>(cfg.get_int("im_hi"));
    o.step = cfg.get_real("step");
    o.lmax = static_cast<int>(cfg.get_int("lmax"));
    o.flag_tol = cfg.get_real("flag_tol");
    o.separation = cfg.get_real("separation");
    o.heat_stride = static_cast<int>(cfg.get_int("heat_stride"));
    o.jobs = ctx.jobs;
    if (o.re_hi < o.re_lo || o.im_hi < 0 || o.lmax < 0 || o.heat_stride < 1 || !(o.step > 0))
        throw ConfigError("empty or malformed scan grid");
    const ModeScan s = mode_stability_scan(o);

    auto fcsv = out.open("flagged.csv", "mode-flags", {"re", "im", "l", "modulus"});
    double flag_max = 0.0;
    for (const auto& p : s.flagged) {
        fcsv.row({num(p.re), num(p.im), num(p.l), num(p.modulus)});
        flag_max = std::max(flag_max, p.modulus);
    }
    auto scsv = out.open("separation.csv", "mode-separation", {"l", "min_nonadjacent", "pass"});
    for (size_t l = 0; l < s.min_nonadjacent.size(); ++l) {
        scsv.row({num(static_cast<int>(l)), num(s.min_nonadjacent[l]), flag(s.min_nonadjacent[l] > o.separation)});
    }
    auto hcsv = out.open("plot_scan.csv", "scan-heatmap", {"re", "im", "l", "modulus"});
    for (const auto& p : s.heat) hcsv.row({num(p.re), num(p.im), num(p.l), num(p.modulus)});

    out.m->assertions.push_back(check_true("flagged set is exactly {(1, 0), (0, 1)}", s.flags_exact));
    if (!s.flagged.empty())
        out.m->assertions.push_back(check_below("largest indicator at flags", flag_max, o.flag_tol));
    for (size_t l = 0; l < s.min_nonadjacent.size(); ++l)
        out.m->assertions.push_back(check_above("l = " + std::to_string(l) + ": smallest indicator away from flags",
                                                s.min_nonadjacent[l], o.separation));
    out.m->summary.emplace_back("points", static_cast<double>(s.points));
    out.m->summary.emplace_back("flagged", static_cast<double>(s.flagged.size()));
    for (const auto& p : s.flagged)
        out.m->notes.emplace_back("flag", "lambda = " + num(p.re) + (p.im == 0 ? "" : " + " + num(p.im) + "i") +
                                              ", l = " + num(p.l));
}

// ---------------------------------------------------------------- spectrum

void run_spectrum(const Config& cfg, const RunContext& ctx, Output& out) {
    require_five(cfg);
    SpectrumOptions base;
    base.d = 5;
    base.nr = static_cast<int>(cfg.get_int("nr"));
    base.lmax = static_cast<int>(cfg.get_int("lmax"));
    base.axis = static_cast<int>(cfg.get_int("axis"));
    base.converge_tol = cfg.get_real("converge_tol");
    base.refine_factor = cfg.get_real("refine_factor");
    if (base.axis < 1 || base.axis > 5) throw ConfigError("'axis' must lie in 1..d");
    if (!(base.refine_factor > 1.0)) throw ConfigError("'refine_factor' must exceed 1");
    const double floor = cfg.get_real("re_floor"), gap = cfg.get_real("gap_tol");
    const std::vector<double> alphas = cfg.get_list("alphas");

    const auto spectra = parallel_map(static_cast<int>(alphas.size()), ctx.jobs, [&](int k) {
        SpectrumOptions o = base;
        o.alpha = alphas[k];
        return discrete_spectrum(o);
    });

    auto csv = out.open("spectrum.csv", "spectrum", {"alpha", "re", "im", "sector", "converged", "drift"});
    auto plot = out.open("plot_spectrum.csv", "spectrum-scatter", {"re", "im", "l", "converged"});
    double off = 0.0;
    bool one_ok = true, zero_ok = true;
    for (size_t k = 0; k < alphas.size(); ++k) {
        bool seen_one = false, seen_zero = false;
        for (const auto& e : spectra[k]) {
            csv.row({num(alphas[k]), num(e.lambda.real()), num(e.lambda.imag()), num(e.sector), flag(e.converged),
                     num(e.drift)});
            plot.row({num(e.lambda.real()), num(e.lambda.imag()), num(e.sector), flag(e.converged)});
            if (!e.converged || e.lambda.real() <= floor) continue;
            const double d1 = std::abs(e.lambda - 1.0), d0 = std::abs(e.lambda);
            off = std::max(off, std::min(d0, d1));
            if (d1 <= gap) {
                seen_one = true;
                one_ok = one_ok && e.sector == 0;
            }
            if (d0 <= gap) {
                seen_zero = true;
                zero_ok = zero_ok && e.sector == 1;
            }
        }
        one_ok = one_ok && seen_one;
        zero_ok = zero_ok && seen_zero;
    }
    out.m->assertions.push_back(check_at_most("converged eigenvalues right of the floor: distance to {0, 1}", off, gap));
    out.m->assertions.push_back(check_true("eigenvalue 1 present and only in sector 0", one_ok));
    out.m->assertions.push_back(check_true("eigenvalue 0 present and only in sector 1", zero_ok));

    // symmetry eigenfunctions against the collocated operator
    const GridPtr ge = make_grid({5, static_cast<int>(cfg.get_int("eigen_nr")), static_cast<int>(cfg.get_int("eigen_nt")),
                                  base.axis});
    const double etol = cfg.get_real("eigen_tol");
    auto ecsv = out.open("eigen_residuals.csv", "eigen-residuals", {"alpha", "growing", "velocity"});
    double wg = 0.0, wh = 0.0;
    for (double a : cfg.get_list("eigen_alphas")) {
        const FieldPair G = growing_mode(ge, a), H = profile_velocity(ge, a);
        const double rg = max_abs_pair(apply_linearized(G, a) - G);
        const double rh = max_abs_pair(apply_linearized(H, a));
        ecsv.row({num(a), num(rg), num(rh)});
        wg = std::max(wg, rg);
        wh = std::max(wh, rh);
    }
    out.m->assertions.push_back(check_at_most("sup |(L - 1) g|", wg, etol));
    out.m->assertions.push_back(check_at_most("sup |L h|", wh, etol));

    // linear flow rates at alpha = 0
    const GridPtr gp = make_grid({5, static_cast<int>(cfg.get_int("probe_nr")), static_cast<int>(cfg.get_int("probe_nt")),
                                  base.axis});
    const double tau = cfg.get_real("probe_tau"), rate_tol = cfg.get_real("rate_tol");
    if (!(tau > 2.5)) throw ConfigError("'probe_tau' must exceed 2.5");
    const GeneratorMatrix gm = assemble_generator(gp, 0.0, Generator::Linearized);
    const double radius = Eigen::EigenSolver<Eigen::MatrixXd>(gm.M, false).eigenvalues().cwiseAbs().maxCoeff();
    const double dt = cfg.get_real("probe_step") / radius;
    const FieldPair G = growing_mode(gp, 0.0), H = profile_velocity(gp, 0.0);
    const LeftModes modes = left_modes(gm, G, H);
    std::mt19937_64 rng(ctx.seed);
    const FieldPair R = sample(gp, random_pair(5, rng));
    struct Probe {
        std::string name;
        const FieldPair* data;
        bool deflate;
        double lo;
    };
    const std::vector<Probe> probes = {{"growing", &G, false, 1.0}, {"velocity", &H, false, 1.0},
                                       {"deflated_random", &R, true, 2.0}};
    auto pcsv = out.open("semigroup.csv", "semigroup", {"probe", "tau", "energy_norm"});
    double rates[3];
    for (size_t k = 0; k < probes.size(); ++k) {
        const auto& p = probes[k];
        DecayProbe d;
        try {
            d = semigroup_decay_probe(gm, gp, *p.data, p.deflate ? &modes : nullptr, &G, &H, tau, dt, p.lo, tau);
            rates[k] = d.fit.rate;
        } catch (const NonConvergedFit& e) {
            rates[k] = kNaN;
            out.m->notes.emplace_back(p.name, e.what());
        }
        for (size_t i = 0; i < d.tau.size(); ++i) pcsv.row({p.name, num(d.tau[i]), num(d.norm[i])});
    }
    out.m->assertions.push_back(check_at_most("|rate of the growing mode - 1|", std::abs(rates[0] - 1.0), rate_tol));
    out.m->assertions.push_back(check_at_most("|rate of the profile velocity|", std::abs(rates[1]), rate_tol));
    out.m->assertions.push_back(check_at_most("rate of deflated random data", rates[2], cfg.get_real("deflated_rate_max")));
    out.m->summary.emplace_back("growing_rate", rates[0]);
    out.m->summary.emplace_back("velocity_rate", rates[1]);
    out.m->summary.emplace_back("deflated_rate", rates[2]);
    out.m->summary.emplace_back("probe_dt", dt);
}

// ---------------------------------------------------------------- wronskian

void run_wronskian(const Config& cfg, const RunContext&, Output& out) {
    const int lmax = static_cast<int>(cfg.get_int("lmax"));
    const int samples = static_cast<int>(cfg.get_int("samples"));
    const double lo = cfg.get_real("rho_lo"), hi = cfg.get_real("rho_hi");
    if (lmax < 0 || samples < 2 || !(0 < lo && lo < hi && hi < 1)) throw ConfigError("need lmax >= 0, samples >= 2, 0 < rho_lo < rho_hi < 1");
    const ClosedFormCheck cf = closed_form_check(lmax, samples);
    const double ctol = cfg.get_real("closed_tol");
    out.m->assertions.push_back(check_at_most("closed form phi0 against the series (absolute)", cf.max_err_phi0, ctol));
    out.m->assertions.push_back(check_at_most("closed form phi1 against the series (relative)", cf.max_err_phi1, ctol));

    std::vector<double> rhos;
    for (int k = 0; k < samples; ++k) rhos.push_back(lo + (hi - lo) * k / (samples - 1));
    auto wcsv = out.open("wronskian.csv", "wronskian", {"l", "max_rel_error", "negative"});
    double wworst = 0.0;
    bool negative = true;
    for (int l = 0; l <= lmax; ++l) {
        const WronskianCheck w = wronskian_check(l, rhos);
        wcsv.row({num(l), num(w.max_rel_error), flag(w.negative)});
        wworst = std::max(wworst, w.max_rel_error);
        negative = negative && w.negative;
    }
    out.m->assertions.push_back(check_at_most("relative Wronskian error", wworst, cfg.get_real("wronskian_tol")));
    out.m->assertions.push_back(check_true("Wronskian is negative", negative));

    std::vector<double> zs;
    for (int k = 0; k < samples; ++k) zs.push_back(0.05 + 0.9 * k / (samples - 1));
    const std::vector<cplx> lambdas = {1.0, 0.0, cplx(0.3, 1.2), cplx(-0.5, -2.0), cplx(2.0, 3.0)};
    auto hcsv = out.open("hyp_residuals.csv", "hyp-residuals", {"re", "im", "l", "w0", "w1"});
    double hworst = 0.0;
    for (const cplx lam : lambdas)
        for (int l = 0; l <= lmax; ++l) {
            const HypResidual r = hyp_ode_residual(SpectralParams(lam, l), zs);
            hcsv.row({num(lam.real()), num(lam.imag()), num(l), num(r.w0), r.w1_defined ? num(r.w1) : "nan"});
            hworst = std::max(hworst, r.w0);
            if (r.w1_defined) hworst = std::max(hworst, r.w1);
        }
    out.m->assertions.push_back(check_at_most("hypergeometric equation residual", hworst, cfg.get_real("hyp_tol")));
    std::vector<double> zz;
    for (int k = 0; k <= 20; ++k) zz.push_back(0.05 + 0.85 * k / 20);
    out.m->summary.emplace_back("finite_difference_residual", hyp_ode_residual_fd(1.25, 1.75, 2.5, zz));
}

// ---------------------------------------------------------------- ode-check

void run_ode_check(const Config& cfg, const RunContext&, Output& out) {
    const double lo = cfg.get_real("rho_lo"), hi = cfg.get_real("rho_hi");
    const int samples = static_cast<int>(cfg.get_int("samples"));
    if (samples < 2 || !(0 < lo && lo < hi && hi < 1)) throw ConfigError("need samples >= 2, 0 < rho_lo < rho_hi < 1");
    std::vector<double> rhos;
    for (int k = 0; k < samples; ++k) rhos.push_back(lo + (hi - lo) * k / (samples - 1));
    const double c0 = cfg.get_real("c0");
    const MultiplicityCheck m = multiplicity_ode_check(rhos, c0);
    auto csv = out.open("multiplicity.csv", "multiplicity", {"rho", "u", "du", "d2u"});
    for (double r : rhos)
        csv.row({num(r), num(multiplicity_solution(r, c0, 0)), num(multiplicity_solution(r, c0, 1)),
                 num(multiplicity_solution(r, c0, 2))});
    auto pcsv = out.open("multiplicity_growth.csv", "multiplicity-growth", {"rho", "d2u", "log_slope"});
    for (size_t k = 0; k < m.probe_rho.size(); ++k) pcsv.row({num(m.probe_rho[k]), num(m.probe_u2[k]), num(m.log_slope[k])});
    const double ptol = cfg.get_real("pair_tol");
    out.m->assertions.push_back(check_at_most("particular solution residual", m.max_residual, cfg.get_real("residual_tol")));
    out.m->assertions.push_back(check_at_most("homogeneous pair residual", m.homogeneous_residual, ptol));
    out.m->assertions.push_back(check_at_most("relative Wronskian error", m.wronskian_error, ptol));
    out.m->assertions.push_back(check_true("|u''| grows towards rho = 1", m.second_derivative_monotone));

    const GridSpec spec{5, static_cast<int>(cfg.get_int("nr")), static_cast<int>(cfg.get_int("nt")), 5};
    const std::vector<double> times = cfg.get_list("blowup_times");
    auto bcsv = out.open("ode_blowup.csv", "ode-blowup", {"T", "t", "u", "exact", "rel_error"});
    double worst = 0.0;
    for (double T : cfg.get_list("blowup_T")) {
        for (const auto& r : ode_blowup_check(spec, T, times)) {
            bcsv.row({num(T), num(r.t), num(r.u), num(r.exact), num(r.rel_error)});
            worst = std::max(worst, r.rel_error);
        }
    }
    out.m->assertions.push_back(check_at_most("u(t, 0) against sqrt2 / (1 - t), relative", worst, cfg.get_real("blowup_tol")));
}

// ---------------------------------------------------------------- evolve, shoot

void write_trace(Output& out, const EvolutionTrace& tr) {
    auto csv = out.open("trace.csv", "trace", {"tau", "phi_norm", "h0", "h1", "h2", "h3", "alpha", "p", "q"});
    for (const auto& r : tr.rows)
        csv.row(std::vector<double>{r.tau, r.phi_norm, r.seminorm[0], r.seminorm[1], r.seminorm[2], r.seminorm[3], r.alpha,
                                    r.p, r.q});
    auto plot = out.open("plot_decay.csv", "decay", {"tau", "log_phi_norm"});
    for (const auto& r : tr.rows) plot.row(std::vector<double>{r.tau, std::log(r.phi_norm)});
}

void record_fit(RunManifest& m, const DecayFit& f) {
    if (f.phi) {
        m.summary.emplace_back("phi_rate", f.phi->rate);
        m.summary.emplace_back("phi_fit_residual", f.phi->max_residual);
    } else {
        m.notes.emplace_back("phi_fit", f.phi_error);
    }
    m.summary.emplace_back("alpha_inf", f.alpha_inf);
    if (f.alpha) {
        m.summary.emplace_back("alpha_rate", f.alpha->rate);
        m.summary.emplace_back("alpha_fit_residual", f.alpha->max_residual);
    } else {
        m.notes.emplace_back("alpha_fit", f.alpha_error);
    }
}

double max_q(const EvolutionTrace& tr) {
    double q = 0.0;
    for (const auto& r : tr.rows) q = std::max(q, std::abs(r.q));
    return q;
}

void run_evolve(const Config& cfg, const RunContext& ctx, Output& out) {
    const EvolutionConfig ec = evolution_config(cfg, ctx.jobs);
    EvolveOptions opt;
    opt.tau_max = ec.tau_max;
    const EvolutionTrace tr = evolve(ec, ec.T, opt);
    write_trace(out, tr);
    out.m->summary.emplace_back("dt", tr.dt);
    out.m->summary.emplace_back("blowup", tr.blowup ? 1.0 : 0.0);
    if (tr.blowup) out.m->summary.emplace_back("blowup_tau", tr.blowup_tau);
    out.m->summary.emplace_back("mode_refreshes", tr.mode_refreshes);
    if (ec.modulate) out.m->assertions.push_back(check_at_most("largest |q| after modulation", max_q(tr), cfg.get_real("q_tol")));
    if (ec.perturbation.shape == Shape::None || ec.perturbation.amplitude == 0.0) {
        double worst = 0.0;
        for (const auto& r : tr.rows) worst = std::max(worst, r.phi_norm);
        out.m->assertions.push_back(check_at_most("largest ||Phi|| for unperturbed data", worst, cfg.get_real("phi_tol")));
    } else if (!tr.blowup) {
        const DecayFit f = fit_decay_rate(tr, ec.fit_lo, ec.fit_hi, cfg.get_real("fit_residual"));
        record_fit(*out.m, f);
    }
    if (cfg.get_flag("snapshot")) {
        const GridPtr g = make_grid(ec.grid);
        const FieldPair psi = static_profile(g, 0.0) + tr.final_deviation;
        const double tau = tr.rows.empty() ? 0.0 : tr.rows.back().tau;
        write_snapshot_binary((out.dir / "final_state.bin").string(), psi, tau);
        out.m->artifacts.push_back("final_state.bin");
    }
}

bool resolve_check(const std::string& mode, bool automatic, const std::string& key) {
    if (mode == "auto") return automatic;
    if (mode == "yes") return true;
    if (mode == "no") return false;
    throw ConfigError("'" + key + "' must be auto, yes or no");
}

void run_shoot(const Config& cfg, const RunContext& ctx, Output& out) {
    EvolutionConfig ec = evolution_config(cfg, ctx.jobs);
    if (ec.perturbation.shape == Shape::None) throw ConfigError("shooting needs a perturbation shape");
    const bool phi_check = resolve_check(cfg.get_text("check_phi_rate"),
                                         ec.perturbation.shape == Shape::Radial, "check_phi_rate");
    const bool alpha_check = resolve_check(cfg.get_text("check_alpha_rate"), ec.perturbation.shape != Shape::Radial,
                                           "check_alpha_rate");
    const ShootResult sr = shoot_blowup_time(ec);
    auto scsv = out.open("shoot.csv", "shoot", {"phase", "T", "amplitude", "tau", "blowup"});
    for (const auto& s : sr.probe) scsv.row({"probe", num(s.T), num(s.amplitude), num(s.tau), flag(s.blowup)});
    for (const auto& s : sr.samples) scsv.row({"search", num(s.T), num(s.amplitude), num(s.tau), flag(s.blowup)});
    out.m->summary.emplace_back("T_star", sr.T_star);
    out.m->summary.emplace_back("bracket_lo", sr.lo);
    out.m->summary.emplace_back("bracket_hi", sr.hi);
    out.m->summary.emplace_back("evaluations", sr.evaluations);
    out.m->summary.emplace_back("probe_flips", sr.probe_flips);
    out.m->assertions.push_back(check_at_most("bracket width", sr.hi - sr.lo, ec.bracket_tol));

    ec.keep_states = true;
    EvolveOptions opt;
    opt.tau_max = ec.tau_max;
    const EvolutionTrace tr = evolve(ec, sr.T_star, opt);
    write_trace(out, tr);
    out.m->assertions.push_back(check_true("no blowup at the shot time", !tr.blowup));
    out.m->assertions.push_back(check_at_most("largest |q| after modulation", max_q(tr), cfg.get_real("q_tol")));
    const DecayFit f = fit_decay_rate(tr, ec.fit_lo, ec.fit_hi, cfg.get_real("fit_residual"));
    record_fit(*out.m, f);
    const double rate_max = cfg.get_real("rate_max");
    if (phi_check) out.m->assertions.push_back(check_at_most("rate of ||Phi||", f.phi ? f.phi->rate : kNaN, rate_max));
    if (alpha_check)
        out.m->assertions.push_back(check_at_most("rate of |alpha - alpha_inf|", f.alpha ? f.alpha->rate : kNaN, rate_max));
    out.m->assertions.push_back(check_at_most("|alpha_inf|", std::abs(f.alpha_inf), cfg.get_real("alpha_inf_max")));

    const GridPtr g = make_grid(ec.grid);
    const double delta = sobolev_pair_norm(sample_perturbation(g, ec.perturbation));
    const EnvelopeCheck env = envelope_check(tr, g, f.alpha_inf, delta, ec.fit_lo, ec.fit_hi, cfg.get_real("envelope_factor"));
    auto ecsv = out.open("envelope.csv", "envelope", {"tau", "k0", "k1", "k2", "k3", "bound"});
    for (const auto& r : env.rows)
        ecsv.row(std::vector<double>{r.tau, r.scaled[0], r.scaled[1], r.scaled[2], r.scaled[3], r.bound});
    out.m->summary.emplace_back("delta", delta);
    out.m->summary.emplace_back("envelope_worst_ratio", env.worst_ratio);
    out.m->assertions.push_back(check_at_most("envelope ratio, k = 0..3", env.worst_ratio, 1.0));
}

// ---------------------------------------------------------------- fit-rate

void run_fit_rate(const Config& cfg, const RunContext& ctx, Output& out) {
    fs::path path = cfg.get_text("trace");
    if (path.is_relative() && !ctx.config_path.empty() && !fs::exists(path))
        path = fs::path(ctx.config_path).parent_path() / path;
    const CsvTable t = read_csv(path.string());
    if (t.kind != "trace" || t.version != 1) throw ConfigError("'" + path.string() + "' is not a v1 trace");
    const std::string column = cfg.get_text("column");
    const std::vector<double> tau = t.column("tau");
    std::vector<double> values;
    if (column == "alpha_deviation") {
        const std::vector<double> a = t.column("alpha");
        if (a.empty()) throw ConfigError("empty trace");
        for (double x : a) values.push_back(std::abs(x - a.back()));
    } else {
        for (double x : t.column(column)) values.push_back(std::abs(x));
    }
    const double lo = cfg.get_real("fit_lo"), hi = cfg.get_real("fit_hi");
    auto csv = out.open("fit.csv", "fit", {"tau", "log_value", "fitted"});
    double rate = kNaN;
    try {
        const LinearFit f = fit_log_linear(tau, values, lo, hi, cfg.get_real("fit_residual"));
        rate = f.rate;
        out.m->summary.emplace_back("rate", f.rate);
        out.m->summary.emplace_back("intercept", f.intercept);
        out.m->summary.emplace_back("max_residual", f.max_residual);
        out.m->summary.emplace_back("samples", f.samples);
        for (size_t k = 0; k < tau.size(); ++k)
            if (tau[k] >= lo - 1e-12 && tau[k] <= hi + 1e-12)
                csv.row(std::vector<double>{tau[k], std::log(values[k]), f.intercept + f.rate * tau[k]});
    } catch (const NonConvergedFit& e) {
        out.m->notes.emplace_back("fit", e.what());
    }
    out.m->assertions.push_back(check_at_most("rate of " + column, rate, cfg.get_real("rate_max")));
}

// ---------------------------------------------------------------- norm equivalence

void run_norm_equivalence(const Config& cfg, const RunContext& ctx, Output& out) {
    require_five(cfg);
    const int samples = static_cast<int>(cfg.get_int("samples"));
    if (samples < 1) throw ConfigError("'samples' must be positive");
    const GridPtr g = make_grid(grid_spec(cfg));
    const NormEquivalence n = norm_equivalence_sample(samples, static_cast<int>(cfg.get_int("degree")), ctx.seed, g);
    auto csv = out.open("norm_ratios.csv", "norm-ratios", {"sample", "energy_over_sobolev"});
    for (size_t k = 0; k < n.ratios.size(); ++k) csv.row({num(static_cast<int>(k)), num(n.ratios[k])});
    out.m->summary.emplace_back("min_ratio", n.min_ratio);
    out.m->summary.emplace_back("max_ratio", n.max_ratio);
    out.m->assertions.push_back(check_above("smallest ratio", n.min_ratio, 0.0));
    out.m->assertions.push_back(check_at_most("ratio spread", n.max_ratio / n.min_ratio, cfg.get_real("max_spread")));
}

// ---------------------------------------------------------------- manifest

void write_manifest(const fs::path& dir, const RunManifest& m) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["format"] = "blowup-lab manifest v1";
    j["subcommand"] = m.subcommand;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["jobs"] = m.jobs;
    j["config_path"] = m.config_path;
    ordered_json c = ordered_json::object();
    for (const auto& [k, v] : m.config) c[k] = v;
    j["config"] = c;
    j["wall_time_s"] = m.wall_time;
    j["passed"] = m.passed();
    ordered_json a = ordered_json::array();
    for (const auto& x : m.assertions) {
        ordered_json e;
        e["name"] = x.name;
        e["pass"] = x.pass;
        e["measured"] = std::isfinite(x.measured) ? ordered_json(x.measured) : ordered_json(format_number(x.measured));
        e["relation"] = x.relation;
        e["threshold"] = x.threshold;
        a.push_back(e);
    }
    j["assertions"] = a;
    j["artifacts"] = m.artifacts;
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : m.summary) s[k] = std::isfinite(v) ? ordered_json(v) : ordered_json(format_number(v));
    j["summary"] = s;
    ordered_json n = ordered_json::array();
    for (const auto& [k, v] : m.notes) n.push_back({{"key", k}, {"text", v}});
    j["notes"] = n;
    std::ofstream f(dir / "manifest.json");
    if (!f) throw IOError("cannot write manifest in '" + dir.string() + "'");
    f << j.dump(2) << "\n";
}

}  // namespace

EvolutionConfig evolution_config(const Config& cfg, int jobs) {
    EvolutionConfig e;
    e.grid = grid_spec(cfg);
    if (e.grid.d != 5) throw ConfigError("the evolution is implemented for d = 5");
    e.grid.axis = static_cast<int>(cfg.get_int("axis"));
    if (e.grid.axis < 1 || e.grid.axis > e.grid.d) throw ConfigError("'axis' must lie in 1..d");
    if (e.grid.nr < 4 || e.grid.nt < 2) throw ConfigError("grid too small");
    e.perturbation.shape = parse_shape(cfg.get_text("shape"));
    e.perturbation.amplitude = cfg.get_real("amplitude");
    e.perturbation.width = cfg.get_real("width");
    e.perturbation.first = cfg.get_flag("perturb_first");
    e.perturbation.second = cfg.get_flag("perturb_second");
    e.T = cfg.get_real("T");
    e.T_window = cfg.get_real("T_window");
    e.cfl = cfg.get_real("cfl");
    e.dt_max = cfg.get_real("dt_max");
    e.tau_max = cfg.get_real("tau_max");
    e.record_every = cfg.get_real("record_every");
    e.guard = cfg.get_real("guard");
    e.modulate = cfg.get_flag("modulate");
    e.alpha_max = cfg.get_real("alpha_max");
    e.mode_refresh = cfg.get_real("mode_refresh");
    e.fit_lo = cfg.get_real("fit_lo");
    e.fit_hi = cfg.get_real("fit_hi");
    require_positive(cfg, {"width", "T", "T_window", "cfl", "dt_max", "tau_max", "record_every", "guard", "alpha_max",
                           "mode_refresh"});
    if (!(e.fit_lo < e.fit_hi)) throw ConfigError("'fit_lo' must be below 'fit_hi'");
    const auto& keys = cfg.schema();
    auto has = [&](const char* k) {
        return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.key == k; });
    };
    if (has("T_lo")) {
        e.T_lo = cfg.get_real("T_lo");
        e.T_hi = cfg.get_real("T_hi");
        e.bracket_tol = cfg.get_real("bracket_tol");
        e.shoot_tol = cfg.get_real("shoot_tol");
        e.tau_class = cfg.get_real("tau_class");
        e.p_exit = cfg.get_real("p_exit");
        e.probe_points = static_cast<int>(cfg.get_int("probe_points"));
        if (!(e.T_lo < e.T_hi)) throw ConfigError("'T_lo' must be below 'T_hi'");
        if (e.probe_points < 0) throw ConfigError("'probe_points' must be non-negative");
        require_positive(cfg, {"bracket_tol", "shoot_tol", "tau_class", "p_exit"});
    }
    e.jobs = std::max(1, jobs);
    return e;
}

RunManifest run(const std::string& subcommand, const Config& cfg, const RunContext& ctx) {
    const auto start = std::chrono::steady_clock::now();
    if (ctx.jobs < 1) throw ConfigError("--jobs must be positive");
    RunManifest m;
    m.subcommand = subcommand;
    m.version = BLOWUP_VERSION;
    m.config = cfg.echo();
    m.config_path = ctx.config_path;
    m.seed = ctx.seed;
    m.jobs = ctx.jobs;
    const fs::path dir = ctx.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IOError("cannot create output directory '" + dir.string() + "'");
    Output out{dir, &m};
    if (subcommand == "dissipativity") run_dissipativity(cfg, ctx, out);
    else if (subcommand == "mode-scan") run_mode_scan(cfg, ctx, out);
    else if (subcommand == "spectrum") run_spectrum(cfg, ctx, out);
    else if (subcommand == "wronskian") run_wronskian(cfg, ctx, out);
    else if (subcommand == "ode-check") run_ode_check(cfg, ctx, out);
    else if (subcommand == "evolve") run_evolve(cfg, ctx, out);
    else if (subcommand == "shoot") run_shoot(cfg, ctx, out);
    else if (subcommand == "fit-rate") run_fit_rate(cfg, ctx, out);
    else if (subcommand == "norm-equivalence") run_norm_equivalence(cfg, ctx, out);
    else throw ConfigError("unknown subcommand '" + subcommand + "'");
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.artifacts.push_back("manifest.json");
    write_manifest(dir, m);
    return m;
}

int cli_main(int argc, char** argv) {
    CLI::App app{"Numerical lab for stable self-similar blowup of the focusing cubic wave equation"};
    app.require_subcommand(0, 1);
    bool list_keys = false;
    app.add_flag("--list-keys", list_keys, "print the configuration keys of every subcommand");
    struct Options {
        std::string config, out = ".";
        std::uint64_t seed = RunContext{}.seed;
        int jobs = 1;
    };
    std::vector<std::pair<std::string, Options>> subs;
    subs.reserve(subcommands().size());
    for (const auto& name : subcommands()) {
        subs.emplace_back(name, Options{});
        Options& o = subs.back().second;
        auto* sc = app.add_subcommand(name, "run the " + name + " experiment");
        sc->footer("configuration keys:\n" + describe_schema(name));
        sc->add_option("--config", o.config, "key = value configuration file");
        sc->add_option("--seed", o.seed, "seed of the random ensembles");
        sc->add_option("--out", o.out, "output directory");
        sc->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (list_keys) {
        for (const auto& name : subcommands()) std::cout << name << ":\n" << describe_schema(name);
        return 0;
    }
    for (const auto& [name, o] : subs) {
        if (!app.got_subcommand(name)) continue;
        try {
            const Config cfg = o.config.empty() ? default_config(name) : load_config(o.config, name);
            RunContext ctx;
            ctx.out_dir = o.out;
            ctx.seed = o.seed;
            ctx.jobs = o.jobs;
            ctx.config_path = o.config;
            const RunManifest m = run(name, cfg, ctx);
            for (const auto& a : m.assertions)
                std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << format_number(a.measured) << " "
                          << a.relation << " " << format_number(a.threshold) << "\n";
            for (const auto& [k, v] : m.notes) std::cout << "note " << k << ": " << v << "\n";
            std::cout << (m.passed() ? "all assertions pass" : "assertion failure") << " (" << m.wall_time << " s)\n";
            return exit_code(m);
        } catch (const ConfigError& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    }
    std::cout << app.help();
    return 0;
}

}  // namespace blowup
