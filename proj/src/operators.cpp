#include "blowup/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "blowup/energy.hpp"
#include "blowup/geometry.hpp"

namespace blowup {

FieldPair static_profile(const GridPtr& g, double alpha) {
    const AxisProfile p(alpha);
    return {sample_axial(g, [&](double z, double) { return p.psi1(z); }),
            sample_axial(g, [&](double z, double) { return p.psi2(z); })};
}

FieldPair profile_deviation(const GridPtr& g, double alpha) {
    const AxisProfile p(alpha);
    return {sample_axial(g, [&](double z, double) { return p.deviation1(z); }),
            sample_axial(g, [&](double z, double) { return p.deviation2(z); })};
}

FieldPair profile_velocity(const GridPtr& g, double alpha) {
    const AxisProfile p(alpha);
    return {sample_axial(g, [&](double z, double) { return p.dpsi1_dalpha(z); }),
            sample_axial(g, [&](double z, double) { return p.dpsi2_dalpha(z); })};
}

FieldPair growing_mode(const GridPtr& g, double alpha) {
    const AxisProfile p(alpha);
    return {sample_axial(g, [&](double z, double) { return p.grow1(z); }),
            sample_axial(g, [&](double z, double) { return p.grow2(z); })};
}

ScalarField potential_field(const GridPtr& g, double alpha) {
    const AxisProfile p(alpha);
    return sample_axial(g, [&](double z, double) { return p.potential(z); });
}

FieldPair apply_free(const FieldPair& u, ResolutionWarning* warn) {
    if (warn) *warn = check_resolution(u.first);
    FieldPair out{u.second - euler(u.first) - u.first, laplacian(u.first) - euler(u.second) - 2.0 * u.second};
    return out;
}

FieldPair apply_linearized(const FieldPair& u, double alpha, ResolutionWarning* warn) {
    FieldPair out = apply_free(u, warn);
    out.second += potential_field(u.first.grid(), alpha) * u.first;
    return out;
}

FieldPair apply_nonlinear(const FieldPair& u, double alpha) {
    const GridPtr& g = u.first.grid();
    const FieldPair prof = static_profile(g, alpha);
    const Nodal& a = u.first.values();
    Nodal n2 = 3.0 * prof.first.values().cwiseProduct(a.cwiseAbs2()) + a.cwiseAbs2().cwiseProduct(a);
    return {ScalarField(g), ScalarField(g, n2)};
}

GeneratorMatrix assemble_generator(const GridPtr& g, double alpha, Generator which) {
    const int n = 2 * g->size();
    if (n > 20000) throw ConfigError("generator too large for dense assembly");
    GeneratorMatrix gm;
    gm.spec = g->spec();
    gm.alpha = alpha;
    gm.which = which;
    gm.M.resize(n, n);
    const ScalarField V = potential_field(g, alpha);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < n; ++c) {
        e(c) = 1.0;
        const FieldPair u = unstack(g, e);
        FieldPair r = apply_free(u);
        if (which == Generator::Linearized) r.second += V * u.first;
        gm.M.col(c) = stack(r);
        e(c) = 0.0;
    }
    return gm;
}

Eigen::MatrixXd sector_matrix(const GridPtr& g, int l) {
    const int nr = g->nr(), d = g->d();
    const double sgn = (l % 2) ? -1.0 : 1.0;
    const Eigen::MatrixXd D1 = g->dr_direct() + sgn * g->dr_mirror();
    const Eigen::MatrixXd D2 = g->drr_direct() + sgn * g->drr_mirror();
    const Eigen::VectorXd inv = g->rho().cwiseInverse();
    const Eigen::MatrixXd E = g->rho().asDiagonal() * D1;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nr, nr);
    Eigen::MatrixXd lap = D2 + double(d - 1) * (inv.asDiagonal() * D1);
    lap -= double(l) * (l + d - 2.0) * Eigen::MatrixXd(inv.cwiseAbs2().asDiagonal());
    Eigen::MatrixXd M(2 * nr, 2 * nr);
    M << -E - I, I, lap + 6.0 * I, -E - 2.0 * I;
    return M;
}

namespace {

std::vector<SpectrumEntry> filter(const Eigen::VectorXcd& coarse, const Eigen::VectorXcd& fine, double tol) {
    std::vector<SpectrumEntry> out;
    for (int k = 0; k < coarse.size(); ++k) {
        SpectrumEntry e;
        e.lambda = coarse(k);
        double best = 1e300;
        for (int m = 0; m < fine.size(); ++m) best = std::min(best, std::abs(fine(m) - coarse(k)));
        e.drift = best;
        e.converged = best < tol;
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
        return a.lambda.imag() > b.lambda.imag();
    });
    return out;
}

int refined(int nr, double factor) { return static_cast<int>(std::lround(nr * factor)); }

}  // namespace

std::vector<SpectrumEntry> discrete_spectrum(const SpectrumOptions& opt) {
    const int nt = std::max(4, opt.lmax + 1);
    const GridPtr g = make_grid({opt.d, opt.nr, nt, opt.axis});
    const GridPtr gf = make_grid({opt.d, refined(opt.nr, opt.refine_factor), nt, opt.axis});
    const GeneratorMatrix m = assemble_generator(g, opt.alpha, Generator::Linearized);
    const GeneratorMatrix mf = assemble_generator(gf, opt.alpha, Generator::Linearized);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.M, true);
    Eigen::EigenSolver<Eigen::MatrixXd> esf(mf.M, false);
    auto out = filter(es.eigenvalues(), esf.eigenvalues(), opt.converge_tol);
    // sector classification by the angular energy of each eigenvector
    const Eigen::VectorXcd lam = es.eigenvalues();
    for (auto& e : out) {
        int k = 0;
        for (int i = 0; i < lam.size(); ++i)
            if (lam(i) == e.lambda) {
                k = i;
                break;
            }
        const auto energy = sector_energy(*g, es.eigenvectors().col(k), nt - 1);
        e.sector = static_cast<int>(std::max_element(energy.begin(), energy.end()) - energy.begin());
    }
    return out;
}

std::vector<SpectrumEntry> sector_spectrum(const SpectrumOptions& opt, int l) {
    const GridPtr g = make_grid({opt.d, opt.nr, 4, opt.axis});
    const GridPtr gf = make_grid({opt.d, refined(opt.nr, opt.refine_factor), 4, opt.axis});
    Eigen::EigenSolver<Eigen::MatrixXd> es(sector_matrix(g, l), false);
    Eigen::EigenSolver<Eigen::MatrixXd> esf(sector_matrix(gf, l), false);
    auto out = filter(es.eigenvalues(), esf.eigenvalues(), opt.converge_tol);
    for (auto& e : out) e.sector = l;
    return out;
}

namespace {
Eigen::VectorXd inverse_iteration(const Eigen::MatrixXd& At, double shift, const Eigen::VectorXd& start) {
    const int n = static_cast<int>(At.rows());
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(At - shift * Eigen::MatrixXd::Identity(n, n));
    Eigen::VectorXd x = start.normalized();
    for (int it = 0; it < 30; ++it) {
        Eigen::VectorXd y = lu.solve(x);
        y.normalize();
        if (y.dot(x) < 0) y = -y;
        const double change = (y - x).norm();
        x = y;
        if (change < 1e-15) break;
    }
    return x;
}
}  // namespace

LeftModes left_modes(const GeneratorMatrix& gm, const FieldPair& grow, const FieldPair& velocity) {
    const Eigen::MatrixXd At = gm.M.transpose();
    const Eigen::VectorXd gv = stack(grow), hv = stack(velocity);
    LeftModes m;
    m.alpha = gm.alpha;
    m.ell1 = inverse_iteration(At, 1.0 + 1e-3, gv);
    m.ell1 /= m.ell1.dot(gv);
    Eigen::VectorXd start = hv;
    if (start.norm() == 0.0) start = Eigen::VectorXd::Ones(hv.size());
    m.ell0 = inverse_iteration(At, 1e-3, start);
    const double pair = m.ell0.dot(hv);
    if (std::abs(pair) < 1e-300) throw ConvergenceError("left null vector is orthogonal to the profile velocity");
    m.ell0 /= pair;
    return m;
}

LinearFit fit_log_linear(const std::vector<double>& tau, const std::vector<double>& values, double lo, double hi,
                         double max_residual, int min_samples) {
    std::vector<double> x, y;
    for (size_t k = 0; k < tau.size() && k < values.size(); ++k) {
        if (tau[k] < lo - 1e-12 || tau[k] > hi + 1e-12) continue;
        if (!(values[k] > 0.0) || !std::isfinite(values[k])) throw NonConvergedFit("non-positive value in fit window");
        x.push_back(tau[k]);
        y.push_back(std::log(values[k]));
    }
    const int n = static_cast<int>(x.size());
    if (n < min_samples) throw NonConvergedFit("too few samples in fit window");
    double sx = 0, sy = 0;
    for (int k = 0; k < n; ++k) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    LinearFit f;
    f.samples = n;
    f.rate = sxy / sxx;
    f.intercept = my - f.rate * mx;
    for (int k = 0; k < n; ++k) f.max_residual = std::max(f.max_residual, std::abs(y[k] - f.intercept - f.rate * x[k]));
    if (f.max_residual > max_residual) throw NonConvergedFit("log-norm curve is not affine over the fit window");
    return f;
}

DecayProbe semigroup_decay_probe(const GeneratorMatrix& gm, const GridPtr& g, const FieldPair& data,
                                 const LeftModes* modes, const FieldPair* grow, const FieldPair* velocity,
                                 double tau_max, double dt, double fit_lo, double fit_hi) {
    Eigen::VectorXd u = stack(data);
    if (modes && grow && velocity) {
        u -= modes->ell1.dot(u) * stack(*grow);
        u -= modes->ell0.dot(u) * stack(*velocity);
    }
    DecayProbe out;
    const int steps = static_cast<int>(std::ceil(tau_max / dt - 1e-9));
    const double h = tau_max / steps;
    const int every = std::max(1, static_cast<int>(std::lround(0.05 / h)));
    out.tau.push_back(0.0);
    out.norm.push_back(energy_norm(unstack(g, u)));
    for (int s = 1; s <= steps; ++s) {
        const Eigen::VectorXd k1 = gm.M * u;
        const Eigen::VectorXd k2 = gm.M * (u + 0.5 * h * k1);
        const Eigen::VectorXd k3 = gm.M * (u + 0.5 * h * k2);
        const Eigen::VectorXd k4 = gm.M * (u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (s % every == 0 || s == steps) {
            out.tau.push_back(s * h);
            out.norm.push_back(energy_norm(unstack(g, u)));
        }
    }
    out.fit = fit_log_linear(out.tau, out.norm, fit_lo, fit_hi, 0.5);
    return out;
}

}  // namespace blowup
