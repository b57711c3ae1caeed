#include "blowup/grid.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace blowup {

namespace {

// Chebyshev-Lobatto points x_k = cos(pi k / n), k = 0..n, and the first-derivative matrix.
void chebyshev(int n, Eigen::VectorXd& x, Eigen::MatrixXd& D) {
    x.resize(n + 1);
    for (int k = 0; k <= n; ++k) x(k) = std::sin(M_PI * (n - 2.0 * k) / (2.0 * n));
    D.setZero(n + 1, n + 1);
    auto c = [n](int k) { return ((k == 0 || k == n) ? 2.0 : 1.0) * ((k % 2) ? -1.0 : 1.0); };
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j <= n; ++j) {
            if (j == k) continue;
            // x_k - x_j without cancellation
            const double diff = 2.0 * std::sin(M_PI * (j + k) / (2.0 * n)) * std::sin(M_PI * (j - k) / (2.0 * n));
            D(k, j) = c(k) / c(j) / diff;
        }
    }
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= n; ++j)
            if (j != k) s += D(k, j);
        D(k, k) = -s;
    }
}

Eigen::VectorXd clenshaw_curtis(int n) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    Eigen::VectorXd theta(n + 1);
    for (int k = 0; k <= n; ++k) theta(k) = M_PI * k / n;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n + 1);
    if (n % 2 == 0) {
        w(0) = w(n) = 1.0 / (n * n - 1.0);
        for (int m = 1; m < n / 2; ++m)
            for (int k = 1; k < n; ++k) v(k) -= 2.0 * std::cos(2.0 * m * theta(k)) / (4.0 * m * m - 1.0);
        for (int k = 1; k < n; ++k) v(k) -= std::cos(n * theta(k)) / (n * n - 1.0);
    } else {
        w(0) = w(n) = 1.0 / (double(n) * n);
        for (int m = 1; m <= (n - 1) / 2; ++m)
            for (int k = 1; k < n; ++k) v(k) -= 2.0 * std::cos(2.0 * m * theta(k)) / (4.0 * m * m - 1.0);
    }
    for (int k = 1; k < n; ++k) w(k) = 2.0 * v(k) / n;
    return w;
}

// Gauss nodes and weights for (1 - x^2)^beta on [-1, 1] (Golub-Welsch).
void gauss_gegenbauer(int n, double beta, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(k * (k + 2.0 * beta) / ((2.0 * k + 2.0 * beta + 1.0) * (2.0 * k + 2.0 * beta - 1.0)));
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double mu0 = std::exp((2.0 * beta + 1.0) * std::log(2.0) + 2.0 * std::lgamma(beta + 1.0) - std::lgamma(2.0 * beta + 2.0));
    x.resize(n);
    w.resize(n);
    // descending order in x
    for (int k = 0; k < n; ++k) {
        const int e = n - 1 - k;
        x(k) = es.eigenvalues()(e);
        const double v0 = es.eigenvectors()(0, e);
        w(k) = mu0 * v0 * v0;
    }
    // enforce exact symmetry
    for (int k = 0; k < n / 2; ++k) {
        const double a = 0.5 * (x(k) - x(n - 1 - k));
        x(k) = a;
        x(n - 1 - k) = -a;
        const double ww = 0.5 * (w(k) + w(n - 1 - k));
        w(k) = w(n - 1 - k) = ww;
    }
    if (n % 2 == 1) x(n / 2) = 0.0;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd b(n);
    for (int j = 0; j < n; ++j) {
        double p = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) p *= (x(j) - x(k));
        b(j) = 1.0 / p;
    }
    // rescale to avoid under/overflow for large n
    b /= b.cwiseAbs().maxCoeff();
    return b;
}

double sphere_measure(int m) {  // |S^m|
    return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

double bary_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& b, const Eigen::VectorXd& f, double t) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k < x.size(); ++k) {
        const double diff = t - x(k);
        if (diff == 0.0) return f(k);
        const double c = b(k) / diff;
        num += c * f(k);
        den += c;
    }
    return num / den;
}

}  // namespace

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    if (spec.nr < 8 || spec.nt < 4) throw ConfigError("grid needs nr >= 8 and nt >= 4");
    if (spec.d < 3 || spec.d % 2 == 0) throw ConfigError("grid dimension must be odd and >= 3");
    if (spec.axis < 1 || spec.axis > spec.d) throw ConfigError("boost axis out of range");
    const int nr = spec.nr, nt = spec.nt, d = spec.d;
    const int M = 2 * nr, n = M - 1;

    Eigen::VectorXd x;
    Eigen::MatrixXd D;
    chebyshev(n, x, D);
    const Eigen::MatrixXd D2 = D * D;
    xfull_ = x;
    bfull_.resize(M);
    for (int k = 0; k < M; ++k) bfull_(k) = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == n) ? 0.5 : 1.0);

    rho_.resize(nr);
    for (int i = 0; i < nr; ++i) rho_(i) = x(nr - 1 - i);
    rho_(nr - 1) = 1.0;

    dr_direct_.resize(nr, nr);
    dr_mirror_.resize(nr, nr);
    drr_direct_.resize(nr, nr);
    drr_mirror_.resize(nr, nr);
    for (int i = 0; i < nr; ++i) {
        for (int k = 0; k < nr; ++k) {
            dr_direct_(i, k) = D(nr - 1 - i, nr - 1 - k);
            dr_mirror_(i, k) = D(nr - 1 - i, nr + k);
            drr_direct_(i, k) = D2(nr - 1 - i, nr - 1 - k);
            drr_mirror_(i, k) = D2(nr - 1 - i, nr + k);
        }
    }

    const Eigen::VectorXd cc = clenshaw_curtis(n);
    wr_.resize(nr);
    for (int i = 0; i < nr; ++i) wr_(i) = cc(nr - 1 - i) * std::pow(rho_(i), d - 1);

    Eigen::VectorXd gw;
    gauss_gegenbauer(nt, 0.5 * (d - 3), mu_, gw);
    wm_ = gw * sphere_measure(d - 2);
    theta_.resize(nt);
    sin_.resize(nt);
    for (int j = 0; j < nt; ++j) {
        theta_(j) = std::acos(mu_(j));
        sin_(j) = std::sqrt((1.0 - mu_(j)) * (1.0 + mu_(j)));
    }

    bmu_ = barycentric_weights(mu_);
    dmu_.resize(nt, nt);
    for (int j = 0; j < nt; ++j) {
        double s = 0.0;
        for (int k = 0; k < nt; ++k) {
            if (k == j) continue;
            dmu_(j, k) = bmu_(k) / bmu_(j) / (mu_(j) - mu_(k));
            s += dmu_(j, k);
        }
        dmu_(j, j) = -s;
    }
    dmumu_ = dmu_ * dmu_;
}

double Grid::integrate_ball(const Nodal& values) const {
    return wr_.dot(values * wm_);
}

double Grid::integrate_sphere(const Eigen::VectorXd& boundary_values) const {
    return wm_.dot(boundary_values);
}

double Grid::ball_volume() const { return sphere_measure(spec_.d - 1) / spec_.d; }
double Grid::sphere_area() const { return sphere_measure(spec_.d - 1); }

Eigen::VectorXd Grid::gegenbauer(int l) const {
    const double lam = 0.5 * (spec_.d - 2);
    const int nt = spec_.nt;
    Eigen::VectorXd c0 = Eigen::VectorXd::Ones(nt);
    if (l == 0) return c0;
    Eigen::VectorXd c1 = 2.0 * lam * mu_;
    for (int k = 2; k <= l; ++k) {
        Eigen::VectorXd c2 = (2.0 * (k + lam - 1.0) * mu_.cwiseProduct(c1) - (k + 2.0 * lam - 2.0) * c0) / k;
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

double Grid::step_scale() const {
    return rho_(0) * M_PI / spec_.nt;
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

// ---------------------------------------------------------------- fields

ScalarField::ScalarField(GridPtr g) : grid_(std::move(g)), v_(Nodal::Zero(grid_->nr(), grid_->nt())) {}

ScalarField::ScalarField(GridPtr g, Nodal v) : grid_(std::move(g)), v_(std::move(v)) {
    if (v_.rows() != grid_->nr() || v_.cols() != grid_->nt()) throw ConfigError("nodal array does not match grid");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    v_ += o.v_;
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    v_ -= o.v_;
    return *this;
}
ScalarField& ScalarField::operator*=(double a) {
    v_ *= a;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    return ScalarField(a.grid(), a.values().cwiseProduct(b.values()));
}

FieldPair operator+(const FieldPair& a, const FieldPair& b) { return {a.first + b.first, a.second + b.second}; }
FieldPair operator-(const FieldPair& a, const FieldPair& b) { return {a.first - b.first, a.second - b.second}; }
FieldPair operator*(double s, const FieldPair& a) { return {s * a.first, s * a.second}; }

Eigen::VectorXd stack(const FieldPair& u) {
    const int n = u.first.grid()->size();
    Eigen::VectorXd v(2 * n);
    v.head(n) = u.first.flat();
    v.tail(n) = u.second.flat();
    return v;
}

FieldPair unstack(const GridPtr& g, const Eigen::VectorXd& v) {
    const int n = g->size();
    if (v.size() != 2 * n) throw ConfigError("stacked vector has wrong length");
    FieldPair u{ScalarField(g), ScalarField(g)};
    u.first.flat() = v.head(n);
    u.second.flat() = v.tail(n);
    return u;
}

ScalarField sample(const GridPtr& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g->nr(); ++i)
        for (int j = 0; j < g->nt(); ++j) out(i, j) = f(g->rho()(i), g->mu()(j));
    return out;
}

ScalarField sample_axial(const GridPtr& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g->nr(); ++i)
        for (int j = 0; j < g->nt(); ++j) {
            const double r = g->rho()(i);
            out(i, j) = f(r * g->mu()(j), r * g->sin_theta()(j));
        }
    return out;
}

ScalarField constant_field(const GridPtr& g, double c) {
    return ScalarField(g, Nodal::Constant(g->nr(), g->nt(), c));
}

ScalarField axial_coordinate(const GridPtr& g) {
    return ScalarField(g, g->rho() * g->mu().transpose());
}

ScalarField radius_field(const GridPtr& g) {
    return ScalarField(g, g->rho() * Eigen::RowVectorXd::Ones(g->nt()));
}

namespace {
Nodal mirrored(const Nodal& v) { return v.rowwise().reverse(); }
}  // namespace

ScalarField d_rho(const ScalarField& f) {
    const Grid& g = *f.grid();
    return ScalarField(f.grid(), g.dr_direct() * f.values() + g.dr_mirror() * mirrored(f.values()));
}

ScalarField d_rho2(const ScalarField& f) {
    const Grid& g = *f.grid();
    return ScalarField(f.grid(), g.drr_direct() * f.values() + g.drr_mirror() * mirrored(f.values()));
}

ScalarField d_mu(const ScalarField& f) {
    return ScalarField(f.grid(), f.values() * f.grid()->dmu().transpose());
}

ScalarField euler(const ScalarField& f) {
    const Grid& g = *f.grid();
    return ScalarField(f.grid(), g.rho().asDiagonal() * d_rho(f).values());
}

std::vector<ScalarField> radial_falling(const ScalarField& f, int n) {
    std::vector<ScalarField> out{f};
    for (int j = 1; j <= n; ++j) out.push_back(euler(out.back()) - double(j - 1) * out.back());
    return out;
}

ScalarField sphere_laplacian(const ScalarField& f, int d) {
    const Grid& g = *f.grid();
    const Nodal fm = f.values() * g.dmu().transpose();
    const Nodal fmm = f.values() * g.dmumu().transpose();
    const Eigen::VectorXd one_minus = (1.0 - g.mu().array().square()).matrix();
    Nodal out = fmm * one_minus.asDiagonal();
    out -= double(d - 1) * (fm * g.mu().asDiagonal());
    return ScalarField(f.grid(), out);
}

ScalarField sphere_laplacian(const ScalarField& f) { return sphere_laplacian(f, f.grid()->d()); }

ScalarField laplacian(const ScalarField& f, int d) {
    const Grid& g = *f.grid();
    const Eigen::VectorXd inv = g.rho().cwiseInverse();
    Nodal out = d_rho2(f).values();
    out += double(d - 1) * (inv.asDiagonal() * d_rho(f).values());
    out += inv.cwiseProduct(inv).asDiagonal() * sphere_laplacian(f, d).values();
    return ScalarField(f.grid(), out);
}

ScalarField laplacian(const ScalarField& f) { return laplacian(f, f.grid()->d()); }

ScalarField z_partial(const ScalarField& f) {
    const Grid& g = *f.grid();
    return ScalarField(f.grid(), g.rho().cwiseInverse().asDiagonal() * d_mu(f).values());
}

ScalarField q_partial(const ScalarField& f) {
    const Grid& g = *f.grid();
    const Eigen::VectorXd inv = g.rho().cwiseInverse();
    Nodal out = inv.asDiagonal() * d_rho(f).values();
    out -= inv.cwiseProduct(inv).asDiagonal() * (d_mu(f).values() * g.mu().asDiagonal());
    return ScalarField(f.grid(), 0.5 * out);
}

ScalarField cartesian_derivative(const ScalarField& f, int j, ResolutionWarning* warn) {
    const Grid& g = *f.grid();
    if (j < 1 || j > g.d()) throw DomainError("derivative direction out of range");
    if (warn) *warn = check_resolution(f);
    if (j == g.axis()) {
        // mu d_rho + (1 - mu^2)/rho d_mu
        const Eigen::VectorXd one_minus = (1.0 - g.mu().array().square()).matrix();
        Nodal out = d_rho(f).values() * g.mu().asDiagonal();
        out += g.rho().cwiseInverse().asDiagonal() * (d_mu(f).values() * one_minus.asDiagonal());
        return ScalarField(f.grid(), out);
    }
    if (j == g.perp()) {
        // 2 xi_perp dF/dq
        Nodal out = 2.0 * (g.rho().asDiagonal() * (q_partial(f).values() * g.sin_theta().asDiagonal()));
        return ScalarField(f.grid(), out);
    }
    return ScalarField(f.grid());
}

double evaluate(const ScalarField& f, double rho, double mu) {
    const Grid& g = *f.grid();
    if (rho < 0.0 || rho > 1.0 + 1e-14 || std::abs(mu) > 1.0 + 1e-14) throw DomainError("evaluation point outside the ball");
    const int nr = g.nr(), nt = g.nt();
    Eigen::VectorXd line(2 * nr);
    for (int i = 0; i < nr; ++i) {
        const Eigen::VectorXd row = f.values().row(i).transpose();
        line(nr - 1 - i) = bary_eval(g.mu(), g.mu_bary(), row, mu);
        line(nr + i) = bary_eval(g.mu(), g.mu_bary(), row, -mu);
    }
    (void)nt;
    return bary_eval(g.full_nodes(), g.full_bary(), line, rho);
}

double spectral_tail(const ScalarField& f) {
    const Grid& g = *f.grid();
    const int nr = g.nr(), nt = g.nt(), M = 2 * nr, n = M - 1;
    const double scale = f.max_abs();
    if (scale == 0.0) return 0.0;
    double tail = 0.0;
    // radial Chebyshev coefficients of each doubled column
    const int cut = n - std::max(1, n / 8);
    for (int j = 0; j < nt; ++j) {
        Eigen::VectorXd line(M);
        for (int i = 0; i < nr; ++i) {
            line(nr - 1 - i) = f(i, j);
            line(nr + i) = f(i, nt - 1 - j);
        }
        double cmax = 0.0, ctail = 0.0;
        for (int m = 0; m <= n; ++m) {
            double s = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double h = (k == 0 || k == n) ? 0.5 : 1.0;
                s += h * line(k) * std::cos(M_PI * double(m) * k / n);
            }
            s *= 2.0 / n;
            if (m == 0 || m == n) s *= 0.5;
            cmax = std::max(cmax, std::abs(s));
            if (m >= cut) ctail = std::max(ctail, std::abs(s));
        }
        if (cmax > 0.0) tail = std::max(tail, ctail / cmax);
    }
    // angular Gegenbauer coefficients
    const int lcut = nt - std::max(1, nt / 8);
    std::vector<Eigen::VectorXd> polys;
    std::vector<double> norms;
    for (int l = 0; l < nt; ++l) {
        polys.push_back(g.gegenbauer(l));
        norms.push_back(std::sqrt(g.angular_weights().dot(polys.back().cwiseAbs2())));
    }
    for (int i = 0; i < nr; ++i) {
        double cmax = 0.0, ctail = 0.0;
        const Eigen::VectorXd row = f.values().row(i).transpose();
        for (int l = 0; l < nt; ++l) {
            const double c = std::abs(g.angular_weights().dot(polys[l].cwiseProduct(row))) / norms[l];
            cmax = std::max(cmax, c);
            if (l >= lcut) ctail = std::max(ctail, c);
        }
        if (cmax > 1e-14 * scale) tail = std::max(tail, ctail / cmax);
    }
    return tail;
}

ResolutionWarning check_resolution(const ScalarField& f, double threshold) {
    ResolutionWarning w;
    w.tail = spectral_tail(f);
    w.raised = w.tail > threshold;
    return w;
}

std::vector<double> sector_energy(const Grid& g, const Eigen::VectorXcd& stacked, int lmax) {
    const int nr = g.nr(), nt = g.nt(), n = g.size();
    std::vector<double> e(lmax + 1, 0.0);
    for (int l = 0; l <= std::min(lmax, nt - 1); ++l) {
        const Eigen::VectorXd P = g.gegenbauer(l);
        const double h = g.angular_weights().dot(P.cwiseAbs2());
        for (int slot = 0; slot < 2; ++slot) {
            for (int i = 0; i < nr; ++i) {
                std::complex<double> c = 0.0;
                for (int j = 0; j < nt; ++j) c += g.angular_weights()(j) * P(j) * stacked(slot * n + i * nt + j);
                // the rho = 1 row carries no radial weight for small d; use unit weight floor
                const double w = std::max(g.radial_weights()(i), 1e-300);
                e[l] += w * std::norm(c) / h;
            }
        }
    }
    return e;
}

// ---------------------------------------------------------------- snapshots

void write_snapshot_csv(const std::string& path, const FieldPair& u, double tau) {
    std::ofstream os(path);
    if (!os) throw IOError("cannot open " + path);
    const Grid& g = *u.first.grid();
    os << "# blowup-lab snapshot v1\n";
    os << "d,N_r,N_theta,tau\n";
    os << g.d() << ',' << g.nr() << ',' << g.nt() << ',' << std::setprecision(17) << tau << '\n';
    for (const ScalarField* f : {&u.first, &u.second}) {
        for (int i = 0; i < g.nr(); ++i) {
            for (int j = 0; j < g.nt(); ++j) os << (j ? "," : "") << (*f)(i, j);
            os << '\n';
        }
    }
    if (!os) throw IOError("write failed for " + path);
}

void write_snapshot_binary(const std::string& path, const FieldPair& u, double tau) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IOError("cannot open " + path);
    const Grid& g = *u.first.grid();
    const char magic[4] = {'B', 'L', 'S', 'N'};
    os.write(magic, 4);
    const std::int32_t hdr[5] = {1, g.d(), g.nr(), g.nt(), 2};
    os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    os.write(reinterpret_cast<const char*>(&tau), sizeof(double));
    for (const ScalarField* f : {&u.first, &u.second})
        os.write(reinterpret_cast<const char*>(f->values().data()), sizeof(double) * f->values().size());
    if (!os) throw IOError("write failed for " + path);
}

Snapshot read_snapshot_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IOError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line.rfind("# blowup-lab snapshot", 0) != 0) throw IOError("not a snapshot file: " + path);
    std::getline(is, line);
    std::getline(is, line);
    Snapshot s;
    char comma;
    std::istringstream hs(line);
    hs >> s.spec.d >> comma >> s.spec.nr >> comma >> s.spec.nt >> comma >> s.tau;
    while (true) {
        Nodal v(s.spec.nr, s.spec.nt);
        bool ok = true;
        for (int i = 0; i < s.spec.nr && ok; ++i) {
            if (!std::getline(is, line)) {
                ok = false;
                break;
            }
            std::istringstream ls(line);
            for (int j = 0; j < s.spec.nt; ++j) {
                std::string cell;
                std::getline(ls, cell, ',');
                v(i, j) = std::stod(cell);
            }
        }
        if (!ok) break;
        s.slots.push_back(v);
    }
    return s;
}

Snapshot read_snapshot_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IOError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::string(magic, 4) != "BLSN") throw IOError("not a binary snapshot: " + path);
    std::int32_t hdr[5];
    is.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    Snapshot s;
    s.spec.d = hdr[1];
    s.spec.nr = hdr[2];
    s.spec.nt = hdr[3];
    is.read(reinterpret_cast<char*>(&s.tau), sizeof(double));
    for (int k = 0; k < hdr[4]; ++k) {
        Nodal v(s.spec.nr, s.spec.nt);
        is.read(reinterpret_cast<char*>(v.data()), sizeof(double) * v.size());
        if (!is) throw IOError("truncated snapshot: " + path);
        s.slots.push_back(v);
    }
    return s;
}

}  // namespace blowup
