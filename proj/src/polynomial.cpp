#include "blowup/polynomial.hpp"

#include <cmath>

namespace blowup {

namespace {
Eigen::MatrixXd padded(const Eigen::MatrixXd& m, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(std::max(r, m.rows()), std::max(c, m.cols()));
    out.topLeftCorner(m.rows(), m.cols()) = m;
    return out;
}

double falling(int n, int j) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= (n - i);
    return p;
}
}  // namespace

AxisPoly::AxisPoly(Eigen::MatrixXd coeffs) : c_(std::move(coeffs)) {
    if (c_.size() == 0) c_ = Eigen::MatrixXd::Zero(1, 1);
}

AxisPoly AxisPoly::constant(double v) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 1);
    c(0, 0) = v;
    return AxisPoly(c);
}

AxisPoly AxisPoly::axial(double scale) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 1);
    c(1, 0) = scale;
    return AxisPoly(c);
}

AxisPoly AxisPoly::radius_squared() {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 2);
    c(0, 1) = 1.0;
    return AxisPoly(c);
}

AxisPoly AxisPoly::random(int degree, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(degree + 1, degree / 2 + 1);
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + 2 * b <= degree; ++b) c(a, b) = U(rng);
    return AxisPoly(c);
}

double AxisPoly::coeff(int a, int b) const {
    if (a < 0 || b < 0 || a >= c_.rows() || b >= c_.cols()) return 0.0;
    return c_(a, b);
}

int AxisPoly::degree() const {
    int deg = 0;
    for (int a = 0; a < c_.rows(); ++a)
        for (int b = 0; b < c_.cols(); ++b)
            if (c_(a, b) != 0.0) deg = std::max(deg, a + 2 * b);
    return deg;
}

AxisPoly AxisPoly::dz() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(1, c_.rows() - 1), c_.cols());
    for (int a = 1; a < c_.rows(); ++a)
        for (int b = 0; b < c_.cols(); ++b) out(a - 1, b) = a * c_(a, b);
    return AxisPoly(out);
}

AxisPoly AxisPoly::dq() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c_.rows(), std::max<Eigen::Index>(1, c_.cols() - 1));
    for (int a = 0; a < c_.rows(); ++a)
        for (int b = 1; b < c_.cols(); ++b) out(a, b - 1) = b * c_(a, b);
    return AxisPoly(out);
}

AxisPoly AxisPoly::euler() const {
    Eigen::MatrixXd out = c_;
    for (int a = 0; a < c_.rows(); ++a)
        for (int b = 0; b < c_.cols(); ++b) out(a, b) *= (a + 2 * b);
    return AxisPoly(out);
}

AxisPoly AxisPoly::laplacian(int d) const {
    // lap(z^a q^b) = a(a-1) z^{a-2} q^b + 2b(2a + 2b + d - 2) z^a q^{b-1}
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c_.rows(), c_.cols());
    for (int a = 0; a < c_.rows(); ++a)
        for (int b = 0; b < c_.cols(); ++b) {
            const double v = c_(a, b);
            if (v == 0.0) continue;
            if (a >= 2) out(a - 2, b) += a * (a - 1.0) * v;
            if (b >= 1) out(a, b - 1) += 2.0 * b * (2.0 * a + 2.0 * b + d - 2.0) * v;
        }
    return AxisPoly(out);
}

double AxisPoly::eval(double z, double q) const {
    double s = 0.0;
    for (int a = c_.rows() - 1; a >= 0; --a) {
        double inner = 0.0;
        for (int b = c_.cols() - 1; b >= 0; --b) inner = inner * q + c_(a, b);
        s = s * z + inner;
    }
    return s;
}

ScalarField AxisPoly::sample(const GridPtr& g) const {
    ScalarField out(g);
    for (int i = 0; i < g->nr(); ++i) {
        const double r = g->rho()(i);
        for (int j = 0; j < g->nt(); ++j) out(i, j) = eval(r * g->mu()(j), r * r);
    }
    return out;
}

Eigen::VectorXd AxisPoly::radial_trace(int j) const {
    // on the ray rho * omega the monomial is rho^{a+2b} mu^a
    Eigen::VectorXd p = Eigen::VectorXd::Zero(c_.rows());
    for (int a = 0; a < c_.rows(); ++a)
        for (int b = 0; b < c_.cols(); ++b) p(a) += falling(a + 2 * b, j) * c_(a, b);
    return p;
}

AxisPoly& AxisPoly::operator+=(const AxisPoly& o) {
    c_ = padded(c_, o.c_.rows(), o.c_.cols());
    c_.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
    return *this;
}

AxisPoly& AxisPoly::operator-=(const AxisPoly& o) {
    c_ = padded(c_, o.c_.rows(), o.c_.cols());
    c_.topLeftCorner(o.c_.rows(), o.c_.cols()) -= o.c_;
    return *this;
}

AxisPoly& AxisPoly::operator*=(double s) {
    c_ *= s;
    return *this;
}

AxisPoly operator+(AxisPoly a, const AxisPoly& b) { return a += b; }
AxisPoly operator-(AxisPoly a, const AxisPoly& b) { return a -= b; }
AxisPoly operator*(double s, AxisPoly a) { return a *= s; }

AxisPolyPair operator+(const AxisPolyPair& a, const AxisPolyPair& b) { return {a.first + b.first, a.second + b.second}; }
AxisPolyPair operator*(double s, const AxisPolyPair& a) { return {s * a.first, s * a.second}; }

AxisPolyPair random_pair(int degree, std::mt19937_64& rng) {
    AxisPolyPair u;
    u.first = AxisPoly::random(degree, rng);
    u.second = AxisPoly::random(degree, rng);
    return u;
}

FieldPair sample(const GridPtr& g, const AxisPolyPair& u) { return {u.first.sample(g), u.second.sample(g)}; }

AxisPolyPair apply_free(const AxisPolyPair& u, int d) {
    AxisPolyPair out;
    out.first = u.second - u.first.euler() - u.first;
    out.second = u.first.laplacian(d) - u.second.euler() - 2.0 * u.second;
    return out;
}

Eigen::VectorXd mu_poly_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(std::max(a.size(), b.size()));
    out.head(a.size()) += a;
    out.head(b.size()) += b;
    return out;
}

Eigen::VectorXd sphere_laplacian_mu(const Eigen::VectorXd& p, int d) {
    // lap_S mu^a = a(a-1) mu^{a-2} - a(a+d-2) mu^a
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p.size());
    for (int a = 0; a < p.size(); ++a) {
        out(a) -= a * (a + d - 2.0) * p(a);
        if (a >= 2) out(a - 2) += a * (a - 1.0) * p(a);
    }
    return out;
}

Eigen::VectorXd eval_mu_poly(const Eigen::VectorXd& p, const Eigen::VectorXd& mu) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(mu.size());
    for (int k = p.size() - 1; k >= 0; --k) out = out.cwiseProduct(mu) + Eigen::VectorXd::Constant(mu.size(), p(k));
    return out;
}

}  // namespace blowup
