#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "blowup/grid.hpp"

namespace blowup {

// Axisymmetric polynomial F(z, q) = sum c(a, b) z^a q^b with z = xi^axis and q = |xi|^2.
// All operations are exact coefficient manipulations, so identities can be checked
// without differentiation noise.
class AxisPoly {
public:
    AxisPoly() : c_(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit AxisPoly(Eigen::MatrixXd coeffs);
    static AxisPoly constant(double v);
    static AxisPoly axial(double scale = 1.0);  // scale * z
    static AxisPoly radius_squared();           // q
    // uniform[-1, 1] coefficients on all monomials with a + 2b <= degree (a outer, b inner)
    static AxisPoly random(int degree, std::mt19937_64& rng);

    const Eigen::MatrixXd& coeffs() const { return c_; }
    double coeff(int a, int b) const;
    int degree() const;  // max a + 2b over nonzero coefficients

    AxisPoly dz() const;
    AxisPoly dq() const;
    AxisPoly euler() const;  // xi . grad
    AxisPoly laplacian(int d) const;

    double eval(double z, double q) const;
    ScalarField sample(const GridPtr& g) const;

    // coefficients in mu of the j-th radial derivative at rho = 1
    Eigen::VectorXd radial_trace(int j) const;

    AxisPoly& operator+=(const AxisPoly& o);
    AxisPoly& operator-=(const AxisPoly& o);
    AxisPoly& operator*=(double s);

private:
    Eigen::MatrixXd c_;  // rows: power of z, cols: power of q
};

AxisPoly operator+(AxisPoly a, const AxisPoly& b);
AxisPoly operator-(AxisPoly a, const AxisPoly& b);
AxisPoly operator*(double s, AxisPoly a);

struct AxisPolyPair {
    AxisPoly first;
    AxisPoly second;
};

AxisPolyPair operator+(const AxisPolyPair& a, const AxisPolyPair& b);
AxisPolyPair operator*(double s, const AxisPolyPair& a);
AxisPolyPair random_pair(int degree, std::mt19937_64& rng);
FieldPair sample(const GridPtr& g, const AxisPolyPair& u);

// (-xi.grad u1 - u1 + u2, lap u1 - xi.grad u2 - 2 u2), exact
AxisPolyPair apply_free(const AxisPolyPair& u, int d);

// Polynomials in mu on the unit sphere (coefficient k multiplies mu^k).
Eigen::VectorXd mu_poly_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd sphere_laplacian_mu(const Eigen::VectorXd& p, int d);
Eigen::VectorXd eval_mu_poly(const Eigen::VectorXd& p, const Eigen::VectorXd& mu);

}  // namespace blowup
