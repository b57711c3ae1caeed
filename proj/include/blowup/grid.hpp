#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

// Axisymmetric collocation on the unit ball of R^d.
// Radial nodes: positive half of an even Chebyshev-Lobatto grid on [-1, 1], so rho = 0 is
// never a node and rho = 1 always is. A field f(rho, mu) is extended to negative rho by
// f(-rho, mu) = f(rho, -mu), which is how the origin is handled.
// Angular nodes: Gauss nodes in mu = cos(theta) for the weight (1 - mu^2)^{(d-3)/2}.
struct GridSpec {
    int d = 5;
    int nr = 24;
    int nt = 8;
    int axis = 5;  // 1-based boost axis
};

using Nodal = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Grid {
public:
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int d() const { return spec_.d; }
    int nr() const { return spec_.nr; }
    int nt() const { return spec_.nt; }
    int size() const { return spec_.nr * spec_.nt; }
    int axis() const { return spec_.axis; }
    // first space index that is not the axis; representative points lie in the
    // half plane spanned by this direction and the axis
    int perp() const { return spec_.axis == 1 ? 2 : 1; }

    const Eigen::VectorXd& rho() const { return rho_; }       // ascending, rho(nr-1) = 1
    const Eigen::VectorXd& mu() const { return mu_; }         // descending
    const Eigen::VectorXd& theta() const { return theta_; }   // ascending
    const Eigen::VectorXd& sin_theta() const { return sin_; }
    int boundary_row() const { return spec_.nr - 1; }

    // radial weights already include rho^{d-1}; angular weights include |S^{d-2}|
    const Eigen::VectorXd& radial_weights() const { return wr_; }
    const Eigen::VectorXd& angular_weights() const { return wm_; }

    const Eigen::MatrixXd& dr_direct() const { return dr_direct_; }
    const Eigen::MatrixXd& dr_mirror() const { return dr_mirror_; }
    const Eigen::MatrixXd& drr_direct() const { return drr_direct_; }
    const Eigen::MatrixXd& drr_mirror() const { return drr_mirror_; }
    const Eigen::MatrixXd& dmu() const { return dmu_; }
    const Eigen::MatrixXd& dmumu() const { return dmumu_; }

    double integrate_ball(const Nodal& values) const;
    double integrate_sphere(const Eigen::VectorXd& boundary_values) const;
    double ball_volume() const;
    double sphere_area() const;

    // Gegenbauer polynomial of degree l at the angular nodes (weight (1-mu^2)^{(d-3)/2})
    Eigen::VectorXd gegenbauer(int l) const;

    // barycentric weights for interpolation on the doubled radial line
    const Eigen::VectorXd& full_nodes() const { return xfull_; }
    const Eigen::VectorXd& full_bary() const { return bfull_; }
    const Eigen::VectorXd& mu_bary() const { return bmu_; }

    // Radial step scale used by the time-step rule: the smallest radial node times the
    // angular spacing pi / nt.
    double step_scale() const;

private:
    GridSpec spec_;
    Eigen::VectorXd rho_, mu_, theta_, sin_, wr_, wm_;
    Eigen::MatrixXd dr_direct_, dr_mirror_, drr_direct_, drr_mirror_, dmu_, dmumu_;
    Eigen::VectorXd xfull_, bfull_, bmu_;
};

using GridPtr = std::shared_ptr<const Grid>;
GridPtr make_grid(const GridSpec& spec);

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr g);
    ScalarField(GridPtr g, Nodal v);

    const GridPtr& grid() const { return grid_; }
    Nodal& values() { return v_; }
    const Nodal& values() const { return v_; }
    double& operator()(int i, int j) { return v_(i, j); }
    double operator()(int i, int j) const { return v_(i, j); }

    Eigen::Map<Eigen::VectorXd> flat() { return {v_.data(), v_.size()}; }
    Eigen::Map<const Eigen::VectorXd> flat() const { return {v_.data(), v_.size()}; }
    Eigen::VectorXd boundary() const { return v_.row(v_.rows() - 1).transpose(); }
    double max_abs() const { return v_.cwiseAbs().maxCoeff(); }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double a);

private:
    GridPtr grid_;
    Nodal v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
// pointwise (pseudo-spectral) product
ScalarField operator*(const ScalarField& a, const ScalarField& b);

struct FieldPair {
    ScalarField first;
    ScalarField second;
};

FieldPair operator+(const FieldPair& a, const FieldPair& b);
FieldPair operator-(const FieldPair& a, const FieldPair& b);
FieldPair operator*(double s, const FieldPair& a);

// Stacked dof vector [first; second] and back.
Eigen::VectorXd stack(const FieldPair& u);
FieldPair unstack(const GridPtr& g, const Eigen::VectorXd& v);

// f(rho, mu)
ScalarField sample(const GridPtr& g, const std::function<double(double, double)>& f);
// f(z, r_perp): z along the axis, r_perp distance from the axis
ScalarField sample_axial(const GridPtr& g, const std::function<double(double, double)>& f);
ScalarField constant_field(const GridPtr& g, double c);

// node coordinates
ScalarField axial_coordinate(const GridPtr& g);  // z = rho mu
ScalarField radius_field(const GridPtr& g);      // rho

// spectral derivatives in (rho, mu)
// d_rho and d_rho2 return plain nodal derivatives; d_rho of a field has the opposite
// reflection parity, so it must not be differentiated again with d_rho.
ScalarField d_rho(const ScalarField& f);
ScalarField d_rho2(const ScalarField& f);
ScalarField d_mu(const ScalarField& f);
ScalarField euler(const ScalarField& f);  // xi . grad f = rho d_rho f
// [f, E f, E(E-1) f, ...] up to order n with E = euler; at rho = 1 entry j is d_rho^j f
std::vector<ScalarField> radial_falling(const ScalarField& f, int n);
ScalarField sphere_laplacian(const ScalarField& f, int d);
ScalarField sphere_laplacian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f, int d);
ScalarField laplacian(const ScalarField& f);
// f(xi) = F(z, q) with q = |xi|^2: z_partial = dF/dz at fixed q, q_partial = dF/dq at fixed z
ScalarField z_partial(const ScalarField& f);
ScalarField q_partial(const ScalarField& f);

// Cartesian derivative along the 1-based direction j, evaluated at the representative
// points (rho sin theta e_perp + rho cos theta e_axis). For j = axis the result is again
// an axisymmetric field; for j = perp it is the value at the representative point; for
// every other direction it vanishes there.
ScalarField cartesian_derivative(const ScalarField& f, int j, ResolutionWarning* warn = nullptr);

// Interpolate at an arbitrary point (rho in [0, 1], mu in [-1, 1]).
double evaluate(const ScalarField& f, double rho, double mu);

// Largest trailing spectral coefficient relative to the largest one.
double spectral_tail(const ScalarField& f);
ResolutionWarning check_resolution(const ScalarField& f, double threshold = 1e-6);

// per-sector energy of a stacked (possibly complex) vector
std::vector<double> sector_energy(const Grid& g, const Eigen::VectorXcd& stacked, int lmax);

// Snapshots: header (d, N_r, N_theta, tau) then row-major values, one slot after another.
struct Snapshot {
    GridSpec spec;
    double tau = 0.0;
    std::vector<Nodal> slots;
};
void write_snapshot_csv(const std::string& path, const FieldPair& u, double tau);
void write_snapshot_binary(const std::string& path, const FieldPair& u, double tau);
Snapshot read_snapshot_csv(const std::string& path);
Snapshot read_snapshot_binary(const std::string& path);

}  // namespace blowup
