#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "blowup/grid.hpp"
#include "blowup/jets.hpp"
#include "blowup/polynomial.hpp"

namespace blowup {

// Coefficients of the surface operators, highest radial derivative first.
const std::vector<int>& surface_coeffs_first(int d);   // acts on w1
const std::vector<int>& surface_coeffs_second(int d);  // acts on w2

// Everything the d = 5 graded forms need from one state.
struct FormInputs {
    Jet first;        // order 3
    Jet lap_first;    // order 1
    Jet second;       // order 2
    Eigen::VectorXd zeta;  // at the sphere nodes
};

FormInputs form_inputs(const AxisPolyPair& u, const GridPtr& g);  // exact derivatives
FormInputs form_inputs(const FieldPair& u);                        // spectral derivatives

struct FormValues {
    std::array<double, 5> part{};  // components 1..5
    double full = 0.0;
};

FormValues inner_all(const FormInputs& u, const FormInputs& v);
double inner(const FieldPair& u, const FieldPair& v, int component);
double inner_full(const FieldPair& u, const FieldPair& v);
double energy_norm(const FieldPair& u);
double energy_norm(const AxisPolyPair& u, const GridPtr& g);

// zeta at the sphere nodes of the grid (grid dimension selects the tables)
Eigen::VectorXd zeta_values(const AxisPolyPair& u, const GridPtr& g);
Eigen::VectorXd zeta_values(const FieldPair& u);

struct ZetaCheck {
    double residual = 0.0;   // max over the sphere of |zeta(Lu) + zeta(u) - correction|
    double scale = 0.0;      // max of the magnitudes of the three terms
    double relative = 0.0;   // residual / scale
    double stokes = 0.0;     // |surface integral of the correction| / integral of its modulus
};

// Exact polynomial path: everything is a polynomial in mu on the sphere.
ZetaCheck verify_zeta_identity(const AxisPolyPair& u, int d);
// Spectral path on a grid.
ZetaCheck verify_zeta_identity(const FieldPair& u);

struct DissipativityRow {
    int component = 0;  // 1..5, 6 = full form
    double lu_u = 0.0;  // (Lu | u)_i
    double u_u = 0.0;   // ||u||_i^2
    double margin = 0.0;
    bool pass = false;
};

// margins: (Lu|u)_i + 3/2 ||u||_i^2 for i <= 4, |(Lu|u)_5 + ||u||_5^2|, (Lu|u) + ||u||^2;
// each passes when <= tol * ||u||_i^2
std::vector<DissipativityRow> dissipativity_report(const AxisPolyPair& u, const GridPtr& g, double tol = 1e-8);
std::vector<DissipativityRow> dissipativity_report(const FieldPair& u, double tol = 1e-8);

// relative defect |F(Lu, u) + F(u, u)| / F(u, u) of the zeta-only final form, any supported d
double final_form_decay(const AxisPolyPair& u, int d);

// H^3 x H^2 norm on the unit ball
double sobolev_pair_norm(const AxisPolyPair& u, const GridPtr& g);
double sobolev_pair_norm(const FieldPair& u);

struct NormEquivalence {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    std::vector<double> ratios;
};
NormEquivalence norm_equivalence_sample(int samples, int degree, std::uint64_t seed, const GridPtr& g);

}  // namespace blowup
