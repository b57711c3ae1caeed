#pragma once

#include <vector>

#include "blowup/grid.hpp"
#include "blowup/polynomial.hpp"

namespace blowup {

// Jet of an axisymmetric f(xi) = F(z, q): the nodal values of d_z^a d_q^b F for a + b <= order.
// Every Cartesian derivative of f is a combination of these with coefficients built from
// the Kronecker delta, the axis vector and xi itself.
struct Jet {
    GridPtr grid;
    int order = 0;
    std::vector<std::vector<Nodal>> parts;  // parts[a][b]
    const Nodal& at(int a, int b) const { return parts[a][b]; }
};

Jet jet_of(const AxisPoly& f, const GridPtr& g, int order);   // exact
Jet jet_of(const ScalarField& f, int order);                   // spectral

// Full contraction sum over all index words I of length k of (d_I A)(d_I B), nodal.
Nodal contract(const Jet& a, const Jet& b, int k);

// (sum over |I| = k of the integral over the ball of |d_I f|^2)^{1/2}
double sobolev_seminorm(const ScalarField& f, int k, ResolutionWarning* warn = nullptr);
double sobolev_seminorm(const AxisPoly& f, const GridPtr& g, int k);

// Value of d_I f at the representative nodes for a given word of directions. Letters:
// 0 = axis, 1 = the fixed perpendicular direction, 2.. = distinct further directions.
Nodal directional_derivative(const Jet& f, const std::vector<int>& word);

}  // namespace blowup
