#pragma once

#include <vector>

#include "blowup/special.hpp"

namespace blowup {

// Hypergeometric triple of the radial spectral problem in d = 5.
struct SpectralParams {
    cplx lambda;
    int l = 0;
    int d = 5;
    cplx a, b, c;
    SpectralParams(cplx lambda_, int l_, int d_ = 5);
};

// 1 / (Gamma(a) Gamma(b)); vanishes exactly at the eigenvalues
cplx mode_indicator(const SpectralParams& p);

struct ScanPoint {
    double re = 0.0, im = 0.0;
    int l = 0;
    double modulus = 0.0;
};

struct ModeScanOptions {
    int re_lo = -49;   // Re lambda = k * step, k in [re_lo, re_hi]
    int re_hi = 150;
    int im_hi = 250;   // Im lambda = m * step, |m| <= im_hi
    double step = 0.02;
    int lmax = 8;
    double flag_tol = 1e-8;
    double separation = 1e-3;
    int heat_stride = 5;  // keep every stride-th point in both axes for the heat map
    int jobs = 1;
};

struct ModeScan {
    std::vector<ScanPoint> flagged;
    std::vector<double> min_nonadjacent;  // per l: min |s| away from flags and their neighbours
    std::vector<ScanPoint> heat;
    long points = 0;
    bool flags_exact = false;     // flagged set is exactly {(1, 0), (0, 1)}
    bool separated = false;       // every min_nonadjacent exceeds the separation threshold
};

ModeScan mode_stability_scan(const ModeScanOptions& opt);

// Closed forms of the auxiliary problem (a = (5 + 2l)/4) and their series counterparts.
double phi0_closed(int l, double z);
double phi1_closed(int l, double z);
double phi0_closed_d1(int l, double z);
double phi1_closed_d1(int l, double z);
double phi0_series(int l, double z);
double phi1_series(int l, double z);

struct ClosedFormCheck {
    double max_err_phi0 = 0.0;  // absolute, z in [0, 0.9]
    double max_err_phi1 = 0.0;  // relative, z in [0.1, 0.9] (phi1 is singular at z = 0)
};
ClosedFormCheck closed_form_check(int lmax, int samples = 91);

struct WronskianCheck {
    double max_rel_error = 0.0;
    bool negative = true;
};
// W(psi_0, psi_1)(rho) against -2^{l+3/2} / (rho^2 (1 - rho^2)^{3/2})
WronskianCheck wronskian_check(int l, const std::vector<double>& rhos);

// Residual of the hypergeometric equation for w0 (analytic at 0) and w1 (analytic at 1),
// relative to the magnitude of its three terms.
struct HypResidual {
    double w0 = 0.0;
    double w1 = 0.0;
    bool w1_defined = true;  // false when a + b + 1 - c is a non-positive integer
};
HypResidual hyp_ode_residual(const SpectralParams& p, const std::vector<double>& zs);
// Same residual for 2F1(a, b; c; z) with derivatives from a sixth-order central difference.
double hyp_ode_residual_fd(cplx a, cplx b, cplx c, const std::vector<double>& zs, double h = 1e-2);

struct MultiplicityCheck {
    double max_residual = 0.0;        // of u'' + 4u'/rho - 4u/rho^2 + rho/(1 - rho^2)
    double homogeneous_residual = 0.0;
    double wronskian_error = 0.0;     // relative, against -5 rho^{-4}
    bool second_derivative_monotone = false;  // |u''| increases along rho = 1 - 10^{-k}
    std::vector<double> probe_rho;
    std::vector<double> probe_u2;     // u'' at the probe points
    std::vector<double> log_slope;    // u'(rho) / log(1 - rho), tends to 1/2 since u'' ~ -1/(2 (1 - rho))
};

// closed-form solution with c1 = 0; u, u', u''
double multiplicity_solution(double rho, double c0, int derivative);
MultiplicityCheck multiplicity_ode_check(const std::vector<double>& rhos, double c0);

}  // namespace blowup
