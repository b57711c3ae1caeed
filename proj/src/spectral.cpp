#include "blowup/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "blowup/errors.hpp"

namespace blowup {

SpectralParams::SpectralParams(cplx lambda_, int l_, int d_) : lambda(lambda_), l(l_), d(d_) {
    if (d != 5) throw UnsupportedDimension("hypergeometric reduction implemented for d = 5");
    if (l < 0) throw DomainError("harmonic degree must be non-negative");
    a = 0.5 * (lambda + double(l) - 1.0);
    b = 0.5 * (lambda + double(l) + 4.0);
    c = 2.5 + l;
}

cplx mode_indicator(const SpectralParams& p) { return rgamma(p.a) * rgamma(p.b); }

ModeScan mode_stability_scan(const ModeScanOptions& opt) {
    const int nre = opt.re_hi - opt.re_lo + 1, nim = 2 * opt.im_hi + 1;
    std::vector<std::vector<double>> mod(opt.lmax + 1, std::vector<double>(size_t(nre) * nim));
    auto work = [&](int l) {
        for (int k = 0; k < nre; ++k)
            for (int m = 0; m < nim; ++m) {
                const cplx lam((opt.re_lo + k) * opt.step, (m - opt.im_hi) * opt.step);
                mod[l][size_t(k) * nim + m] = std::abs(mode_indicator(SpectralParams(lam, l)));
            }
    };
    const int jobs = std::max(1, opt.jobs);
    for (int start = 0; start <= opt.lmax; start += jobs) {
        std::vector<std::thread> pool;
        for (int l = start; l <= std::min(opt.lmax, start + jobs - 1); ++l) pool.emplace_back(work, l);
        for (auto& t : pool) t.join();
    }
    ModeScan out;
    out.points = long(opt.lmax + 1) * nre * nim;
    out.min_nonadjacent.assign(opt.lmax + 1, 1e300);
    for (int l = 0; l <= opt.lmax; ++l) {
        std::vector<std::pair<int, int>> flags;
        for (int k = 0; k < nre; ++k)
            for (int m = 0; m < nim; ++m) {
                const double v = mod[l][size_t(k) * nim + m];
                if (v < opt.flag_tol) {
                    flags.emplace_back(k, m);
                    out.flagged.push_back({(opt.re_lo + k) * opt.step, (m - opt.im_hi) * opt.step, l, v});
                }
                if (k % opt.heat_stride == 0 && m % opt.heat_stride == 0)
                    out.heat.push_back({(opt.re_lo + k) * opt.step, (m - opt.im_hi) * opt.step, l, v});
            }
        for (int k = 0; k < nre; ++k)
            for (int m = 0; m < nim; ++m) {
                bool adjacent = false;
                for (const auto& [fk, fm] : flags) adjacent |= std::abs(fk - k) <= 1 && std::abs(fm - m) <= 1;
                if (!adjacent) out.min_nonadjacent[l] = std::min(out.min_nonadjacent[l], mod[l][size_t(k) * nim + m]);
            }
    }
    auto is = [](const ScanPoint& p, double re, int l) {
        return std::abs(p.re - re) < 1e-12 && std::abs(p.im) < 1e-12 && p.l == l;
    };
    out.flags_exact = out.flagged.size() == 2 &&
                      std::any_of(out.flagged.begin(), out.flagged.end(), [&](auto& p) { return is(p, 1.0, 0); }) &&
                      std::any_of(out.flagged.begin(), out.flagged.end(), [&](auto& p) { return is(p, 0.0, 1); });
    out.separated = std::all_of(out.min_nonadjacent.begin(), out.min_nonadjacent.end(),
                                [&](double v) { return v > opt.separation; });
    return out;
}

// ---------------------------------------------------------------- closed forms

namespace {
double kappa(int l) { return 1.5 + l; }
double aux_a(int l) { return (5.0 + 2.0 * l) / 4.0; }
}  // namespace

double phi0_closed(int l, double z) {
    const double s = std::sqrt(1.0 - z);
    return std::pow(2.0 / (1.0 + s), kappa(l)) / s;
}

double phi1_closed(int l, double z) {
    const double s = std::sqrt(1.0 - z), k = kappa(l);
    return (std::pow(1.0 - s, -k) - std::pow(1.0 + s, -k)) / ((3.0 + 2.0 * l) * s);
}

double phi0_closed_d1(int l, double z) {
    const double s = std::sqrt(1.0 - z);
    return phi0_closed(l, z) * (1.0 / (2.0 * s * s) + kappa(l) / (2.0 * s * (1.0 + s)));
}

double phi1_closed_d1(int l, double z) {
    const double s = std::sqrt(1.0 - z), k = kappa(l), ds = -1.0 / (2.0 * s);
    const double P = std::pow(1.0 - s, -k) - std::pow(1.0 + s, -k);
    const double dP = k * ds * (std::pow(1.0 - s, -k - 1.0) + std::pow(1.0 + s, -k - 1.0));
    return (dP * s - P * ds) / ((3.0 + 2.0 * l) * s * s);
}

double phi0_series(int l, double z) {
    const double a = aux_a(l);
    return hyp2f1(a, a + 0.5, 2.0 * a, z).real();
}

double phi1_series(int l, double z) {
    const double a = aux_a(l);
    return hyp2f1(a, a + 0.5, 1.5, 1.0 - z).real();
}

ClosedFormCheck closed_form_check(int lmax, int samples) {
    ClosedFormCheck c;
    for (int l = 0; l <= lmax; ++l)
        for (int k = 0; k < samples; ++k) {
            const double z = 0.9 * k / (samples - 1);
            c.max_err_phi0 = std::max(c.max_err_phi0, std::abs(phi0_closed(l, z) - phi0_series(l, z)));
            const double z1 = 0.1 + 0.8 * k / (samples - 1);
            const double ref = phi1_series(l, z1);
            c.max_err_phi1 = std::max(c.max_err_phi1, std::abs(phi1_closed(l, z1) - ref) / std::abs(ref));
        }
    return c;
}

WronskianCheck wronskian_check(int l, const std::vector<double>& rhos) {
    WronskianCheck w;
    for (double rho : rhos) {
        const double z = rho * rho;
        const double pl = std::pow(rho, l + 1), dpl = (l + 1) * std::pow(rho, l);
        const double p0 = pl * phi0_closed(l, z), p1 = pl * phi1_closed(l, z);
        const double d0 = dpl * phi0_closed(l, z) + pl * 2.0 * rho * phi0_closed_d1(l, z);
        const double d1 = dpl * phi1_closed(l, z) + pl * 2.0 * rho * phi1_closed_d1(l, z);
        const double W = p0 * d1 - d0 * p1;
        const double ref = -std::pow(2.0, l + 1.5) / (z * std::pow(1.0 - z, 1.5));
        w.max_rel_error = std::max(w.max_rel_error, std::abs(W - ref) / std::abs(ref));
        w.negative = w.negative && W < 0.0;
    }
    return w;
}

namespace {
double hyp_residual(cplx a, cplx b, cplx c, double z, cplx w, cplx w1, cplx w2) {
    const cplx t1 = z * (1.0 - z) * w2, t2 = (c - (a + b + 1.0) * z) * w1, t3 = a * b * w;
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), 1e-300});
    return std::abs(t1 + t2 - t3) / scale;
}
}  // namespace

HypResidual hyp_ode_residual(const SpectralParams& p, const std::vector<double>& zs) {
    HypResidual r;
    const cplx a = p.a, b = p.b, c = p.c, c1 = a + b + 1.0 - c;
    r.w1_defined = !(c1.imag() == 0.0 && c1.real() <= 0.0 && c1.real() == std::round(c1.real()));
    for (double z : zs) {
        r.w0 = std::max(r.w0, hyp_residual(a, b, c, z, hyp2f1(a, b, c, z), hyp2f1_d1(a, b, c, z), hyp2f1_d2(a, b, c, z)));
        if (!r.w1_defined) continue;
        const double w = 1.0 - z;
        r.w1 = std::max(r.w1, hyp_residual(a, b, c, z, hyp2f1(a, b, c1, w), -hyp2f1_d1(a, b, c1, w),
                                           hyp2f1_d2(a, b, c1, w)));
    }
    return r;
}

double hyp_ode_residual_fd(cplx a, cplx b, cplx c, const std::vector<double>& zs, double h) {
    double worst = 0.0;
    for (double z : zs) {
        cplx f[7];
        for (int k = -3; k <= 3; ++k) f[k + 3] = hyp2f1(a, b, c, z + k * h);
        const cplx d1 = (-f[0] + 9.0 * f[1] - 45.0 * f[2] + 45.0 * f[4] - 9.0 * f[5] + f[6]) / (60.0 * h);
        const cplx d2 =
            (2.0 * f[0] - 27.0 * f[1] + 270.0 * f[2] - 490.0 * f[3] + 270.0 * f[4] - 27.0 * f[5] + 2.0 * f[6]) /
            (180.0 * h * h);
        worst = std::max(worst, hyp_residual(a, b, c, z, f[3], d1, d2));
    }
    return worst;
}

// ---------------------------------------------------------------- multiplicity ODE

namespace {
// power series of the c0 = 0 solution: -sum_{k>=1} rho^{2k+1} / (2k (2k+5)), used where the
// closed form cancels
double multiplicity_series(double rho, int derivative) {
    double s = 0.0;
    const double r2 = rho * rho;
    double pw = 1.0;  // rho^{2k-2}
    for (int k = 1; k < 5000; ++k) {
        pw = (k == 1) ? 1.0 : pw * r2;
        double term;
        if (derivative == 0)
            term = pw * r2 * rho / (2.0 * k * (2.0 * k + 5.0));
        else if (derivative == 1)
            term = (2.0 * k + 1.0) * pw * r2 / (2.0 * k * (2.0 * k + 5.0));
        else
            term = (2.0 * k + 1.0) * pw * rho / (2.0 * k + 5.0);
        s += term;
        if (term < 1e-18 * std::abs(s)) break;
    }
    return -s;
}
}  // namespace

double multiplicity_solution(double rho, double c0, int derivative) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
    if (derivative < 0 || derivative > 2) throw DomainError("derivative order must be 0, 1 or 2");
    const double lin = derivative == 0 ? c0 * rho : (derivative == 1 ? c0 : 0.0);
    if (rho < 0.4) return lin + multiplicity_series(rho, derivative);
    const double r2 = rho * rho, om = 1.0 - r2;
    const double L1 = std::log1p(-r2), dL1 = -2.0 * rho / om, ddL1 = -2.0 * (1.0 + r2) / (om * om);
    const double L2 = 2.0 * std::atanh(rho), dL2 = 2.0 / om, ddL2 = 4.0 * rho / (om * om);
    const double P = rho + rho * r2 / 3.0 + rho * r2 * r2 / 5.0, dP = 1.0 + r2 + r2 * r2, ddP = 2.0 * rho + 4.0 * rho * r2;
    const double X = L2 / 10.0 - P / 5.0, dX = dL2 / 10.0 - dP / 5.0, ddX = ddL2 / 10.0 - ddP / 5.0;
    const double r4 = r2 * r2;
    switch (derivative) {
        case 0:
            return lin + rho * L1 / 10.0 + X / r4;
        case 1:
            return lin + L1 / 10.0 + rho * dL1 / 10.0 - 4.0 * X / (r4 * rho) + dX / r4;
        default:
            return lin + 2.0 * dL1 / 10.0 + rho * ddL1 / 10.0 + 20.0 * X / (r4 * r2) - 8.0 * dX / (r4 * rho) + ddX / r4;
    }
}

MultiplicityCheck multiplicity_ode_check(const std::vector<double>& rhos, double c0) {
    MultiplicityCheck m;
    for (double rho : rhos) {
        const double u = multiplicity_solution(rho, c0, 0), du = multiplicity_solution(rho, c0, 1),
                     ddu = multiplicity_solution(rho, c0, 2);
        const double res = ddu + 4.0 / rho * du - 4.0 / (rho * rho) * u + rho / (1.0 - rho * rho);
        m.max_residual = std::max(m.max_residual, std::abs(res));
        // fundamental pair rho and rho^{-4}
        const double r4 = std::pow(rho, -4.0);
        const double h1 = 0.0 + 4.0 / rho * 1.0 - 4.0 / (rho * rho) * rho;
        const double h2 = 20.0 * r4 / (rho * rho) + 4.0 / rho * (-4.0 * r4 / rho) - 4.0 / (rho * rho) * r4;
        m.homogeneous_residual = std::max({m.homogeneous_residual, std::abs(h1), std::abs(h2) / (20.0 * r4 / (rho * rho))});
        const double W = rho * (-4.0 * r4 / rho) - 1.0 * r4;
        m.wronskian_error = std::max(m.wronskian_error, std::abs(W + 5.0 * r4) / (5.0 * r4));
    }
    // growth of u'' toward the light cone
    m.second_derivative_monotone = true;
    for (int k = 2; k <= 9; ++k) {
        const double rho = 1.0 - std::pow(10.0, -k);
        m.probe_rho.push_back(rho);
        m.probe_u2.push_back(multiplicity_solution(rho, c0, 2));
        m.log_slope.push_back(multiplicity_solution(rho, c0, 1) / std::log(1.0 - rho));
        if (m.probe_u2.size() > 1 && !(std::abs(m.probe_u2.back()) > std::abs(m.probe_u2[m.probe_u2.size() - 2])))
            m.second_derivative_monotone = false;
    }
    return m;
}

}  // namespace blowup
