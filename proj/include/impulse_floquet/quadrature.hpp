#pragma once

#include <functional>
#include <span>
#include <vector>

namespace impulse_floquet::quadrature {

using Integrand = std::function<double(double)>;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussRule& gauss_legendre_rule(int n);

/// Fixed-order Gauss-Legendre estimate on [lo, hi].
double gauss_legendre(const Integrand& f, double lo, double hi, int n = 10);

/// Globally adaptive Gauss-Legendre: bisects the subinterval with the largest
/// whole-vs-halves difference until the summed difference is below
/// rel_tol * scale, where scale is a coarse estimate of the integral of |f|
/// (or abs_floor if larger). At most 4096 subintervals are used.
double adaptive(const Integrand& f, double lo, double hi, double rel_tol,
                double abs_floor = 1e-300);

/// Roots of f on [lo, hi] found by sampling at Gauss nodes of `cells` equal
/// cells, bracketing sign changes, and bisecting to `resolution`. Exact zeros
/// at sample points are returned as roots. Roots of even multiplicity that
/// never change sign between samples are not detected.
std::vector<double> sign_changes(const Integrand& f, double lo, double hi, double resolution,
                                 int cells = 16);

/// Bisection on a bracket with f(lo) and f(hi) of opposite sign.
double bisect(const Integrand& f, double lo, double hi, double resolution);

/// Golden-section search for the maximum of f on [lo, hi].
double golden_maximize(const Integrand& f, double lo, double hi, double resolution);

}  // namespace impulse_floquet::quadrature
