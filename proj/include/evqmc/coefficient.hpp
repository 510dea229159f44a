// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "evqmc/field.hpp"

namespace evqmc {

enum class Family { global_trig, disjoint_indicator, haar_overlap, custom };

std::string family_name(Family f);

// Affine-parametric diffusion coefficient a(y) = a0 + sum_j y_j a_j with
// y_j in [-1/2, 1/2]. rho is the positive nondecreasing weight sequence used
// by the derivative bounds and the QMC weights; it is scaled per family so
// that sup_x sum_j rho_j |a_j(x)| <= 1. decay_p in (0,1] is the summability
// exponent carried alongside (rho_j^{-1}) in l^p.
struct CoefficientExpansion {
    ScalarField a0;
    std::vector<ScalarField> terms; // term j is index j-1
    std::vector<double> rho;
    double decay_p = 1.0;
    Family family = Family::custom;
    double theta = 0.0;
    double scale = 0.0;

    int term_count() const { return static_cast<int>(terms.size()); }
};

// Families (all ridge functions of the first coordinate, a0 = 1):
//   global_trig:        a_j = scale j^-theta sin(j pi x),  rho_j = j^(theta-1)/(scale c_rho)
//   disjoint_indicator: a_j = scale j^-theta 1_{I_j} with the equal-width dyadic
//                       partition I_j = [(j-1) 2^-L, j 2^-L), L = ceil(log2 s_max),
//                       rho_j = j^theta / scale
//   haar_overlap:       hat functions on disjoint dyadic slabs S_l = [2^-l, 2^(1-l));
//                       level l holds 2^(l-1) hats of half-width 2^-l/(2^(l-1)+1)
//                       whose neighbors overlap, so at most two supports cover any
//                       point; amplitude scale 2^(-theta l), rho_j = 2^(theta l)/scale
// theta > 1 required. p = 0 selects a family default for decay_p.
CoefficientExpansion make_expansion(Family family, int s_max, double theta, double scale,
                                    double p = 0.0);

// a(y)(x) with the first y.size() terms active; y.size() <= term_count and
// every |y_j| <= 1/2
double evaluate_coefficient(const CoefficientExpansion& exp, std::span<const double> y,
                            const Point& x);

struct AdmissibilityReport {
    double alpha_min = 0.0;  // ess inf a0
    double alpha_max = 0.0;  // ess sup a0
    double Lambda0 = 0.0;    // || sum_j |a_j|/2 ||_inf
    double Lambda1 = 0.0;    // || sum_j rho_j |a_j| ||_inf
    bool admissible = false; // Lambda0 < alpha_min
    double margin = 0.0;     // alpha_min - Lambda0
};

// Exact closed forms for the piecewise families; grid sampling (10^4+1 points
// in x) for global_trig and custom expansions.
AdmissibilityReport validate_assumption(const CoefficientExpansion& exp);

struct TailBound {
    double tail_sum = 0.0; // sum_{j>s} rho_j^-1 up to the stored term count
    double bound = 0.0;    // min(p/(1-p), 1) ||rho^-1||_lp s^-(1/p-1); +inf at p = 1
};

// Stechkin tail estimate for the weight sequence of exp, 0 <= s <= term_count
TailBound stechkin_tail(const CoefficientExpansion& exp, double p, int s);

} // namespace evqmc
