// SPDX-License-Identifier: Apache-2.0
#include "evqmc/coefficient.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace evqmc {

namespace {

constexpr int kGridPoints = 10000; // admissibility sampling: x_i = i / kGridPoints

int level_of(int j) { // haar_overlap: 1-based dyadic level, j = 1 -> 1, j in [2^(l-1), 2^l)
    int l = 1;
    while ((1 << l) <= j) ++l;
    return l;
}

double sup_weighted_abs_sum(const std::vector<ScalarField>& terms,
                            std::span<const double> weights) {
    double sup = 0.0;
    for (int i = 0; i <= kGridPoints; ++i) {
        const Point x{static_cast<double>(i) / kGridPoints, 0.5};
        double acc = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j)
            acc += weights[j] * std::abs(terms[j](x));
        if (acc > sup) sup = acc;
    }
    return sup;
}

} // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::global_trig: return "global-trig";
        case Family::disjoint_indicator: return "disjoint-indicator";
        case Family::haar_overlap: return "haar-overlap";
        case Family::custom: return "custom";
    }
    return "custom";
}

CoefficientExpansion make_expansion(Family family, int s_max, double theta, double scale,
                                    double p) {
    if (family == Family::custom)
        throw std::invalid_argument("make_expansion: custom expansions are built directly");
    if (s_max < 1) throw std::invalid_argument("make_expansion: s_max must be >= 1");
    if (!(theta > 1.0)) throw std::invalid_argument("make_expansion: theta must be > 1");
    if (!(scale > 0.0)) throw std::invalid_argument("make_expansion: scale must be > 0");
    if (p != 0.0 && !(p > 0.0 && p <= 1.0))
        throw std::invalid_argument("make_expansion: p must lie in (0, 1]");

    CoefficientExpansion exp;
    exp.family = family;
    exp.theta = theta;
    exp.scale = scale;
    exp.a0 = constant_field(1.0);
    exp.terms.reserve(static_cast<std::size_t>(s_max));
    exp.rho.reserve(static_cast<std::size_t>(s_max));

    switch (family) {
        case Family::global_trig: {
            for (int j = 1; j <= s_max; ++j) {
                const double amp = scale * std::pow(static_cast<double>(j), -theta);
                const double freq = std::numbers::pi * j;
                exp.terms.push_back(ScalarField{
                    [amp, freq](const Point& x) { return amp * std::sin(freq * x.x); },
                    std::nullopt});
            }
            // c_rho = sup_x sum_j j^-1 |sin(j pi x)| normalizes
            // sup_x sum_j rho_j |a_j| to 1 on the sampling grid
            std::vector<double> unscaled_rho(static_cast<std::size_t>(s_max));
            for (int j = 1; j <= s_max; ++j)
                unscaled_rho[static_cast<std::size_t>(j - 1)] =
                    std::pow(static_cast<double>(j), theta - 1.0) / scale;
            const double c_rho = sup_weighted_abs_sum(exp.terms, unscaled_rho);
            for (int j = 1; j <= s_max; ++j)
                exp.rho.push_back(std::pow(static_cast<double>(j), theta - 1.0) / (scale * c_rho));
            break;
        }
        case Family::disjoint_indicator: {
            int L = 0;
            while ((1 << L) < s_max) ++L;
            const double width = 1.0 / static_cast<double>(1 << L);
            for (int j = 1; j <= s_max; ++j) {
                const double amp = scale * std::pow(static_cast<double>(j), -theta);
                const double lo = (j - 1) * width;
                const double hi = j * width;
                exp.terms.push_back(ScalarField{
                    [amp, lo, hi](const Point& x) { return (x.x >= lo && x.x < hi) ? amp : 0.0; },
                    Interval{lo, hi}});
                exp.rho.push_back(std::pow(static_cast<double>(j), theta) / scale);
            }
            break;
        }
        case Family::haar_overlap: {
            for (int j = 1; j <= s_max; ++j) {
                const int l = level_of(j);
                const int count = 1 << (l - 1);
                const double slab_lo = std::ldexp(1.0, -l); // slab [2^-l, 2^(1-l))
                const double half_width = slab_lo / (count + 1);
                const double center = slab_lo + (j - count + 1) * half_width;
                const double amp = scale * std::pow(2.0, -theta * l);
                exp.terms.push_back(ScalarField{
                    [amp, center, half_width](const Point& x) {
                        const double t = 1.0 - std::abs(x.x - center) / half_width;
                        return t > 0.0 ? amp * t : 0.0;
                    },
                    Interval{center - half_width, center + half_width}});
                exp.rho.push_back(std::pow(2.0, theta * l) / scale);
            }
            break;
        }
        case Family::custom:
            break;
    }

    if (p != 0.0) {
        exp.decay_p = p;
    } else if (family == Family::global_trig) {
        exp.decay_p = std::min(1.0, 1.0 / (theta - 1.0) + 0.1);
    } else {
        exp.decay_p = std::min(1.0, 1.0 / theta + 0.1);
    }
    return exp;
}

double evaluate_coefficient(const CoefficientExpansion& exp, std::span<const double> y,
                            const Point& x) {
    if (static_cast<int>(y.size()) > exp.term_count())
        throw std::invalid_argument("evaluate_coefficient: more parameters than terms");
    for (double v : y)
        if (!(std::abs(v) <= 0.5 + 1e-12))
            throw std::invalid_argument("evaluate_coefficient: parameter outside [-1/2, 1/2]");
    double acc = exp.a0(x);
    for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0.0) acc += y[j] * exp.terms[j](x);
    return acc;
}

AdmissibilityReport validate_assumption(const CoefficientExpansion& exp) {
    if (!exp.a0.eval) throw std::invalid_argument("validate_assumption: missing a0");
    if (exp.rho.size() != exp.terms.size())
        throw std::invalid_argument("validate_assumption: rho length mismatch");
    for (std::size_t j = 0; j < exp.rho.size(); ++j) {
        if (!(exp.rho[j] > 0.0))
            throw std::invalid_argument("validate_assumption: rho must be positive");
        if (j > 0 && exp.rho[j] < exp.rho[j - 1])
            throw std::invalid_argument("validate_assumption: rho must be nondecreasing");
    }

    AdmissibilityReport rep;
    rep.alpha_min = std::numeric_limits<double>::infinity();
    rep.alpha_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kGridPoints; ++i) {
        const Point x{static_cast<double>(i) / kGridPoints, 0.5};
        const double v = exp.a0(x);
        if (v < rep.alpha_min) rep.alpha_min = v;
        if (v > rep.alpha_max) rep.alpha_max = v;
    }

    switch (exp.family) {
        case Family::disjoint_indicator:
            // disjoint supports: the sup is a single-term max, largest at j = 1
            rep.Lambda0 = 0.5 * exp.scale;
            rep.Lambda1 = 1.0;
            break;
        case Family::haar_overlap:
            // level-1 peak dominates; rho_j |a_j| peaks at exactly 1 everywhere
            rep.Lambda0 = 0.5 * exp.scale * std::pow(2.0, -exp.theta);
            rep.Lambda1 = 1.0;
            break;
        default: {
            std::vector<double> half(exp.terms.size(), 0.5);
            rep.Lambda0 = sup_weighted_abs_sum(exp.terms, half);
            rep.Lambda1 = sup_weighted_abs_sum(exp.terms, exp.rho);
            break;
        }
    }
    rep.margin = rep.alpha_min - rep.Lambda0;
    rep.admissible = rep.Lambda0 < rep.alpha_min;
    return rep;
}

TailBound stechkin_tail(const CoefficientExpansion& exp, double p, int s) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("stechkin_tail: p must lie in (0, 1]");
    const int count = exp.term_count();
    if (s < 0 || s > count) throw std::invalid_argument("stechkin_tail: s out of range");
    TailBound tb;
    for (int j = count; j > s; --j) tb.tail_sum += 1.0 / exp.rho[static_cast<std::size_t>(j - 1)];
    if (p == 1.0 || s == 0) {
        tb.bound = std::numeric_limits<double>::infinity();
        return tb;
    }
    double norm_p = 0.0;
    for (int j = count; j >= 1; --j)
        norm_p += std::pow(1.0 / exp.rho[static_cast<std::size_t>(j - 1)], p);
    const double norm = std::pow(norm_p, 1.0 / p);
    const double c0 = std::min(p / (1.0 - p), 1.0);
    tb.bound = c0 * norm * std::pow(static_cast<double>(s), -(1.0 / p - 1.0));
    return tb;
}

} // namespace evqmc
