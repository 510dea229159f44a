// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace evqmc {

bool is_prime(std::uint64_t n);
std::uint64_t euler_totient(std::uint64_t n);

// zeta(s) for s > 1: direct series over k <= 1000 plus Euler-Maclaurin tail
// terms; remainder below 1e-12 across (1, 2] and shrinking for larger s
double zeta_series(double s);

// Product weights gamma_j with the wce exponent lambda_w in (1/2, 1].
// gamma_j = 0 is accepted as a degenerate input (kills coordinate j).
struct ProductWeights {
    std::vector<double> gamma;
    double lambda_w = 1.0;
};

// lambda_w = 1/(2(1-0.05)) for p <= 2/3, else the solution of
// 2 lambda/(1+lambda) = p, i.e. p/(2-p)
double lambda_w_from_p(double p);

// gamma_j = [ (eta rho_j)^-2 / (2 zeta(2 lambda_w) / (2 pi^2)^lambda_w) ]^(1/(1+lambda_w))
ProductWeights weights_from_rho(std::span<const double> rho, double eta, double lambda_w);

// Randomly shifted rank-1 lattice rule; wce_sq caches worst_case_error_sq(z, N).
struct LatticeRule {
    int s = 0;
    std::uint64_t N = 0;
    std::vector<std::uint64_t> z;
    ProductWeights weights;
    double wce_sq = 0.0;
};

// Shift-averaged squared worst-case error
//   e^2(z, N) = -1 + (1/N) sum_k prod_j (1 + gamma_j B2({k z_j / N})),
// B2(x) = x^2 - x + 1/6, fractional parts exact via integer arithmetic.
double worst_case_error_sq(std::span<const std::uint64_t> z, std::uint64_t N,
                           const ProductWeights& weights);

// Plain O(s N^2) component-by-component minimization of the wce over
// z_j in {1, .., N-1}; ties resolved to the smallest candidate. N must be
// prime (every candidate is then coprime with N).
LatticeRule cbc_construct(int s, std::uint64_t N, const ProductWeights& weights);

// Point i (1-based) of the shifted rule, componentwise {i z_j / N + shift_j} - 1/2.
// Shifts are reduced mod 1 by floor subtraction first, so integer offsets cancel
// exactly whenever shift +- 1 is representable (e.g. dyadic shifts).
void lattice_point(const LatticeRule& rule, std::uint64_t i, std::span<const double> shift,
                   std::span<double> out);

struct QmcResult {
    double mean = 0.0;
    double std_error = 0.0; // sample std over shift means / sqrt(R); 0 for R = 1
    std::vector<double> shift_means;
};

// Shift-averaged estimate of E[F] over R independent random shifts drawn from
// stream (seed, r). F receives points in [-1/2, 1/2)^s. Evaluations may run on
// the worker pool; aggregation is in fixed index order.
QmcResult qmc_estimate(const std::function<double(std::span<const double>)>& F,
                       const LatticeRule& rule, int R, std::uint64_t seed);

// prod_j (1 + gamma_j^lambda_w c)^(1/(2 lambda_w)) phi(N)^(-1/(2 lambda_w)) norm_bound
// with c = 2 zeta(2 lambda_w) / (2 pi^2)^lambda_w; use_totient = false swaps
// phi(N) for N (reported alongside for comparison).
double theoretical_error_bound(const ProductWeights& weights, std::uint64_t N,
                               double norm_bound, bool use_totient = true);

// text format: header "s N lambda_w", then one "j z_j gamma_j" line per dimension
void save_rule(std::ostream& os, const LatticeRule& rule);
LatticeRule load_rule(std::istream& is);

} // namespace evqmc
