// SPDX-License-Identifier: Apache-2.0
#include "evqmc/lattice.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "evqmc/numformat.hpp"
#include "evqmc/parallel.hpp"
#include "evqmc/rng.hpp"
#include "evqmc/stats.hpp"

namespace evqmc {

namespace {

double bernoulli2(double x) { return x * x - x + 1.0 / 6.0; }

} // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::uint64_t euler_totient(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("euler_totient: n must be >= 1");
    std::uint64_t result = n, m = n;
    for (std::uint64_t p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            result -= result / p;
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

double zeta_series(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("zeta_series: s must be > 1");
    constexpr int K = 1000;
    double sum = 0.0;
    for (int k = K - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    // Euler-Maclaurin tail from K: integral + 1/2 f(K) - B2/2 f'(K) - B4/24 f'''(K);
    // remainder ~ s^5 K^(-s-5)/30240 < 1e-12 for all s > 1
    const double fK = std::pow(static_cast<double>(K), -s);
    const double tail = static_cast<double>(K) * fK / (s - 1.0) + 0.5 * fK +
                        s * fK / (12.0 * K) -
                        s * (s + 1.0) * (s + 2.0) * fK / (720.0 * K * K * K);
    return sum + tail;
}

double lambda_w_from_p(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("lambda_w_from_p: p must lie in (0, 1]");
    if (p <= 2.0 / 3.0) return 1.0 / (2.0 * (1.0 - 0.05));
    return p / (2.0 - p);
}

ProductWeights weights_from_rho(std::span<const double> rho, double eta, double lambda_w) {
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("weights_from_rho: eta must be positive and finite");
    if (!(lambda_w > 0.5 && lambda_w <= 1.0))
        throw std::invalid_argument("weights_from_rho: lambda_w must lie in (1/2, 1]");
    const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
    const double c = 2.0 * zeta_series(2.0 * lambda_w) / std::pow(two_pi_sq, lambda_w);
    ProductWeights w;
    w.lambda_w = lambda_w;
    w.gamma.reserve(rho.size());
    for (double r : rho) {
        if (!(r > 0.0)) throw std::invalid_argument("weights_from_rho: rho must be positive");
        const double deriv_sq = 1.0 / ((eta * r) * (eta * r));
        w.gamma.push_back(std::pow(deriv_sq / c, 1.0 / (1.0 + lambda_w)));
    }
    return w;
}

double worst_case_error_sq(std::span<const std::uint64_t> z, std::uint64_t N,
                           const ProductWeights& weights) {
    if (N < 1 || N > (1ULL << 31)) throw std::invalid_argument("worst_case_error_sq: bad N");
    if (z.size() > weights.gamma.size())
        throw std::invalid_argument("worst_case_error_sq: more components than weights");
    for (std::uint64_t zj : z)
        if (zj < 1 || (N > 1 && zj >= N))
            throw std::invalid_argument("worst_case_error_sq: z_j outside [1, N-1]");
    if (z.size() == 1) {
        // k z mod N sweeps the multiples of g = gcd(z, N), each g times. Summing
        // in residue order makes the rounded value independent of z within a gcd
        // class, so the exact 1D tie between unit generators survives in floats.
        const std::uint64_t g = std::gcd(z[0], N);
        double sum = 0.0;
        for (std::uint64_t m = 0; m < N; m += g)
            sum += 1.0 + weights.gamma[0] *
                             bernoulli2(static_cast<double>(m) / static_cast<double>(N));
        return -1.0 + sum * static_cast<double>(g) / static_cast<double>(N);
    }
    double sum = 0.0;
    for (std::uint64_t k = 0; k < N; ++k) {
        double prod = 1.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double frac = static_cast<double>((k * z[j]) % N) / static_cast<double>(N);
            prod *= 1.0 + weights.gamma[j] * bernoulli2(frac);
        }
        sum += prod;
    }
    return -1.0 + sum / static_cast<double>(N);
}

LatticeRule cbc_construct(int s, std::uint64_t N, const ProductWeights& weights) {
    if (s < 1) throw std::invalid_argument("cbc_construct: s must be >= 1");
    if (!is_prime(N)) throw std::invalid_argument("cbc_construct: N must be prime");
    if (static_cast<std::size_t>(s) > weights.gamma.size())
        throw std::invalid_argument("cbc_construct: fewer weights than dimensions");

    // B2 at the exact rationals m/N
    std::vector<double> b2(N);
    for (std::uint64_t m = 0; m < N; ++m)
        b2[m] = bernoulli2(static_cast<double>(m) / static_cast<double>(N));

    std::vector<double> prod(N, 1.0);
    LatticeRule rule;
    rule.s = s;
    rule.N = N;
    rule.weights = weights;
    rule.weights.gamma.resize(static_cast<std::size_t>(s));
    rule.z.reserve(static_cast<std::size_t>(s));

    for (int j = 0; j < s; ++j) {
        const double gamma = weights.gamma[static_cast<std::size_t>(j)];
        std::uint64_t best_z = 1;
        if (j > 0) {
            // the first component is a free choice (every unit z generates the
            // same 1D point set), so the scan starts with the second dimension
            double best_e = std::numeric_limits<double>::infinity();
            for (std::uint64_t zc = 1; zc < N; ++zc) {
                double sum = 0.0;
                std::uint64_t m = 0;
                for (std::uint64_t k = 0; k < N; ++k) {
                    sum += prod[k] * (1.0 + gamma * b2[m]);
                    m += zc;
                    if (m >= N) m -= N;
                }
                const double e = -1.0 + sum / static_cast<double>(N);
                if (e < best_e) { // strict: ties keep the smallest candidate
                    best_e = e;
                    best_z = zc;
                }
            }
        }
        rule.z.push_back(best_z);
        std::uint64_t m = 0;
        for (std::uint64_t k = 0; k < N; ++k) {
            prod[k] *= 1.0 + gamma * b2[m];
            m += best_z;
            if (m >= N) m -= N;
        }
    }
    rule.wce_sq = worst_case_error_sq(rule.z, N, rule.weights);
    return rule;
}

void lattice_point(const LatticeRule& rule, std::uint64_t i, std::span<const double> shift,
                   std::span<double> out) {
    if (shift.size() != static_cast<std::size_t>(rule.s) || out.size() != shift.size())
        throw std::invalid_argument("lattice_point: dimension mismatch");
    if (i < 1 || i > rule.N) throw std::invalid_argument("lattice_point: index outside [1, N]");
    for (std::size_t j = 0; j < shift.size(); ++j) {
        const double delta = shift[j] - std::floor(shift[j]); // reduce mod 1 first
        const std::uint64_t m = (i * rule.z[j]) % rule.N;
        double v = static_cast<double>(m) / static_cast<double>(rule.N) + delta;
        if (v >= 1.0) v -= 1.0;
        out[j] = v - 0.5;
    }
}

QmcResult qmc_estimate(const std::function<double(std::span<const double>)>& F,
                       const LatticeRule& rule, int R, std::uint64_t seed) {
    if (R < 1) throw std::invalid_argument("qmc_estimate: R must be >= 1");
    if (!F) throw std::invalid_argument("qmc_estimate: empty integrand");
    const std::size_t s = static_cast<std::size_t>(rule.s);
    const std::size_t N = rule.N;
    std::vector<std::vector<double>> shifts(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        auto g = SplitMix64::stream(seed, static_cast<std::uint64_t>(r));
        shifts[static_cast<std::size_t>(r)].resize(s);
        for (std::size_t j = 0; j < s; ++j) shifts[static_cast<std::size_t>(r)][j] = g.next_unit();
    }

    std::vector<double> values(static_cast<std::size_t>(R) * N);
    parallel_for(values.size(), [&](std::size_t idx) {
        const std::size_t r = idx / N;
        const std::uint64_t i = static_cast<std::uint64_t>(idx % N) + 1;
        std::vector<double> pt(s);
        lattice_point(rule, i, shifts[r], pt);
        values[idx] = F(pt);
    });

    QmcResult res;
    res.shift_means.resize(static_cast<std::size_t>(R));
    for (int r = 0; r < R; ++r) {
        std::span<const double> block(values.data() + static_cast<std::size_t>(r) * N, N);
        res.shift_means[static_cast<std::size_t>(r)] = anchored_mean(block);
    }
    res.mean = anchored_mean(res.shift_means);
    res.std_error = mean_std_error(res.shift_means);
    return res;
}

double theoretical_error_bound(const ProductWeights& weights, std::uint64_t N,
                               double norm_bound, bool use_totient) {
    const double lw = weights.lambda_w;
    if (!(lw > 0.5 && lw <= 1.0))
        throw std::invalid_argument("theoretical_error_bound: lambda_w must lie in (1/2, 1]");
    const double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
    const double c = 2.0 * zeta_series(2.0 * lw) / std::pow(two_pi_sq, lw);
    double prod = 1.0;
    for (double g : weights.gamma) {
        if (g < 0.0) throw std::invalid_argument("theoretical_error_bound: negative weight");
        prod *= 1.0 + std::pow(g, lw) * c;
    }
    const double denom = use_totient ? static_cast<double>(euler_totient(N)) : static_cast<double>(N);
    return std::pow(prod, 1.0 / (2.0 * lw)) * std::pow(denom, -1.0 / (2.0 * lw)) * norm_bound;
}

void save_rule(std::ostream& os, const LatticeRule& rule) {
    os << rule.s << ' ' << rule.N << ' ' << format_double(rule.weights.lambda_w) << '\n';
    for (int j = 0; j < rule.s; ++j)
        os << (j + 1) << ' ' << rule.z[static_cast<std::size_t>(j)] << ' '
           << format_double(rule.weights.gamma[static_cast<std::size_t>(j)]) << '\n';
}

LatticeRule load_rule(std::istream& is) {
    LatticeRule rule;
    std::string lw;
    if (!(is >> rule.s >> rule.N >> lw)) throw std::runtime_error("load_rule: bad header");
    if (!parse_double(lw, rule.weights.lambda_w)) throw std::runtime_error("load_rule: bad lambda_w");
    rule.z.resize(static_cast<std::size_t>(rule.s));
    rule.weights.gamma.resize(static_cast<std::size_t>(rule.s));
    for (int j = 0; j < rule.s; ++j) {
        int idx = 0;
        std::string g;
        if (!(is >> idx >> rule.z[static_cast<std::size_t>(j)] >> g) || idx != j + 1)
            throw std::runtime_error("load_rule: bad line for dimension " + std::to_string(j + 1));
        if (!parse_double(g, rule.weights.gamma[static_cast<std::size_t>(j)]))
            throw std::runtime_error("load_rule: bad gamma for dimension " + std::to_string(j + 1));
    }
    rule.wce_sq = worst_case_error_sq(rule.z, rule.N, rule.weights);
    return rule;
}

} // namespace evqmc
