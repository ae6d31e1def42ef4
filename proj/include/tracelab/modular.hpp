#pragma once

/**
 * @file modular.hpp
 * @brief Holomorphic cusp-form coefficients at desk scale, dyadic test
 *        functions with certified derivative bounds, the twisted sums
 *        S_V(f,K;p) = sum_n rho_f(n) K(n) V(n/p), and empirical
 *        power-saving exponent scans across primes.
 */

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "tracelab/weights.hpp"

namespace tracelab {

using bigint = boost::multiprecision::cpp_int;

/**
 * @brief Normalized coefficients rho_f(n) = a_f(n) / n^{(k-1)/2} of a
 *        holomorphic Hecke eigenform, for n = 1..n_max.
 */
struct CuspFormCoeffs {
    std::string label;
    int weight = 0;
    int level = 1;
    /// 1-based: rho[n] is rho_f(n); rho[0] is unused and zero.
    std::vector<double> rho;

    std::size_t n_max() const { return rho.empty() ? 0 : rho.size() - 1; }
};

/// Ramanujan tau(n) for n = 1..n_max, exact, via the eta-power expansion
/// q * prod(1-q^m)^24 computed as eight sparse multiplications by the
/// cube eta series of the Jacobi identity. 1-based like rho.
std::vector<bigint> ramanujan_tau(std::size_t n_max);

/// The discriminant form Delta (k = 12, N = 1): rho(n) = tau(n)/n^{11/2}.
CuspFormCoeffs delta_coefficients(std::size_t n_max);

/**
 * @brief Smooth bump supported on [P, 2P]:
 *        V(x) = exp(1 - 1/(1-t^2)) with t = (2x-3P)/P.
 *
 * The derivative-bound certificate Q is measured on a grid: the largest
 * value of |x^v V^(v)(x)|^{1/v} for v <= 4, derivatives taken by central
 * differences, floored at 1.
 */
class TestFunctionV {
public:
    explicit TestFunctionV(double P);

    double operator()(double x) const;
    double P() const { return p_; }
    /// Certified derivative-bound constant.
    double Q() const { return q_; }

private:
    double p_;
    double q_;
};

inline TestFunctionV build_V(double P) { return TestFunctionV(P); }

/// S_V(f,K;p): the finite sum over n in [ceil(P p), floor(2 P p)], with K
/// extended by periodicity. Throws std::invalid_argument naming the
/// required length when f is too short.
cplx twisted_sum(const CuspFormCoeffs& f, const WeightTable& K, const TestFunctionV& V, u32 p);

/// sum_{n <= x} rho_f(n) e(alpha n).
cplx linear_phase_sum(const CuspFormCoeffs& f, double alpha, std::size_t x);

/// Rankin-Selberg partial average: sum_{n <= x} |rho_f(n)|^2 / x.
double rankin_partial(const CuspFormCoeffs& f, std::size_t x);

struct ExponentScanRow {
    u32 p = 0;
    cplx value{};
    /// log|S| / log p, the per-prime exponent.
    double local_exponent = 0.0;
};

struct ExponentScanReport {
    std::string weight_label;
    double P = 0.0;
    double Q = 0.0;
    std::vector<ExponentScanRow> rows;
    /// OLS fit of log|S| against log p over the retained rows.
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t used = 0;
};

/// For each prime, instantiate the weight family and measure |S_V|;
/// primes with |S_V| < 1e-8 are dropped from the fit. Requires at least
/// three primes and coefficients up to 2*P*max(primes).
ExponentScanReport exponent_scan(const CuspFormCoeffs& f, const WeightSpec& family,
                                 const std::vector<u32>& primes, double P, int threads = 1);

/// `count` primes spread evenly on a log scale across [lo, hi]: each the
/// smallest prime at or above its target, deduplicated, ascending.
std::vector<u32> log_spaced_primes(u32 lo, u32 hi, std::size_t count);

}  // namespace tracelab
