#include "tracelab/modular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tracelab/parallel.hpp"

namespace tracelab {

std::vector<bigint> ramanujan_tau(std::size_t n_max) {
    if (n_max < 1) throw std::invalid_argument("ramanujan_tau: n_max must be >= 1");
    // Pentagonal-number expansion: prod(1-q^m) = sum_k (-1)^k q^{k(3k-1)/2},
    // k over Z, so each factor is a sparse series with O(sqrt(n)) terms.
    const std::size_t len = n_max;  // coefficients of q^0 .. q^{n_max-1}
    std::vector<std::pair<std::size_t, int>> pent{{0, 1}};
    for (i64 k = 1;; ++k) {
        i64 e1 = k * (3 * k - 1) / 2;
        i64 e2 = k * (3 * k + 1) / 2;
        int sign = (k % 2 == 0) ? 1 : -1;
        if (e1 >= i64(len)) break;
        pent.emplace_back(std::size_t(e1), sign);
        if (e2 < i64(len)) pent.emplace_back(std::size_t(e2), sign);
    }
    std::sort(pent.begin(), pent.end());

    std::vector<bigint> series(len, 0);
    series[0] = 1;
    for (int rep = 0; rep < 24; ++rep) {
        std::vector<bigint> next(len, 0);
        for (std::size_t i = 0; i < len; ++i) {
            if (series[i] == 0) continue;
            for (const auto& [e, c] : pent) {
                if (i + e >= len) break;
                if (c > 0) {
                    next[i + e] += series[i];
                } else {
                    next[i + e] -= series[i];
                }
            }
        }
        series = std::move(next);
    }
    // Delta = q * prod(1-q^m)^24, so tau(n) = series[n-1].
    std::vector<bigint> tau(n_max + 1, 0);
    for (std::size_t n = 1; n <= n_max; ++n) tau[n] = series[n - 1];
    return tau;
}

CuspFormCoeffs delta_coefficients(std::size_t n_max) {
    std::vector<bigint> tau = ramanujan_tau(n_max);
    CuspFormCoeffs f;
    f.label = "Delta";
    f.weight = 12;
    f.level = 1;
    f.rho.assign(n_max + 1, 0.0);
    for (std::size_t n = 1; n <= n_max; ++n) {
        f.rho[n] = tau[n].convert_to<double>() / std::pow(double(n), 5.5);
    }
    return f;
}

namespace {

double bump(double P, double x) {
    double t = (2.0 * x - 3.0 * P) / P;
    if (t <= -1.0 || t >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// Grid certificate for sup_x |x^v V^(v)(x)|^{1/v}, v = 1..4, central
// differences on a stencil fine enough for this fixed bump shape.
double certify_q(double P) {
    const double h = P * 1e-3;
    const int grid = 4000;
    double q = 1.0;
    for (int i = 1; i < grid; ++i) {
        double x = P + (double(i) / grid) * P;
        double f[9];
        for (int s = -4; s <= 4; ++s) f[s + 4] = bump(P, x + s * h);
        double d1 = (f[5] - f[3]) / (2 * h);
        double d2 = (f[5] - 2 * f[4] + f[3]) / (h * h);
        double d3 = (f[6] - 2 * f[5] + 2 * f[3] - f[2]) / (2 * h * h * h);
        double d4 = (f[6] - 4 * f[5] + 6 * f[4] - 4 * f[3] + f[2]) / (h * h * h * h);
        double ds[4] = {d1, d2, d3, d4};
        for (int v = 1; v <= 4; ++v) {
            double val = std::abs(std::pow(x, v) * ds[v - 1]);
            if (val > 0.0) q = std::max(q, std::pow(val, 1.0 / v));
        }
    }
    return q;
}

}  // namespace

TestFunctionV::TestFunctionV(double P) : p_(P) {
    if (P <= 0.0) throw std::invalid_argument("TestFunctionV: P must be positive");
    q_ = certify_q(P);
}

double TestFunctionV::operator()(double x) const { return bump(p_, x); }

cplx twisted_sum(const CuspFormCoeffs& f, const WeightTable& K, const TestFunctionV& V, u32 p) {
    if (p != K.p()) {
        throw std::invalid_argument("twisted_sum: weight table is modulo a different prime");
    }
    const std::size_t n_hi = static_cast<std::size_t>(std::floor(2.0 * V.P() * double(p)));
    if (f.n_max() < n_hi) {
        throw std::invalid_argument("twisted_sum: need coefficients up to n = " +
                                    std::to_string(n_hi) + ", have " + std::to_string(f.n_max()));
    }
    const std::size_t n_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(V.P() * double(p))));
    cplx acc{0.0, 0.0};
    for (std::size_t n = n_lo; n <= n_hi; ++n) {
        acc += f.rho[n] * K.at_int(static_cast<i64>(n)) * V(double(n) / double(p));
    }
    return acc;
}

cplx linear_phase_sum(const CuspFormCoeffs& f, double alpha, std::size_t x) {
    if (f.n_max() < x) {
        throw std::invalid_argument("linear_phase_sum: need coefficients up to n = " +
                                    std::to_string(x));
    }
    const double two_pi = 2.0 * std::numbers::pi;
    cplx acc{0.0, 0.0};
    for (std::size_t n = 1; n <= x; ++n) {
        double t = two_pi * alpha * double(n);
        acc += f.rho[n] * cplx{std::cos(t), std::sin(t)};
    }
    return acc;
}

double rankin_partial(const CuspFormCoeffs& f, std::size_t x) {
    if (x < 1 || f.n_max() < x) {
        throw std::invalid_argument("rankin_partial: x out of range");
    }
    double acc = 0.0;
    for (std::size_t n = 1; n <= x; ++n) acc += f.rho[n] * f.rho[n];
    return acc / double(x);
}

ExponentScanReport exponent_scan(const CuspFormCoeffs& f, const WeightSpec& family,
                                 const std::vector<u32>& primes, double P, int threads) {
    if (primes.size() < 3) {
        throw std::invalid_argument("exponent_scan: need at least 3 primes");
    }
    if (!std::is_sorted(primes.begin(), primes.end())) {
        throw std::invalid_argument("exponent_scan: primes must be sorted ascending");
    }
    TestFunctionV V(P);
    ExponentScanReport report;
    report.weight_label = family.label();
    report.P = P;
    report.Q = V.Q();
    report.rows.resize(primes.size());

    parallel_chunks(primes.size(), 1, resolve_threads(threads),
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            u32 p = primes[i];
                            PrimeContext ctx(p);
                            WeightTable K = make_weight(ctx, family);
                            cplx s = twisted_sum(f, K, V, p);
                            ExponentScanRow row;
                            row.p = p;
                            row.value = s;
                            double av = std::abs(s);
                            row.local_exponent = av > 0.0 ? std::log(av) / std::log(double(p)) : 0.0;
                            report.rows[i] = row;
                        }
                    });

    // OLS of log|S| on log p, dropping numerically dead rows.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& row : report.rows) {
        double av = std::abs(row.value);
        if (av < 1e-8) continue;
        double lx = std::log(double(row.p));
        double ly = std::log(av);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    report.used = n;
    if (n >= 2) {
        double denom = double(n) * sxx - sx * sx;
        report.slope = (double(n) * sxy - sx * sy) / denom;
        report.intercept = (sy - report.slope * sx) / double(n);
        double ss = 0.0;
        for (const auto& row : report.rows) {
            double av = std::abs(row.value);
            if (av < 1e-8) continue;
            double pred = report.intercept + report.slope * std::log(double(row.p));
            double res = std::log(av) - pred;
            ss += res * res;
        }
        report.residual_rms = std::sqrt(ss / double(n));
    }
    return report;
}

std::vector<u32> log_spaced_primes(u32 lo, u32 hi, std::size_t count) {
    if (lo < 3 || hi <= lo || count < 1) {
        throw std::invalid_argument("log_spaced_primes: bad window");
    }
    auto next_prime = [](u32 n) {
        while (!is_prime_u32(n)) ++n;
        return n;
    };
    std::vector<u32> out;
    const double llo = std::log(double(lo));
    const double lhi = std::log(double(hi));
    for (std::size_t i = 0; i < count; ++i) {
        double frac = count == 1 ? 0.0 : double(i) / double(count - 1);
        u32 target = static_cast<u32>(std::lround(std::exp(llo + frac * (lhi - llo))));
        u32 p = next_prime(target);
        if (out.empty() || p > out.back()) out.push_back(p);
    }
    return out;
}

}  // namespace tracelab
