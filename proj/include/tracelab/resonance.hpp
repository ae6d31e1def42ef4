#pragma once

/**
 * @file resonance.hpp
 * @brief The resonating-matrix identity: the complete two-variable
 *        character sum E(c,d,e,n1,n2) equals p times the correlation sum
 *        at gamma(c,d,e,n1,n2), evaluated by three independent routes.
 */

#include <cstdint>
#include <vector>

#include "tracelab/correlation.hpp"
#include "tracelab/weights.hpp"

namespace tracelab {

/**
 * @brief Parameters of one resonance check: level N >= 2 coprime to p,
 *        modulus piece c >= 1, amplifier divisors d, e coprime to pN, and
 *        dual variables n1, n2 with n1*n2 = e (mod cN), gcd(n2, cN) = 1.
 */
struct ResonanceInstance {
    const PrimeContext* ctx = nullptr;
    u32 N = 2;
    u64 c = 1;
    u64 d = 1;
    u64 e = 1;
    i64 n1 = 1;
    i64 n2 = 1;
};

/// Validate the congruence and coprimality requirements.
/// Throws std::invalid_argument on violation.
void validate_instance(const ResonanceInstance& inst);

/// Integer resonating matrix (n1, (n1 n2 - e)/(cN); cdN, d n2), det = d*e,
/// together with its reduction in PGL_2(F_p).
struct ResonatingMatrix {
    i64 a = 0, b = 0, c = 0, d = 0;
    PglElement mod_p;

    i64 det() const { return a * d - b * c; }
};

ResonatingMatrix gamma_of(const ResonanceInstance& inst);

/// E as the complete double sum over u1, u2 mod p of
/// K(u1) conj(K(u2)) S(e*inv(cdN)*u1, inv(cN)*u2; p) e((inv(cdN) u1 n1 + inv(cN) u2 n2)/p),
/// with the Kloosterman factor served from one precomputed O(p^2) row.
cplx E_direct(const ResonanceInstance& inst, const WeightTable& K);

/// E via the Fourier side: p * sum_{z != 0}
/// Khat(inv(cN)(inv(d) e z + inv(d) n1)) conj(Khat(-inv(cN)(z^{-1} + n2))).
/// `khat` must be the DFT of the weight used in E_direct.
cplx E_via_fourier(const ResonanceInstance& inst, const WeightTable& khat);

/// Twisted multiplicativity of Kloosterman sums for gcd(c1,c2) = 1:
/// S(m,n;c1 c2) = S(m*inv(c2)^2, n; c1) * S(m*inv(c1)^2, n; c2).
/// Returns true when both sides agree within tol.
bool kloosterman_twisted_mult_check(i64 m, i64 n, u64 c1, u64 c2, double tol = 1e-9);

/// Seeded instance sampler: c <= 10 uniform, d and e products of at most
/// two small primes avoiding p and the divisors of N, n2 uniform coprime
/// to cN, n1 the minimal-magnitude solution of the congruence.
std::vector<ResonanceInstance> sample_instances(const PrimeContext& ctx, u32 N,
                                                std::size_t count, u64 seed);

}  // namespace tracelab
