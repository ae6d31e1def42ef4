#pragma once

/**
 * @file fp_core.hpp
 * @brief Arithmetic in F_p and F_{p^2}, Dirichlet characters, and the
 *        unitary discrete Fourier transform modulo p.
 *
 * Everything is sized for desk-scale primes (p up to ~10^4): tables of
 * length p are precomputed eagerly and all transforms are direct O(p^2)
 * summations against cached roots of unity.
 */

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tracelab {

using cplx = std::complex<double>;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

/// (base^exp) mod m, with 64-bit intermediate products. m < 2^32.
u32 pow_mod(u32 base, u64 exp, u32 m);

/// Deterministic primality test by trial division (fine below 2^32).
bool is_prime_u32(u32 n);

/// Smallest primitive root modulo an odd prime p.
/// Throws std::invalid_argument if p is not an odd prime.
u32 primitive_root(u32 p);

/**
 * @brief Immutable per-prime arithmetic context.
 *
 * Holds the prime p, its smallest primitive root g, the discrete-log
 * table relative to g, an inverse table, a fixed quadratic non-residue,
 * and cached roots of unity of order p and p-1. Construction is O(p);
 * all lookups are O(1). Safe to share across threads after construction.
 */
class PrimeContext {
public:
    explicit PrimeContext(u32 p);

    u32 p() const { return p_; }
    u32 generator() const { return g_; }
    u32 qnr() const { return qnr_; }

    /// Discrete log base g: dlog(g^j) = j for j in [0, p-2]. x must be nonzero.
    u32 dlog(u32 x) const { return dlog_[x]; }

    u32 add(u32 x, u32 y) const { u32 s = x + y; return s >= p_ ? s - p_ : s; }
    u32 sub(u32 x, u32 y) const { return x >= y ? x - y : x + p_ - y; }
    u32 neg(u32 x) const { return x == 0 ? 0 : p_ - x; }
    u32 mul(u32 x, u32 y) const { return static_cast<u32>((u64(x) * y) % p_); }
    /// Inverse of nonzero x (table lookup).
    u32 inv(u32 x) const { return inv_[x]; }
    u32 pow(u32 x, u64 e) const { return pow_mod(x, e, p_); }

    /// Reduce an arbitrary signed integer into [0, p).
    u32 reduce(i64 n) const {
        i64 r = n % static_cast<i64>(p_);
        return static_cast<u32>(r < 0 ? r + p_ : r);
    }

    /// Legendre symbol (x/p) in {-1, 0, +1}.
    int legendre(u32 x) const;

    /// e(k/p) = exp(2*pi*i*k/p); k is reduced mod p internally.
    cplx unit_root_p(u64 k) const { return roots_p_[k % p_]; }

    /// e(k/(p-1)); k is reduced mod p-1 internally.
    cplx unit_root_order(u64 k) const { return roots_pm1_[k % (p_ - 1)]; }

    /// Square root in F_p (Tonelli-Shanks). Empty if x is a non-residue.
    std::optional<u32> sqrt(u32 x) const;

private:
    u32 p_ = 0;
    u32 g_ = 0;
    u32 qnr_ = 0;
    std::vector<u32> dlog_;
    std::vector<u32> inv_;
    std::vector<cplx> roots_p_;
    std::vector<cplx> roots_pm1_;
};

/// Element a + b*s of F_{p^2}, where s^2 = ctx.qnr().
struct Fp2Element {
    u32 a = 0;
    u32 b = 0;

    bool operator==(const Fp2Element&) const = default;
};

Fp2Element fp2_add(const PrimeContext& ctx, Fp2Element x, Fp2Element y);
Fp2Element fp2_sub(const PrimeContext& ctx, Fp2Element x, Fp2Element y);
Fp2Element fp2_mul(const PrimeContext& ctx, Fp2Element x, Fp2Element y);
/// Frobenius conjugate a - b*s.
Fp2Element fp2_conj(const PrimeContext& ctx, Fp2Element x);
/// Norm a^2 - qnr*b^2 in F_p.
u32 fp2_norm(const PrimeContext& ctx, Fp2Element x);

/**
 * @brief Multiplicative character mod p, indexed against the context's
 *        primitive root: chi(g^j) = e(index*j/(p-1)), chi(0) = 0.
 */
class DirichletCharacter {
public:
    DirichletCharacter(const PrimeContext& ctx, u32 index);

    const PrimeContext& context() const { return *ctx_; }
    u32 index() const { return index_; }

    /// Multiplicative order (p-1)/gcd(index, p-1); 1 for the trivial character.
    u32 order() const;
    bool is_trivial() const { return index_ == 0; }
    /// Real-valued and non-trivial, i.e. the Legendre character.
    bool is_real_nontrivial() const;

    cplx operator()(u32 x) const {
        if (x == 0) return {0.0, 0.0};
        return ctx_->unit_root_order(u64(index_) * ctx_->dlog(x));
    }

private:
    const PrimeContext* ctx_;
    u32 index_;
};

/// e(a*x/p).
inline cplx additive_char(const PrimeContext& ctx, u32 a, u32 x) {
    return ctx.unit_root_p(u64(a) * x);
}

/// Gauss sum tau(chi) = sum_x chi(x) e(x/p). Throws for the trivial character.
cplx gauss_sum(const DirichletCharacter& chi);

/**
 * @brief Unitary DFT mod p: out[z] = p^{-1/2} sum_x in[x] e(z*x/p).
 *
 * Direct O(p^2) summation against the context's root table. Applying it
 * twice gives x -> in[-x mod p].
 * Throws std::invalid_argument if in.size() != p.
 */
std::vector<cplx> dft(const PrimeContext& ctx, std::span<const cplx> in);

}  // namespace tracelab
