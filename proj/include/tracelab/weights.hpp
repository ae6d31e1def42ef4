#pragma once

/**
 * @file weights.hpp
 * @brief The catalog of trace weights as explicit length-p complex tables:
 *        Dirac and additive weights, mixed character weights
 *        e(phi1(n)/p)*chi(phi2(n)), Kloosterman and hyper-Kloosterman
 *        weights, and fiber-counting weights with their Fourier duals.
 */

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracelab/fp_core.hpp"

namespace tracelab {

/// Polynomial over F_p, coeffs[i] is the coefficient of X^i.
using PolyFp = std::vector<u32>;

u32 poly_eval(const PrimeContext& ctx, const PolyFp& f, u32 x);
PolyFp poly_trim(PolyFp f);
/// Degree, with deg(0) = -1.
int poly_degree(const PolyFp& f);
PolyFp poly_mul(const PrimeContext& ctx, const PolyFp& f, const PolyFp& g);
/// Quotient and remainder of f by nonzero g.
std::pair<PolyFp, PolyFp> poly_divmod(const PrimeContext& ctx, const PolyFp& f, const PolyFp& g);
/// Monic gcd.
PolyFp poly_gcd(const PrimeContext& ctx, PolyFp f, PolyFp g);
/// Build a polynomial over F_p from signed integer coefficients.
PolyFp poly_from_int(const PrimeContext& ctx, std::span<const i64> coeffs);

/**
 * @brief Length-p complex table K(0..p-1) with cached sup and L2 norms,
 *        where the L2 norm is the averaged one (p^{-1} sum |K|^2)^{1/2}.
 *
 * Immutable after construction.
 */
class WeightTable {
public:
    WeightTable(const PrimeContext& ctx, std::vector<cplx> values, std::string label);

    const PrimeContext& context() const { return *ctx_; }
    u32 p() const { return ctx_->p(); }
    const std::string& label() const { return label_; }
    std::span<const cplx> values() const { return values_; }
    cplx operator[](u32 n) const { return values_[n]; }
    /// Periodic extension to all of Z.
    cplx at_int(i64 n) const { return values_[ctx_->reduce(n)]; }
    double sup_norm() const { return sup_norm_; }
    double l2_norm() const { return l2_norm_; }

private:
    const PrimeContext* ctx_;
    std::vector<cplx> values_;
    std::string label_;
    double sup_norm_ = 0.0;
    double l2_norm_ = 0.0;
};

/// Unitary DFT of a weight table.
WeightTable dft(const WeightTable& table);

/**
 * @brief Rational map R(X)/S(X) over F_p, reduced so gcd(R, S) = 1.
 *
 * Evaluation returns nothing at poles (S(x) = 0 after reduction).
 */
class RationalMapFp {
public:
    RationalMapFp(const PrimeContext& ctx, PolyFp num, PolyFp den);
    static RationalMapFp from_int(const PrimeContext& ctx, std::span<const i64> num,
                                  std::span<const i64> den);

    std::optional<u32> operator()(u32 x) const;
    const PolyFp& num() const { return num_; }
    const PolyFp& den() const { return den_; }
    bool is_constant() const { return poly_degree(num_) <= 0 && poly_degree(den_) <= 0; }

private:
    const PrimeContext* ctx_;
    PolyFp num_;
    PolyFp den_;
};

// --- weight constructors -------------------------------------------------

/// K(n) = e(phi1(n)/p) * chi(phi2(n)), and 0 where either map has a pole.
WeightTable mixed_char_weight(const DirichletCharacter& chi, const RationalMapFp& phi1,
                              const RationalMapFp& phi2);

/// Classical Kloosterman sum S(a,b;c) over x in (Z/cZ)^*. Real by pairing
/// x with -x; the (checked) imaginary part is discarded.
double kloosterman_sum(i64 a, i64 b, u64 c);

/// Row n -> S(a,n;p) computed in one O(p^2) accumulation pass.
std::vector<double> kloosterman_row(const PrimeContext& ctx, u32 a);

/// K(n) = S(a,n;p)/sqrt(p). Requires a != 0.
WeightTable kloosterman_weight(const PrimeContext& ctx, u32 a);

/// Normalized hyper-Kloosterman table Kl_m(a;p) for a = 1..p-1, via the
/// convolution recursion S_m(a) = sum_{t!=0} S_{m-1}(a/t) e(t/p).
/// Index 0 stores 0 (Kl_m is only defined on F_p^*). Requires m >= 2.
WeightTable hyper_kloosterman_table(const PrimeContext& ctx, u32 m);

/// Bivariate polynomial in (U, V) with complex coefficients;
/// coeff[i][j] multiplies U^i V^j.
struct BivariatePoly {
    std::vector<std::vector<cplx>> coeff;

    cplx operator()(cplx u, cplx v) const;
};

/// K(n) = Phi(Kl_m(phi(n)), conj Kl_m(phi(n))) where phi(n) is defined and
/// nonzero; 0 elsewhere. Requires non-constant phi.
WeightTable hk_composite_weight(const PrimeContext& ctx, u32 m, const RationalMapFp& phi,
                                const BivariatePoly& Phi);

/// K(x) = #{y : phi(y) = x} - 1 for a polynomial phi of degree >= 1.
WeightTable fiber_count_weight(const PrimeContext& ctx, const PolyFp& phi);

/// K'(n) = -(1/sqrt p) sum_x e(n*phi(x)/p) for n != 0, K'(0) = 0.
WeightTable dual_fiber_weight(const PrimeContext& ctx, const PolyFp& phi);

/// K(n) = sqrt(p) * [n == u].
WeightTable delta_weight(const PrimeContext& ctx, u32 u);

/// K(n) = e(a*n/p).
WeightTable additive_weight(const PrimeContext& ctx, u32 a);

/// K(n) = (n/p), the Legendre symbol table (0 at n = 0).
WeightTable legendre_weight(const PrimeContext& ctx);

/// K(n) = e(n^2/p).
WeightTable quadratic_phase_weight(const PrimeContext& ctx);

/// K ≡ c.
WeightTable constant_weight(const PrimeContext& ctx, cplx c = {1.0, 0.0});

// --- serializable weight descriptor --------------------------------------

/**
 * @brief Plain-data description of a catalog weight, instantiable at any
 *        prime. This is what experiment configs carry; the JSON form of
 *        the descriptor is fixed in the CLI.
 */
struct WeightSpec {
    enum class Kind {
        dirac,
        additive,
        mixed_char,
        kloosterman,
        hyper_kloosterman,
        hk_composite,
        fiber_count,
        dual_fiber,
        legendre,
        quadratic_phase,
        constant,
    };

    Kind kind = Kind::constant;
    i64 shift = 0;                  // u for dirac, a for additive/kloosterman
    u32 m = 2;                      // hyper-Kloosterman width
    u32 chi_index = 0;              // character index for mixed_char
    std::vector<i64> phi1_num{0};   // integer coefficient data for the maps
    std::vector<i64> phi1_den{1};
    std::vector<i64> phi2_num{1};
    std::vector<i64> phi2_den{1};
    std::vector<std::vector<cplx>> big_phi;  // hk_composite coefficient grid

    std::string label() const;
};

WeightTable make_weight(const PrimeContext& ctx, const WeightSpec& spec);

}  // namespace tracelab
