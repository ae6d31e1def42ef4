#pragma once

/**
 * @file orbits.hpp
 * @brief Twisted Hecke orbits: weighted point clouds (tau+t)/p reduced to
 *        the SL_2(Z) fundamental domain, box pairings against the
 *        hyperbolic measure, and the Fourier-side bookkeeping identity.
 */

#include <array>
#include <optional>
#include <vector>

#include "tracelab/modular.hpp"
#include "tracelab/weights.hpp"

namespace tracelab {

struct UpperHalfPoint {
    double x = 0.0;
    double y = 1.0;
};

/// Geometric Hecke points: (tau+t)/p for finite t, p*tau for t = infinity.
UpperHalfPoint hecke_point(u32 p, std::optional<u32> t, UpperHalfPoint tau);

struct Sl2zMatrix {
    i64 a = 1, b = 0, c = 0, d = 1;

    i64 det() const { return a * d - b * c; }
};

struct ReductionResult {
    UpperHalfPoint z;
    /// The matrix in SL_2(Z) with m * input = output.
    Sl2zMatrix m;
};

/// Reduce to the standard fundamental domain |x| <= 1/2, x^2 + y^2 >= 1,
/// boundary ties resolved toward x <= 0. Requires y > 0.
ReductionResult reduce_fundamental(UpperHalfPoint z);

/// Closed integer interval [lo, hi] within [1, p].
struct Interval {
    u32 lo = 1;
    u32 hi = 1;

    u32 length() const { return hi - lo + 1; }
};

struct TwistedMeasure {
    struct Atom {
        UpperHalfPoint z;  // already reduced
        cplx weight;
    };
    std::vector<Atom> atoms;
    double normalization = 1.0;  // the 1/|I| (or 1/(p+1)) prefactor

    cplx total_mass() const;
};

/// Atoms (reduce((tau+t)/p), K(t)/|I|) for t in I.
TwistedMeasure twisted_measure(u32 p, UpperHalfPoint tau, const WeightTable& K, Interval I,
                               int threads = 1);

/// The untwisted control measure: all p+1 Hecke points including t =
/// infinity, each with weight 1/(p+1).
TwistedMeasure untwisted_full_measure(u32 p, UpperHalfPoint tau, int threads = 1);

/// Multiplicity measure of a polynomially twisted orbit: atoms at
/// gamma_{phi(x)} tau for phi(x) in I, normalized by 1/|I|.
TwistedMeasure poly_twisted_measure(u32 p, UpperHalfPoint tau, const PrimeContext& ctx,
                                    const PolyFp& phi, Interval I, int threads = 1);

/// Axis-aligned box [x0,x1] x [y0,y1] intersected with the fundamental
/// domain; y1 may be +infinity.
struct Box {
    double x0 = -0.5, x1 = 0.5;
    double y0 = 1.0, y1 = 4.0;
};

/// Sum of atom weights with reduced point in the box. Throws on a
/// degenerate (empty-interior) box.
cplx pair_with_box(const TwistedMeasure& mu, const Box& box);

/// Hyperbolic probability mass (3/pi) dx dy / y^2 of box intersect F,
/// by exact y-integration and Simpson quadrature in x.
double hyperbolic_box_mass(const Box& box);

/// The fixed 8-box partition of {|x| <= 1/2, 1 <= y <= 4} plus the tail
/// y > 4 used for discrepancy reports.
std::array<Box, 9> standard_boxes();

struct FourierSideReport {
    cplx direct{};    // sum_t K(t) g((tau+t)/p) / |I|
    cplx via_dft{};   // same, assembled from Khat and the interval kernel
    double max_abs_diff = 0.0;
};

/// Both sides of the finite Poisson-summation skeleton relating orbit
/// sums to coefficient sums, for g(z) = sum of a few e(n z) frequencies.
FourierSideReport fourier_side_check(u32 p, UpperHalfPoint tau, const WeightTable& K, Interval I,
                                     std::span<const cplx> freq_coeffs);

}  // namespace tracelab
