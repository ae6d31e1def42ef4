#pragma once

/**
 * @file correlation.hpp
 * @brief Correlation sums C(K;gamma) over PGL_2(F_p), extraction of the
 *        exceptional set {|C| > M*sqrt(p)}, and its structural
 *        classification into triangular / parabolic / torus / normalizer
 *        cells with an empirical goodness verdict.
 */

#include <optional>
#include <string>
#include <vector>

#include "tracelab/fp_core.hpp"
#include "tracelab/weights.hpp"

namespace tracelab {

/**
 * @brief Canonical representative of a class in PGL_2(F_p): entries scaled
 *        so the first nonzero of (a, b, c, d) equals 1.
 */
struct PglElement {
    u32 a = 1, b = 0, c = 0, d = 1;

    bool operator==(const PglElement&) const = default;
    bool is_scalar() const { return b == 0 && c == 0 && a == d; }
};

/// Normalize (a,b,c,d) to the canonical class representative.
/// Throws std::invalid_argument if the determinant vanishes.
PglElement pgl_normalize(u32 p, u32 a, u32 b, u32 c, u32 d);

PglElement pgl_mul(u32 p, const PglElement& x, const PglElement& y);
PglElement pgl_inverse(u32 p, const PglElement& g);

/// (a*z + b) / (c*z + d) mod p; empty when the image is the point at infinity.
std::optional<u32> mobius_action(u32 p, const PglElement& g, u32 z);

/// Point of P^1(F_{p^2}); when infinite is set, z is ignored.
struct ProjP1 {
    bool infinite = false;
    Fp2Element z{};

    bool operator==(const ProjP1&) const = default;
};

/// Total order key used for canonical unordered pairs.
u64 proj_point_key(u32 p, const ProjP1& pt);

/// Mobius action of an F_p matrix on P^1(F_{p^2}).
ProjP1 mobius_action_fp2(const PrimeContext& ctx, const PglElement& g, const ProjP1& z);

/// Unordered pair of distinct points, stored with key(first) < key(second).
struct PointPair {
    ProjP1 first, second;

    bool operator==(const PointPair&) const = default;
};

PointPair make_point_pair(u32 p, ProjP1 x, ProjP1 y);

enum class FixedKind { scalar, parabolic, split_pair, nonsplit_pair };

/**
 * @brief Fixed points of gamma acting on P^1, solved over F_{p^2}.
 *
 * The kind is decided by disc = (a-d)^2 + 4bc: zero -> parabolic, nonzero
 * square -> split pair in P^1(F_p), non-residue -> conjugate pair in
 * F_{p^2}. Scalar matrices fix all of P^1.
 */
struct FixedPointData {
    FixedKind kind = FixedKind::scalar;
    ProjP1 point{};   // the parabolic fixed point
    PointPair pair{}; // for the two semisimple kinds
};

FixedPointData fixed_points(const PrimeContext& ctx, const PglElement& g);

/**
 * @brief Deterministic enumeration of PGL_2(F_p) class representatives:
 *        first the a=1 block in lexicographic (b,c,d) order, then the
 *        a=0, b=1 block in (c,d) order. Yields p^3 - p classes.
 */
std::vector<PglElement> pgl_enumerate(u32 p);
std::size_t pgl_class_count(u32 p);

/// Correlation sum C(K;gamma) = sum over z != -d/c of Khat(g.z) * conj(Khat(z)).
/// `khat` must be the DFT of the weight under study (caller contract).
cplx corr_sum(const WeightTable& khat, const PglElement& g);

struct SpectrumEntry {
    PglElement gamma;
    cplx value{};
};

/**
 * @brief All correlation sums of one weight, with the exceptional set
 *        extracted by |C| > M*sqrt(p)*(1 + 1e-6).
 *
 * Full per-class values are retained for p <= 101; beyond that only the
 * exceptional entries and summary statistics are kept.
 */
class CorrelationSpectrum {
public:
    static constexpr u32 kFullRetentionMaxP = 101;

    CorrelationSpectrum(const PrimeContext& ctx, std::string weight_label, double M);

    const PrimeContext& context() const { return *ctx_; }
    const std::string& weight_label() const { return label_; }
    double threshold_m() const { return m_; }
    /// The numeric cut M*sqrt(p)*(1+1e-6).
    double cutoff() const;

    bool has_full_values() const { return full_; }
    /// Values in enumeration order (only in full mode).
    const std::vector<cplx>& values() const { return values_; }
    const std::vector<SpectrumEntry>& exceptional() const { return exceptional_; }

    std::size_t class_count() const { return n_classes_; }
    double max_abs() const { return max_abs_; }
    double sum_sq() const { return sum_sq_; }

    /// Used by spectrum() and by tests that build synthetic spectra.
    void set_entries(std::vector<cplx> values, std::vector<SpectrumEntry> exceptional,
                     std::size_t n_classes, double max_abs, double sum_sq, bool full);

private:
    const PrimeContext* ctx_;
    std::string label_;
    double m_;
    bool full_ = false;
    std::vector<cplx> values_;
    std::vector<SpectrumEntry> exceptional_;
    std::size_t n_classes_ = 0;
    double max_abs_ = 0.0;
    double sum_sq_ = 0.0;
};

/// Compute the full spectrum of K: one DFT, then p^3 - p correlation sums.
/// Results are independent of the thread count.
CorrelationSpectrum spectrum(const WeightTable& K, double M, int threads = 1);

enum class ExceptionalCell { triangular, parabolic, torus, normalizer, unclassified };

struct ClassifiedEntry {
    SpectrumEntry entry;
    ExceptionalCell cell = ExceptionalCell::unclassified;
    /// Index into GoodnessReport::pairs for torus/normalizer cells.
    std::size_t pair_index = 0;
};

/**
 * @brief Partition of the exceptional set per the goodness definition:
 *        gamma with a*c*d = 0 (i.e. in B, Bw or wB) are triangular, then
 *        parabolic (disc = 0), then grouped by fixed-point pairs, where
 *        trace-zero elements may instead be swaps of an already-needed
 *        pair. K is (p,M)-good when at most M pairs are needed.
 */
struct GoodnessReport {
    bool is_good = false;
    double m = 0.0;
    std::vector<PointPair> pairs;
    std::vector<ClassifiedEntry> entries;
    std::size_t count(ExceptionalCell cell) const;
};

GoodnessReport classify_exceptional(const CorrelationSpectrum& spec, double M);

// --- closed-form regression targets ---------------------------------------

enum class Sec16Case { dirac, additive, kloosterman, quadratic, character };

struct Sec16Report {
    enum class Status { pass, fail, out_of_range };
    Status status = Status::out_of_range;
    std::size_t expected_count = 0;
    std::size_t observed_count = 0;
    std::vector<PglElement> missing;     // expected but below threshold
    std::vector<PglElement> unexpected;  // above threshold but not expected
    bool expected_good = false;
    bool observed_good = false;
};

/// Compare the computed exceptional set against the closed-form set for
/// one of the worked examples; `param` is u for dirac/additive, a for
/// kloosterman, the character index for the character case.
Sec16Report verify_sec16(Sec16Case which, u32 p, double M, i64 param = 1, int threads = 1);

/// The closed-form expected exceptional set for a Sec16 case.
std::vector<PglElement> sec16_expected_set(Sec16Case which, const PrimeContext& ctx, i64 param);

}  // namespace tracelab
