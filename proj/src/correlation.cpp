#include "tracelab/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tracelab/parallel.hpp"

namespace tracelab {

PglElement pgl_normalize(u32 p, u32 a, u32 b, u32 c, u32 d) {
    a %= p; b %= p; c %= p; d %= p;
    u64 det = (u64(a) * d % p + p - u64(b) * c % p) % p;
    if (det == 0) throw std::invalid_argument("pgl_normalize: singular matrix");
    u32 lead = a != 0 ? a : (b != 0 ? b : (c != 0 ? c : d));
    u32 s = pow_mod(lead, p - 2, p);
    auto scale = [&](u32 x) { return static_cast<u32>(u64(x) * s % p); };
    return {scale(a), scale(b), scale(c), scale(d)};
}

PglElement pgl_mul(u32 p, const PglElement& x, const PglElement& y) {
    auto mul = [&](u32 u, u32 v) { return static_cast<u32>(u64(u) * v % p); };
    auto add = [&](u32 u, u32 v) { u32 s = u + v; return s >= p ? s - p : s; };
    return pgl_normalize(p, add(mul(x.a, y.a), mul(x.b, y.c)), add(mul(x.a, y.b), mul(x.b, y.d)),
                         add(mul(x.c, y.a), mul(x.d, y.c)), add(mul(x.c, y.b), mul(x.d, y.d)));
}

PglElement pgl_inverse(u32 p, const PglElement& g) {
    auto neg = [&](u32 x) { return x == 0 ? 0u : p - x; };
    return pgl_normalize(p, g.d, neg(g.b), neg(g.c), g.a);
}

std::optional<u32> mobius_action(u32 p, const PglElement& g, u32 z) {
    z %= p;
    u32 den = static_cast<u32>((u64(g.c) * z + g.d) % p);
    if (den == 0) return std::nullopt;
    u32 num = static_cast<u32>((u64(g.a) * z + g.b) % p);
    return static_cast<u32>(u64(num) * pow_mod(den, p - 2, p) % p);
}

u64 proj_point_key(u32 p, const ProjP1& pt) {
    if (pt.infinite) return u64(p) * p;
    return u64(pt.z.a) + u64(p) * pt.z.b;
}

namespace {

Fp2Element fp2_scale(const PrimeContext& ctx, u32 s, Fp2Element x) {
    return {ctx.mul(s, x.a), ctx.mul(s, x.b)};
}

Fp2Element fp2_inv(const PrimeContext& ctx, Fp2Element x) {
    u32 n = fp2_norm(ctx, x);
    return fp2_scale(ctx, ctx.inv(n), fp2_conj(ctx, x));
}

}  // namespace

ProjP1 mobius_action_fp2(const PrimeContext& ctx, const PglElement& g, const ProjP1& z) {
    if (z.infinite) {
        if (g.c == 0) return {true, {}};
        return {false, {ctx.mul(g.a, ctx.inv(g.c)), 0}};
    }
    Fp2Element num = {ctx.add(ctx.mul(g.a, z.z.a), g.b), ctx.mul(g.a, z.z.b)};
    Fp2Element den = {ctx.add(ctx.mul(g.c, z.z.a), g.d), ctx.mul(g.c, z.z.b)};
    if (den.a == 0 && den.b == 0) return {true, {}};
    return {false, fp2_mul(ctx, num, fp2_inv(ctx, den))};
}

PointPair make_point_pair(u32 p, ProjP1 x, ProjP1 y) {
    if (proj_point_key(p, x) > proj_point_key(p, y)) std::swap(x, y);
    return {x, y};
}

FixedPointData fixed_points(const PrimeContext& ctx, const PglElement& g) {
    const u32 p = ctx.p();
    FixedPointData out;
    if (g.is_scalar()) {
        out.kind = FixedKind::scalar;
        return out;
    }
    if (g.c == 0) {
        // infinity is fixed; finite fixed points solve (a-d) z = -b
        if (g.a == g.d) {
            out.kind = FixedKind::parabolic;
            out.point = {true, {}};
        } else {
            out.kind = FixedKind::split_pair;
            u32 z0 = ctx.mul(g.b, ctx.inv(ctx.sub(g.d, g.a)));
            out.pair = make_point_pair(p, ProjP1{false, {z0, 0}}, ProjP1{true, {}});
        }
        return out;
    }
    // c != 0: roots of c z^2 + (d-a) z - b over F_p, extended to F_{p^2}
    u32 disc = ctx.add(ctx.mul(ctx.sub(g.a, g.d), ctx.sub(g.a, g.d)), ctx.mul(4 % p, ctx.mul(g.b, g.c)));
    u32 half = ctx.inv(ctx.mul(2 % p, g.c));
    u32 mid = ctx.sub(g.a, g.d);
    if (disc == 0) {
        out.kind = FixedKind::parabolic;
        out.point = {false, {ctx.mul(mid, half), 0}};
        return out;
    }
    if (auto r = ctx.sqrt(disc)) {
        out.kind = FixedKind::split_pair;
        u32 z1 = ctx.mul(ctx.add(mid, *r), half);
        u32 z2 = ctx.mul(ctx.sub(mid, *r), half);
        out.pair = make_point_pair(p, ProjP1{false, {z1, 0}}, ProjP1{false, {z2, 0}});
        return out;
    }
    // disc is a non-residue: disc = qnr * w^2, sqrt(disc) = w * s
    u32 w = *ctx.sqrt(ctx.mul(disc, ctx.inv(ctx.qnr())));
    out.kind = FixedKind::nonsplit_pair;
    u32 re = ctx.mul(mid, half);
    u32 im = ctx.mul(w, half);
    out.pair = make_point_pair(p, ProjP1{false, {re, im}}, ProjP1{false, {re, ctx.neg(im)}});
    return out;
}

namespace {

// Raw index space for enumeration: block A is a=1 with (b,c,d) lex and one
// singular d per (b,c); block B is a=0, b=1 with (c,d) lex and c=0 singular.
struct RawEnum {
    u32 p;
    std::size_t block_a() const { return std::size_t(p) * p * p; }
    std::size_t raw_size() const { return block_a() + std::size_t(p) * p; }

    std::optional<PglElement> decode(std::size_t raw) const {
        if (raw < block_a()) {
            u32 d = static_cast<u32>(raw % p);
            u32 c = static_cast<u32>((raw / p) % p);
            u32 b = static_cast<u32>(raw / (std::size_t(p) * p));
            if (d == u64(b) * c % p) return std::nullopt;
            return PglElement{1, b, c, d};
        }
        std::size_t r = raw - block_a();
        u32 d = static_cast<u32>(r % p);
        u32 c = static_cast<u32>(r / p);
        if (c == 0) return std::nullopt;
        return PglElement{0, 1, c, d};
    }

    std::size_t valid_below(std::size_t raw) const {
        if (raw <= block_a()) {
            u32 d = static_cast<u32>(raw % p);
            std::size_t bc = raw / p;  // complete (b,c) pairs below
            u32 b = static_cast<u32>(raw / (std::size_t(p) * p));
            u32 c = static_cast<u32>(bc % p);
            std::size_t invalid = bc + (raw < block_a() && d > u64(b) * c % p ? 1 : 0);
            return raw - invalid;
        }
        std::size_t r = raw - block_a();
        std::size_t invalid = std::size_t(p) * p + std::min<std::size_t>(r, p);
        return raw - invalid;
    }
};

}  // namespace

std::size_t pgl_class_count(u32 p) {
    return std::size_t(p) * p * p - p;
}

std::vector<PglElement> pgl_enumerate(u32 p) {
    RawEnum re{p};
    std::vector<PglElement> out;
    out.reserve(pgl_class_count(p));
    for (std::size_t raw = 0; raw < re.raw_size(); ++raw) {
        if (auto g = re.decode(raw)) out.push_back(*g);
    }
    return out;
}

cplx corr_sum(const WeightTable& khat, const PglElement& g) {
    const PrimeContext& ctx = khat.context();
    const u32 p = ctx.p();
    std::span<const cplx> kh = khat.values();
    cplx acc{0.0, 0.0};
    for (u32 z = 0; z < p; ++z) {
        u32 den = static_cast<u32>((u64(g.c) * z + g.d) % p);
        if (den == 0) continue;  // z = -d/c maps to infinity
        u32 num = static_cast<u32>((u64(g.a) * z + g.b) % p);
        u32 w = ctx.mul(num, ctx.inv(den));
        acc += kh[w] * std::conj(kh[z]);
    }
    return acc;
}

CorrelationSpectrum::CorrelationSpectrum(const PrimeContext& ctx, std::string weight_label,
                                         double M)
    : ctx_(&ctx), label_(std::move(weight_label)), m_(M) {}

double CorrelationSpectrum::cutoff() const {
    return m_ * std::sqrt(double(ctx_->p())) * (1.0 + 1e-6);
}

void CorrelationSpectrum::set_entries(std::vector<cplx> values,
                                      std::vector<SpectrumEntry> exceptional,
                                      std::size_t n_classes, double max_abs, double sum_sq,
                                      bool full) {
    values_ = std::move(values);
    exceptional_ = std::move(exceptional);
    n_classes_ = n_classes;
    max_abs_ = max_abs;
    sum_sq_ = sum_sq;
    full_ = full;
}

CorrelationSpectrum spectrum(const WeightTable& K, double M, int threads) {
    const PrimeContext& ctx = K.context();
    const u32 p = ctx.p();
    WeightTable khat = dft(K);

    CorrelationSpectrum spec(ctx, K.label(), M);
    const double cut = spec.cutoff();
    const bool full = p <= CorrelationSpectrum::kFullRetentionMaxP;

    RawEnum re{p};
    const std::size_t n_raw = re.raw_size();
    const std::size_t n_classes = pgl_class_count(p);
    constexpr std::size_t kChunk = 8192;  // fixed: results must not depend on thread count
    const std::size_t n_chunks = (n_raw + kChunk - 1) / kChunk;

    std::vector<cplx> values(full ? n_classes : 0);
    struct ChunkOut {
        std::vector<SpectrumEntry> exceptional;
        double max_abs = 0.0;
        double sum_sq = 0.0;
    };
    std::vector<ChunkOut> chunk_out(n_chunks);

    parallel_chunks(n_raw, kChunk, resolve_threads(threads),
                    [&](std::size_t ci, std::size_t begin, std::size_t end) {
                        ChunkOut& out = chunk_out[ci];
                        std::size_t slot = full ? re.valid_below(begin) : 0;
                        for (std::size_t raw = begin; raw < end; ++raw) {
                            auto g = re.decode(raw);
                            if (!g) continue;
                            cplx v = corr_sum(khat, *g);
                            if (full) values[slot++] = v;
                            double av = std::abs(v);
                            out.max_abs = std::max(out.max_abs, av);
                            out.sum_sq += av * av;
                            if (av > cut) out.exceptional.push_back({*g, v});
                        }
                    });

    std::vector<SpectrumEntry> exceptional;
    double max_abs = 0.0;
    double sum_sq = 0.0;
    for (const ChunkOut& out : chunk_out) {
        exceptional.insert(exceptional.end(), out.exceptional.begin(), out.exceptional.end());
        max_abs = std::max(max_abs, out.max_abs);
        sum_sq += out.sum_sq;
    }
    spec.set_entries(std::move(values), std::move(exceptional), n_classes, max_abs, sum_sq, full);
    return spec;
}

std::size_t GoodnessReport::count(ExceptionalCell cell) const {
    std::size_t n = 0;
    for (const auto& e : entries) {
        if (e.cell == cell) ++n;
    }
    return n;
}

GoodnessReport classify_exceptional(const CorrelationSpectrum& spec, double M) {
    const PrimeContext& ctx = spec.context();
    GoodnessReport report;
    report.m = M;

    struct Pending {
        SpectrumEntry entry;
        PointPair pair;
        bool involution;
    };
    std::vector<Pending> pending;

    for (const SpectrumEntry& e : spec.exceptional()) {
        const PglElement& g = e.gamma;
        // a*c*d = 0 is the B u Bw u wB membership test
        if (g.a == 0 || g.c == 0 || g.d == 0) {
            report.entries.push_back({e, ExceptionalCell::triangular, 0});
            continue;
        }
        FixedPointData fp = fixed_points(ctx, g);
        if (fp.kind == FixedKind::parabolic) {
            report.entries.push_back({e, ExceptionalCell::parabolic, 0});
            continue;
        }
        // trace zero is exactly the involution condition away from the
        // triangular locus
        bool involution = ctx.add(g.a, g.d) == 0;
        pending.push_back({e, fp.pair, involution});
    }

    auto pair_index_of = [&](const PointPair& q) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < report.pairs.size(); ++i) {
            if (report.pairs[i] == q) return i;
        }
        return std::nullopt;
    };

    // Non-involutions pin down the pairs that are genuinely required.
    for (const Pending& pd : pending) {
        if (pd.involution) continue;
        if (!pair_index_of(pd.pair)) report.pairs.push_back(pd.pair);
    }

    auto swaps_pair = [&](const PglElement& g, const PointPair& q) {
        return mobius_action_fp2(ctx, g, q.first) == q.second &&
               mobius_action_fp2(ctx, g, q.second) == q.first;
    };

    for (const Pending& pd : pending) {
        if (!pd.involution) {
            report.entries.push_back({pd.entry, ExceptionalCell::torus, *pair_index_of(pd.pair)});
            continue;
        }
        // An involution may be the swap of an already-needed pair; otherwise
        // it sits in the torus of its own fixed pair.
        std::optional<std::size_t> assigned;
        for (std::size_t i = 0; i < report.pairs.size(); ++i) {
            if (swaps_pair(pd.entry.gamma, report.pairs[i])) {
                assigned = i;
                break;
            }
        }
        if (assigned) {
            report.entries.push_back({pd.entry, ExceptionalCell::normalizer, *assigned});
            continue;
        }
        auto own = pair_index_of(pd.pair);
        if (!own) {
            report.pairs.push_back(pd.pair);
            own = report.pairs.size() - 1;
        }
        report.entries.push_back({pd.entry, ExceptionalCell::torus, *own});
    }

    bool any_unclassified = report.count(ExceptionalCell::unclassified) > 0;
    report.is_good = !any_unclassified && double(report.pairs.size()) <= M;
    return report;
}

std::vector<PglElement> sec16_expected_set(Sec16Case which, const PrimeContext& ctx, i64 param) {
    const u32 p = ctx.p();
    std::vector<PglElement> out;
    switch (which) {
        case Sec16Case::dirac:
            for (u32 t = 0; t < p; ++t) out.push_back({1, t, 0, 1});
            break;
        case Sec16Case::kloosterman:
            for (u32 t = 0; t < p; ++t) out.push_back({1, 0, t, 1});
            break;
        case Sec16Case::quadratic:
            out.push_back({1, 0, 0, 1});
            out.push_back({1, 0, 0, p - 1});
            break;
        case Sec16Case::character: {
            DirichletCharacter chi(ctx, static_cast<u32>(ctx.reduce(param)));
            if (chi.is_trivial()) {
                throw std::invalid_argument("sec16_expected_set: character must be non-trivial");
            }
            for (u32 t = 1; t < p; ++t) out.push_back({1, 0, 0, t});
            if (chi.order() == 2) {
                for (u32 c = 1; c < p; ++c) out.push_back({0, 1, c, 0});
            }
            break;
        }
        case Sec16Case::additive: {
            u32 fixed = ctx.neg(ctx.reduce(param));
            for (const PglElement& g : pgl_enumerate(p)) {
                auto img = mobius_action(p, g, fixed);
                if (img && *img == fixed) out.push_back(g);
            }
            break;
        }
    }
    return out;
}

Sec16Report verify_sec16(Sec16Case which, u32 p, double M, i64 param, int threads) {
    PrimeContext ctx(p);
    Sec16Report report;

    // Validity thresholds from the worked examples; below them the
    // comparison is meaningless rather than failing.
    bool in_range = true;
    switch (which) {
        case Sec16Case::dirac:
        case Sec16Case::kloosterman:
            in_range = p >= 17 && M >= 3.0;
            break;
        case Sec16Case::quadratic:
            in_range = p >= 7 && M >= 2.0;
            break;
        case Sec16Case::character:
            in_range = p >= 11 && M >= 2.0;
            break;
        case Sec16Case::additive:
            in_range = M >= 1.0 && M < std::sqrt(double(p)) - 1.0;
            break;
    }
    if (!in_range) {
        report.status = Sec16Report::Status::out_of_range;
        return report;
    }

    WeightTable K = [&]() {
        switch (which) {
            case Sec16Case::dirac:
                if (ctx.reduce(param) == 0) {
                    throw std::invalid_argument("verify_sec16: dirac case requires u != 0");
                }
                return delta_weight(ctx, ctx.reduce(param));
            case Sec16Case::additive:
                return additive_weight(ctx, ctx.reduce(param));
            case Sec16Case::kloosterman:
                return kloosterman_weight(ctx, ctx.reduce(param));
            case Sec16Case::quadratic:
                return quadratic_phase_weight(ctx);
            case Sec16Case::character: {
                DirichletCharacter chi(ctx, static_cast<u32>(ctx.reduce(param)));
                std::vector<cplx> values(p, cplx{0.0, 0.0});
                for (u32 n = 1; n < p; ++n) values[n] = chi(n);
                return WeightTable(ctx, std::move(values),
                                   "character(k=" + std::to_string(chi.index()) + ")");
            }
        }
        throw std::logic_error("verify_sec16: unreachable");
    }();

    CorrelationSpectrum spec = spectrum(K, M, threads);
    GoodnessReport goodness = classify_exceptional(spec, M);

    std::vector<PglElement> expected = sec16_expected_set(which, ctx, param);
    report.expected_count = expected.size();
    report.observed_count = spec.exceptional().size();
    report.expected_good = which != Sec16Case::additive;
    report.observed_good = goodness.is_good;

    auto key = [p](const PglElement& g) {
        return ((u64(g.a) * p + g.b) * p + g.c) * p + g.d;
    };
    std::vector<u64> exp_keys;
    exp_keys.reserve(expected.size());
    for (const auto& g : expected) exp_keys.push_back(key(g));
    std::sort(exp_keys.begin(), exp_keys.end());

    std::vector<u64> obs_keys;
    obs_keys.reserve(spec.exceptional().size());
    for (const auto& e : spec.exceptional()) obs_keys.push_back(key(e.gamma));
    std::sort(obs_keys.begin(), obs_keys.end());

    for (const auto& g : expected) {
        if (!std::binary_search(obs_keys.begin(), obs_keys.end(), key(g))) {
            report.missing.push_back(g);
        }
    }
    for (const auto& e : spec.exceptional()) {
        if (!std::binary_search(exp_keys.begin(), exp_keys.end(), key(e.gamma))) {
            report.unexpected.push_back(e.gamma);
        }
    }

    bool sets_match = report.missing.empty() && report.unexpected.empty();
    bool good_match = report.expected_good == report.observed_good;
    report.status = sets_match && good_match ? Sec16Report::Status::pass
                                             : Sec16Report::Status::fail;
    return report;
}

}  // namespace tracelab
