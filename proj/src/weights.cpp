#include "tracelab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tracelab {

u32 poly_eval(const PrimeContext& ctx, const PolyFp& f, u32 x) {
    u32 acc = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) {
        acc = ctx.add(ctx.mul(acc, x), *it);
    }
    return acc;
}

PolyFp poly_trim(PolyFp f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
    return f;
}

int poly_degree(const PolyFp& f) {
    for (std::size_t i = f.size(); i > 0; --i) {
        if (f[i - 1] != 0) return static_cast<int>(i - 1);
    }
    return -1;
}

PolyFp poly_mul(const PrimeContext& ctx, const PolyFp& f, const PolyFp& g) {
    if (poly_degree(f) < 0 || poly_degree(g) < 0) return {};
    PolyFp out(f.size() + g.size() - 1, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        for (std::size_t j = 0; j < g.size(); ++j) {
            out[i + j] = ctx.add(out[i + j], ctx.mul(f[i], g[j]));
        }
    }
    return poly_trim(std::move(out));
}

std::pair<PolyFp, PolyFp> poly_divmod(const PrimeContext& ctx, const PolyFp& f, const PolyFp& g) {
    PolyFp r = poly_trim(f);
    PolyFp gg = poly_trim(g);
    int dg = poly_degree(gg);
    if (dg < 0) throw std::invalid_argument("poly_divmod: division by zero polynomial");
    int dr = poly_degree(r);
    if (dr < dg) return {{}, r};
    PolyFp q(dr - dg + 1, 0);
    u32 lead_inv = ctx.inv(gg.back());
    while ((dr = poly_degree(r)) >= dg) {
        u32 coeff = ctx.mul(r[dr], lead_inv);
        int shift = dr - dg;
        q[shift] = coeff;
        for (int i = 0; i <= dg; ++i) {
            r[i + shift] = ctx.sub(r[i + shift], ctx.mul(coeff, gg[i]));
        }
        r = poly_trim(std::move(r));
        if (r.empty()) break;
    }
    return {poly_trim(std::move(q)), r};
}

PolyFp poly_gcd(const PrimeContext& ctx, PolyFp f, PolyFp g) {
    f = poly_trim(std::move(f));
    g = poly_trim(std::move(g));
    while (poly_degree(g) >= 0) {
        auto [q, r] = poly_divmod(ctx, f, g);
        f = std::move(g);
        g = std::move(r);
    }
    if (poly_degree(f) >= 0) {
        u32 s = ctx.inv(f.back());
        for (auto& c : f) c = ctx.mul(c, s);
    }
    return f;
}

PolyFp poly_from_int(const PrimeContext& ctx, std::span<const i64> coeffs) {
    PolyFp out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = ctx.reduce(coeffs[i]);
    return poly_trim(std::move(out));
}

WeightTable::WeightTable(const PrimeContext& ctx, std::vector<cplx> values, std::string label)
    : ctx_(&ctx), values_(std::move(values)), label_(std::move(label)) {
    if (values_.size() != ctx.p()) {
        throw std::invalid_argument("WeightTable: length " + std::to_string(values_.size()) +
                                    " does not match p = " + std::to_string(ctx.p()));
    }
    double sum_sq = 0.0;
    for (const cplx& v : values_) {
        sup_norm_ = std::max(sup_norm_, std::abs(v));
        sum_sq += std::norm(v);
    }
    l2_norm_ = std::sqrt(sum_sq / double(ctx.p()));
}

WeightTable dft(const WeightTable& table) {
    return WeightTable(table.context(), dft(table.context(), table.values()),
                       "dft(" + table.label() + ")");
}

RationalMapFp::RationalMapFp(const PrimeContext& ctx, PolyFp num, PolyFp den)
    : ctx_(&ctx), num_(poly_trim(std::move(num))), den_(poly_trim(std::move(den))) {
    if (poly_degree(den_) < 0) {
        throw std::invalid_argument("RationalMapFp: denominator is identically zero");
    }
    PolyFp g = poly_gcd(ctx, num_, den_);
    if (poly_degree(g) > 0) {
        num_ = poly_divmod(ctx, num_, g).first;
        den_ = poly_divmod(ctx, den_, g).first;
    }
}

RationalMapFp RationalMapFp::from_int(const PrimeContext& ctx, std::span<const i64> num,
                                      std::span<const i64> den) {
    return RationalMapFp(ctx, poly_from_int(ctx, num), poly_from_int(ctx, den));
}

std::optional<u32> RationalMapFp::operator()(u32 x) const {
    u32 s = poly_eval(*ctx_, den_, x);
    if (s == 0) return std::nullopt;
    return ctx_->mul(poly_eval(*ctx_, num_, x), ctx_->inv(s));
}

WeightTable mixed_char_weight(const DirichletCharacter& chi, const RationalMapFp& phi1,
                              const RationalMapFp& phi2) {
    const PrimeContext& ctx = chi.context();
    std::vector<cplx> values(ctx.p(), cplx{0.0, 0.0});
    for (u32 n = 0; n < ctx.p(); ++n) {
        auto v1 = phi1(n);
        auto v2 = phi2(n);
        if (!v1 || !v2) continue;
        values[n] = ctx.unit_root_p(*v1) * chi(*v2);
    }
    return WeightTable(ctx, std::move(values), "mixed-char");
}

namespace {

// Inverse of x modulo c (extended Euclid); requires gcd(x, c) = 1.
u64 inv_mod(u64 x, u64 c) {
    i64 r0 = static_cast<i64>(c), r1 = static_cast<i64>(x % c);
    i64 t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        i64 r2 = r0 - q * r1;
        i64 t2 = t0 - q * t1;
        r0 = r1; r1 = r2;
        t0 = t1; t1 = t2;
    }
    return static_cast<u64>(t0 < 0 ? t0 + static_cast<i64>(c) : t0);
}

}  // namespace

double kloosterman_sum(i64 a, i64 b, u64 c) {
    if (c == 0) throw std::invalid_argument("kloosterman_sum: c must be >= 1");
    if (c == 1) return 1.0;  // empty sum over the trivial unit group
    const double two_pi = 2.0 * std::numbers::pi;
    auto reduce = [&](i64 v) -> u64 {
        i64 r = v % static_cast<i64>(c);
        return static_cast<u64>(r < 0 ? r + static_cast<i64>(c) : r);
    };
    u64 ar = reduce(a);
    u64 br = reduce(b);
    double re = 0.0;
    double im = 0.0;
    for (u64 x = 1; x < c; ++x) {
        if (std::gcd(x, c) != 1) continue;
        u64 xinv = inv_mod(x, c);
        double t = two_pi * double((ar * x + br * xinv) % c) / double(c);
        re += std::cos(t);
        im += std::sin(t);
    }
    if (std::abs(im) > 1e-9 * std::max(1.0, std::abs(re))) {
        throw std::logic_error("kloosterman_sum: non-real result");
    }
    return re;
}

std::vector<double> kloosterman_row(const PrimeContext& ctx, u32 a) {
    const u32 p = ctx.p();
    std::vector<cplx> row(p, cplx{0.0, 0.0});
    for (u32 x = 1; x < p; ++x) {
        u32 xinv = ctx.inv(x);
        u64 idx = (u64(a) * x) % p;  // a*x + n*xinv as n steps by 1
        for (u32 n = 0; n < p; ++n) {
            row[n] += ctx.unit_root_p(idx);
            idx += xinv;
            if (idx >= p) idx -= p;
        }
    }
    std::vector<double> out(p);
    for (u32 n = 0; n < p; ++n) {
        out[n] = row[n].real();
    }
    return out;
}

WeightTable kloosterman_weight(const PrimeContext& ctx, u32 a) {
    if (a % ctx.p() == 0) {
        throw std::invalid_argument("kloosterman_weight: a must be nonzero mod p");
    }
    std::vector<double> row = kloosterman_row(ctx, a % ctx.p());
    const double scale = 1.0 / std::sqrt(double(ctx.p()));
    std::vector<cplx> values(ctx.p());
    for (u32 n = 0; n < ctx.p(); ++n) values[n] = {row[n] * scale, 0.0};
    return WeightTable(ctx, std::move(values), "kloosterman(a=" + std::to_string(a) + ")");
}

WeightTable hyper_kloosterman_table(const PrimeContext& ctx, u32 m) {
    if (m < 2) throw std::invalid_argument("hyper_kloosterman_table: m must be >= 2");
    const u32 p = ctx.p();
    // S_1(a) = e(a/p); S_k(a) = sum_{t != 0} S_{k-1}(a * t^{-1}) e(t/p).
    std::vector<cplx> s(p);
    for (u32 a = 0; a < p; ++a) s[a] = ctx.unit_root_p(a);
    for (u32 k = 2; k <= m; ++k) {
        std::vector<cplx> next(p, cplx{0.0, 0.0});
        for (u32 t = 1; t < p; ++t) {
            u32 tinv = ctx.inv(t);
            cplx et = ctx.unit_root_p(t);
            u64 idx = 0;  // a * tinv as a steps by 1
            for (u32 a = 0; a < p; ++a) {
                next[a] += s[idx] * et;
                idx += tinv;
                if (idx >= p) idx -= p;
            }
        }
        s = std::move(next);
    }
    const double scale = std::pow(double(p), -0.5 * double(m - 1));
    std::vector<cplx> values(p);
    values[0] = {0.0, 0.0};
    for (u32 a = 1; a < p; ++a) values[a] = s[a] * scale;
    return WeightTable(ctx, std::move(values), "hyper-kloosterman(m=" + std::to_string(m) + ")");
}

cplx BivariatePoly::operator()(cplx u, cplx v) const {
    cplx acc{0.0, 0.0};
    cplx upow{1.0, 0.0};
    for (const auto& row : coeff) {
        cplx vpow{1.0, 0.0};
        cplx inner{0.0, 0.0};
        for (const cplx& c : row) {
            inner += c * vpow;
            vpow *= v;
        }
        acc += upow * inner;
        upow *= u;
    }
    return acc;
}

WeightTable hk_composite_weight(const PrimeContext& ctx, u32 m, const RationalMapFp& phi,
                                const BivariatePoly& Phi) {
    if (phi.is_constant()) {
        throw std::invalid_argument("hk_composite_weight: phi must be non-constant");
    }
    WeightTable kl = hyper_kloosterman_table(ctx, m);
    std::vector<cplx> values(ctx.p(), cplx{0.0, 0.0});
    for (u32 n = 0; n < ctx.p(); ++n) {
        auto v = phi(n);
        if (!v || *v == 0) continue;
        cplx k = kl[*v];
        values[n] = Phi(k, std::conj(k));
    }
    return WeightTable(ctx, std::move(values), "hk-composite(m=" + std::to_string(m) + ")");
}

WeightTable fiber_count_weight(const PrimeContext& ctx, const PolyFp& phi) {
    if (poly_degree(phi) < 1) {
        throw std::invalid_argument("fiber_count_weight: deg(phi) must be >= 1");
    }
    std::vector<int> count(ctx.p(), 0);
    for (u32 y = 0; y < ctx.p(); ++y) ++count[poly_eval(ctx, phi, y)];
    std::vector<cplx> values(ctx.p());
    for (u32 x = 0; x < ctx.p(); ++x) values[x] = {double(count[x] - 1), 0.0};
    return WeightTable(ctx, std::move(values), "fiber-count");
}

WeightTable dual_fiber_weight(const PrimeContext& ctx, const PolyFp& phi) {
    if (poly_degree(phi) < 1) {
        throw std::invalid_argument("dual_fiber_weight: deg(phi) must be >= 1");
    }
    const u32 p = ctx.p();
    const double scale = -1.0 / std::sqrt(double(p));
    std::vector<u32> image(p);
    for (u32 x = 0; x < p; ++x) image[x] = poly_eval(ctx, phi, x);
    std::vector<cplx> values(p, cplx{0.0, 0.0});
    for (u32 n = 1; n < p; ++n) {
        cplx acc{0.0, 0.0};
        for (u32 x = 0; x < p; ++x) {
            acc += ctx.unit_root_p(u64(n) * image[x]);
        }
        values[n] = acc * scale;
    }
    return WeightTable(ctx, std::move(values), "dual-fiber");
}

WeightTable delta_weight(const PrimeContext& ctx, u32 u) {
    std::vector<cplx> values(ctx.p(), cplx{0.0, 0.0});
    values[u % ctx.p()] = {std::sqrt(double(ctx.p())), 0.0};
    return WeightTable(ctx, std::move(values), "dirac(u=" + std::to_string(u) + ")");
}

WeightTable additive_weight(const PrimeContext& ctx, u32 a) {
    std::vector<cplx> values(ctx.p());
    for (u32 n = 0; n < ctx.p(); ++n) values[n] = ctx.unit_root_p(u64(a) * n);
    return WeightTable(ctx, std::move(values), "additive(a=" + std::to_string(a) + ")");
}

WeightTable legendre_weight(const PrimeContext& ctx) {
    std::vector<cplx> values(ctx.p());
    values[0] = {0.0, 0.0};
    for (u32 n = 1; n < ctx.p(); ++n) values[n] = {double(ctx.legendre(n)), 0.0};
    return WeightTable(ctx, std::move(values), "legendre");
}

WeightTable quadratic_phase_weight(const PrimeContext& ctx) {
    std::vector<cplx> values(ctx.p());
    for (u32 n = 0; n < ctx.p(); ++n) values[n] = ctx.unit_root_p(u64(n) * n);
    return WeightTable(ctx, std::move(values), "quadratic-phase");
}

WeightTable constant_weight(const PrimeContext& ctx, cplx c) {
    return WeightTable(ctx, std::vector<cplx>(ctx.p(), c), "constant");
}

std::string WeightSpec::label() const {
    switch (kind) {
        case Kind::dirac: return "dirac(u=" + std::to_string(shift) + ")";
        case Kind::additive: return "additive(a=" + std::to_string(shift) + ")";
        case Kind::mixed_char: return "mixed-char(chi=" + std::to_string(chi_index) + ")";
        case Kind::kloosterman: return "kloosterman(a=" + std::to_string(shift) + ")";
        case Kind::hyper_kloosterman: return "hyper-kloosterman(m=" + std::to_string(m) + ")";
        case Kind::hk_composite: return "hk-composite(m=" + std::to_string(m) + ")";
        case Kind::fiber_count: return "fiber-count";
        case Kind::dual_fiber: return "dual-fiber";
        case Kind::legendre: return "legendre";
        case Kind::quadratic_phase: return "quadratic-phase";
        case Kind::constant: return "constant";
    }
    return "unknown";
}

WeightTable make_weight(const PrimeContext& ctx, const WeightSpec& spec) {
    switch (spec.kind) {
        case WeightSpec::Kind::dirac:
            return delta_weight(ctx, ctx.reduce(spec.shift));
        case WeightSpec::Kind::additive:
            return additive_weight(ctx, ctx.reduce(spec.shift));
        case WeightSpec::Kind::mixed_char: {
            DirichletCharacter chi(ctx, spec.chi_index);
            auto phi1 = RationalMapFp::from_int(ctx, spec.phi1_num, spec.phi1_den);
            auto phi2 = RationalMapFp::from_int(ctx, spec.phi2_num, spec.phi2_den);
            return mixed_char_weight(chi, phi1, phi2);
        }
        case WeightSpec::Kind::kloosterman:
            return kloosterman_weight(ctx, ctx.reduce(spec.shift));
        case WeightSpec::Kind::hyper_kloosterman:
            return hyper_kloosterman_table(ctx, spec.m);
        case WeightSpec::Kind::hk_composite: {
            auto phi = RationalMapFp::from_int(ctx, spec.phi1_num, spec.phi1_den);
            return hk_composite_weight(ctx, spec.m, phi, BivariatePoly{spec.big_phi});
        }
        case WeightSpec::Kind::fiber_count:
            return fiber_count_weight(ctx, poly_from_int(ctx, spec.phi1_num));
        case WeightSpec::Kind::dual_fiber:
            return dual_fiber_weight(ctx, poly_from_int(ctx, spec.phi1_num));
        case WeightSpec::Kind::legendre:
            return legendre_weight(ctx);
        case WeightSpec::Kind::quadratic_phase:
            return quadratic_phase_weight(ctx);
        case WeightSpec::Kind::constant:
            return constant_weight(ctx);
    }
    throw std::invalid_argument("make_weight: unknown weight kind");
}

}  // namespace tracelab
