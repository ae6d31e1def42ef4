#include "tracelab/resonance.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace tracelab {

// The identity itself needs the mod-p reductions to exist (everything in
// sight coprime to p, det = de nonzero mod p) and the b-entry to be an
// integer. The stronger amplifier-side constraints (d, e coprime to N,
// gcd(n2, cN) = 1) are enforced by the sampler, not here.
void validate_instance(const ResonanceInstance& inst) {
    if (!inst.ctx) throw std::invalid_argument("resonance: missing prime context");
    const u32 p = inst.ctx->p();
    if (inst.N < 2) throw std::invalid_argument("resonance: N must be >= 2");
    if (inst.c < 1) throw std::invalid_argument("resonance: c must be >= 1");
    if (std::gcd(u64(inst.N), u64(p)) != 1) {
        throw std::invalid_argument("resonance: N must be coprime to p");
    }
    if (std::gcd(inst.d * inst.e, u64(p)) != 1) {
        throw std::invalid_argument("resonance: d, e must be coprime to p");
    }
    if (inst.c % p == 0) {
        throw std::invalid_argument("resonance: c must not be divisible by p");
    }
    if (inst.n1 == 0 || inst.n2 == 0) {
        throw std::invalid_argument("resonance: n1, n2 must be nonzero");
    }
    const u64 cn = inst.c * inst.N;
    i64 prod = inst.n1 * inst.n2 - i64(inst.e);
    if (prod % i64(cn) != 0) {
        throw std::invalid_argument("resonance: need n1*n2 = e (mod c*N)");
    }
}

ResonatingMatrix gamma_of(const ResonanceInstance& inst) {
    validate_instance(inst);
    const u32 p = inst.ctx->p();
    ResonatingMatrix g;
    g.a = inst.n1;
    g.b = (inst.n1 * inst.n2 - i64(inst.e)) / i64(inst.c * inst.N);
    g.c = i64(inst.c * inst.d * inst.N);
    g.d = i64(inst.d) * inst.n2;
    g.mod_p = pgl_normalize(p, inst.ctx->reduce(g.a), inst.ctx->reduce(g.b),
                            inst.ctx->reduce(g.c), inst.ctx->reduce(g.d));
    return g;
}

cplx E_direct(const ResonanceInstance& inst, const WeightTable& K) {
    validate_instance(inst);
    const PrimeContext& ctx = *inst.ctx;
    const u32 p = ctx.p();

    // S(a,b;p) depends only on a*b once a != 0: row[m] = S(1,m;p).
    std::vector<double> row = kloosterman_row(ctx, 1);

    const u32 icdn = ctx.inv(ctx.reduce(i64(inst.c * inst.d * inst.N)));
    const u32 icn = ctx.inv(ctx.reduce(i64(inst.c * inst.N)));
    const u32 e_icdn = ctx.mul(ctx.reduce(i64(inst.e)), icdn);
    const u32 n1r = ctx.reduce(inst.n1);
    const u32 n2r = ctx.reduce(inst.n2);

    std::span<const cplx> kv = K.values();
    cplx acc{0.0, 0.0};
    for (u32 u1 = 0; u1 < p; ++u1) {
        if (kv[u1] == cplx{0.0, 0.0}) continue;
        const u32 s_left = ctx.mul(e_icdn, u1);            // first Kloosterman argument
        const u32 phase1 = ctx.mul(ctx.mul(icdn, u1), n1r);
        cplx outer = kv[u1] * ctx.unit_root_p(phase1);
        cplx inner{0.0, 0.0};
        for (u32 u2 = 0; u2 < p; ++u2) {
            if (kv[u2] == cplx{0.0, 0.0}) continue;
            const u32 s_right = ctx.mul(icn, u2);
            double s;
            if (s_left == 0 && s_right == 0) {
                s = double(p - 1);
            } else if (s_left == 0 || s_right == 0) {
                s = -1.0;  // Ramanujan sum
            } else {
                s = row[ctx.mul(s_left, s_right)];
            }
            const u32 phase2 = ctx.mul(ctx.mul(icn, u2), n2r);
            inner += std::conj(kv[u2]) * s * ctx.unit_root_p(phase2);
        }
        acc += outer * inner;
    }
    return acc;
}

cplx E_via_fourier(const ResonanceInstance& inst, const WeightTable& khat) {
    validate_instance(inst);
    const PrimeContext& ctx = *inst.ctx;
    const u32 p = ctx.p();

    const u32 icn = ctx.inv(ctx.reduce(i64(inst.c * inst.N)));
    const u32 dinv = ctx.inv(ctx.reduce(i64(inst.d)));
    const u32 er = ctx.reduce(i64(inst.e));
    const u32 n1r = ctx.reduce(inst.n1);
    const u32 n2r = ctx.reduce(inst.n2);

    std::span<const cplx> kh = khat.values();
    cplx acc{0.0, 0.0};
    for (u32 z = 1; z < p; ++z) {
        u32 left = ctx.mul(icn, ctx.mul(dinv, ctx.add(ctx.mul(er, z), n1r)));
        u32 right = ctx.neg(ctx.mul(icn, ctx.add(ctx.inv(z), n2r)));
        acc += kh[left] * std::conj(kh[right]);
    }
    return acc * double(p);
}

namespace {

u64 positive_mod(i64 v, u64 c) {
    i64 r = v % i64(c);
    return u64(r < 0 ? r + i64(c) : r);
}

u64 inv_mod_euclid(u64 x, u64 c) {
    i64 r0 = i64(c), r1 = i64(x % c), t0 = 0, t1 = 1;
    while (r1 != 0) {
        i64 q = r0 / r1;
        i64 r2 = r0 - q * r1, t2 = t0 - q * t1;
        r0 = r1; r1 = r2; t0 = t1; t1 = t2;
    }
    return u64(t0 < 0 ? t0 + i64(c) : t0);
}

}  // namespace

bool kloosterman_twisted_mult_check(i64 m, i64 n, u64 c1, u64 c2, double tol) {
    if (std::gcd(c1, c2) != 1) {
        throw std::invalid_argument("kloosterman_twisted_mult_check: need gcd(c1,c2) = 1");
    }
    double lhs = kloosterman_sum(m, n, c1 * c2);
    auto twisted_arg = [&](u64 c_this, u64 c_other) -> i64 {
        if (c_this == 1) return 0;
        u64 inv = inv_mod_euclid(c_other % c_this, c_this);
        return i64(positive_mod(m, c_this) * ((inv * inv) % c_this) % c_this);
    };
    double rhs = kloosterman_sum(twisted_arg(c1, c2), n, c1) *
                 kloosterman_sum(twisted_arg(c2, c1), n, c2);
    return std::abs(lhs - rhs) <= tol * std::max(1.0, std::abs(lhs));
}

std::vector<ResonanceInstance> sample_instances(const PrimeContext& ctx, u32 N,
                                                std::size_t count, u64 seed) {
    const u32 p = ctx.p();
    std::mt19937_64 rng(seed);
    // Small primes for the amplifier divisors, avoiding p and N's divisors.
    std::vector<u64> pool;
    for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (q != p && N % q != 0) pool.push_back(q);
    }
    auto pick_de = [&]() -> u64 {
        switch (rng() % 3) {
            case 0: return 1;
            case 1: return pool[rng() % pool.size()];
            default: {
                u64 a = pool[rng() % pool.size()];
                u64 b = pool[rng() % pool.size()];
                return a * b;
            }
        }
    };

    std::vector<ResonanceInstance> out;
    while (out.size() < count) {
        ResonanceInstance inst;
        inst.ctx = &ctx;
        inst.N = N;
        inst.c = 1 + rng() % 10;
        inst.d = pick_de();
        inst.e = pick_de();
        if (std::gcd(inst.d * inst.e, u64(p) * N) != 1) continue;
        const u64 cn = inst.c * N;
        u64 n2 = 0;
        for (int tries = 0; tries < 64; ++tries) {
            u64 cand = 1 + rng() % (4 * cn);
            if (std::gcd(cand, cn) == 1) {
                n2 = cand;
                break;
            }
        }
        if (n2 == 0) continue;
        // n1 = e * n2^{-1} mod cN, represented in (-cN/2, cN/2]
        u64 n2inv = inv_mod_euclid(n2 % cn, cn);
        u64 n1m = (inst.e % cn) * n2inv % cn;
        i64 n1 = i64(n1m);
        if (n1 > i64(cn) / 2) n1 -= i64(cn);
        if (n1 == 0) continue;
        inst.n1 = n1;
        inst.n2 = i64(n2);
        validate_instance(inst);
        out.push_back(inst);
    }
    return out;
}

}  // namespace tracelab
