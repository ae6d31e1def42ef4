#include "tracelab/fp_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tracelab {

u32 pow_mod(u32 base, u64 exp, u32 m) {
    u64 result = 1;
    u64 b = base % m;
    while (exp > 0) {
        if (exp & 1) result = (result * b) % m;
        b = (b * b) % m;
        exp >>= 1;
    }
    return static_cast<u32>(result);
}

bool is_prime_u32(u32 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (u32 d = 3; u64(d) * d <= n; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

u32 primitive_root(u32 p) {
    if (p < 3 || !is_prime_u32(p)) {
        throw std::invalid_argument("primitive_root: p = " + std::to_string(p) +
                                    " is not an odd prime");
    }
    // Factor p-1, then test candidates against (p-1)/q for each prime factor q.
    std::vector<u32> factors;
    u32 m = p - 1;
    for (u32 d = 2; u64(d) * d <= m; ++d) {
        if (m % d == 0) {
            factors.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) factors.push_back(m);

    for (u32 g = 2; g < p; ++g) {
        bool ok = true;
        for (u32 q : factors) {
            if (pow_mod(g, (p - 1) / q, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("primitive_root: no generator found");
}

PrimeContext::PrimeContext(u32 p) : p_(p) {
    g_ = primitive_root(p);  // validates p

    dlog_.assign(p_, 0);
    u32 x = 1;
    for (u32 j = 0; j + 1 < p_; ++j) {
        dlog_[x] = j;
        x = mul(x, g_);
    }

    inv_.assign(p_, 0);
    for (u32 a = 1; a < p_; ++a) {
        inv_[a] = pow_mod(a, p_ - 2, p_);
    }

    // g^odd are exactly the non-residues; g itself is one.
    qnr_ = g_;

    roots_p_.resize(p_);
    const double two_pi = 2.0 * std::numbers::pi;
    for (u32 k = 0; k < p_; ++k) {
        double t = two_pi * double(k) / double(p_);
        roots_p_[k] = {std::cos(t), std::sin(t)};
    }
    roots_pm1_.resize(p_ - 1);
    for (u32 k = 0; k + 1 < p_; ++k) {
        double t = two_pi * double(k) / double(p_ - 1);
        roots_pm1_[k] = {std::cos(t), std::sin(t)};
    }
}

int PrimeContext::legendre(u32 x) const {
    x %= p_;
    if (x == 0) return 0;
    return dlog_[x] % 2 == 0 ? 1 : -1;
}

std::optional<u32> PrimeContext::sqrt(u32 a) const {
    a %= p_;
    if (a == 0) return 0u;
    if (legendre(a) != 1) return std::nullopt;
    if (p_ % 4 == 3) {
        return pow_mod(a, (p_ + 1) / 4, p_);
    }
    // Tonelli-Shanks: write p-1 = q * 2^s with q odd.
    u32 s = 0;
    u32 q = p_ - 1;
    while (q % 2 == 0) {
        q /= 2;
        ++s;
    }
    u32 z = pow_mod(qnr_, q, p_);
    u32 c = z;
    u32 r = pow_mod(a, (q + 1) / 2, p_);
    u32 t = pow_mod(a, q, p_);
    u32 m = s;
    while (t != 1) {
        u32 i = 0;
        u32 t2 = t;
        while (t2 != 1) {
            t2 = mul(t2, t2);
            ++i;
        }
        u32 b = c;
        for (u32 j = 0; j + i + 1 < m; ++j) b = mul(b, b);
        r = mul(r, b);
        c = mul(b, b);
        t = mul(t, c);
        m = i;
    }
    return r;
}

Fp2Element fp2_add(const PrimeContext& ctx, Fp2Element x, Fp2Element y) {
    return {ctx.add(x.a, y.a), ctx.add(x.b, y.b)};
}

Fp2Element fp2_sub(const PrimeContext& ctx, Fp2Element x, Fp2Element y) {
    return {ctx.sub(x.a, y.a), ctx.sub(x.b, y.b)};
}

Fp2Element fp2_mul(const PrimeContext& ctx, Fp2Element x, Fp2Element y) {
    // (a + bs)(c + ds) = ac + qnr*bd + (ad + bc)s
    u32 ac = ctx.mul(x.a, y.a);
    u32 bd = ctx.mul(x.b, y.b);
    u32 ad = ctx.mul(x.a, y.b);
    u32 bc = ctx.mul(x.b, y.a);
    return {ctx.add(ac, ctx.mul(ctx.qnr(), bd)), ctx.add(ad, bc)};
}

Fp2Element fp2_conj(const PrimeContext& ctx, Fp2Element x) {
    return {x.a, ctx.neg(x.b)};
}

u32 fp2_norm(const PrimeContext& ctx, Fp2Element x) {
    return ctx.sub(ctx.mul(x.a, x.a), ctx.mul(ctx.qnr(), ctx.mul(x.b, x.b)));
}

DirichletCharacter::DirichletCharacter(const PrimeContext& ctx, u32 index)
    : ctx_(&ctx), index_(index % (ctx.p() - 1)) {}

u32 DirichletCharacter::order() const {
    u32 n = ctx_->p() - 1;
    if (index_ == 0) return 1;
    u32 a = index_;
    u32 b = n;
    while (b != 0) {
        u32 t = a % b;
        a = b;
        b = t;
    }
    return n / a;
}

bool DirichletCharacter::is_real_nontrivial() const {
    return index_ != 0 && 2 * index_ == ctx_->p() - 1;
}

cplx gauss_sum(const DirichletCharacter& chi) {
    if (chi.is_trivial()) {
        throw std::invalid_argument("gauss_sum: character must be non-trivial");
    }
    const PrimeContext& ctx = chi.context();
    cplx acc{0.0, 0.0};
    for (u32 x = 1; x < ctx.p(); ++x) {
        acc += chi(x) * ctx.unit_root_p(x);
    }
    return acc;
}

std::vector<cplx> dft(const PrimeContext& ctx, std::span<const cplx> in) {
    const u32 p = ctx.p();
    if (in.size() != p) {
        throw std::invalid_argument("dft: table length " + std::to_string(in.size()) +
                                    " does not match p = " + std::to_string(p));
    }
    std::vector<cplx> out(p);
    const double scale = 1.0 / std::sqrt(double(p));
    for (u32 z = 0; z < p; ++z) {
        cplx acc{0.0, 0.0};
        u64 idx = 0;  // z*x mod p, stepped additively
        for (u32 x = 0; x < p; ++x) {
            acc += in[x] * ctx.unit_root_p(idx);
            idx += z;
            if (idx >= p) idx -= p;
        }
        out[z] = acc * scale;
    }
    return out;
}

}  // namespace tracelab
