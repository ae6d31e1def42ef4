#include "tracelab/orbits.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tracelab/parallel.hpp"

namespace tracelab {

UpperHalfPoint hecke_point(u32 p, std::optional<u32> t, UpperHalfPoint tau) {
    if (!t) return {tau.x * p, tau.y * p};
    return {(tau.x + double(*t)) / p, tau.y / p};
}

ReductionResult reduce_fundamental(UpperHalfPoint z) {
    if (!(z.y > 0.0)) throw std::invalid_argument("reduce_fundamental: need y > 0");
    Sl2zMatrix m;
    auto translate = [&](i64 k) {
        // left-multiply by (1, -k; 0, 1)
        z.x -= double(k);
        m.a -= k * m.c;
        m.b -= k * m.d;
    };
    auto invert = [&]() {
        // left-multiply by S = (0, -1; 1, 0); z -> -1/z
        double n = z.x * z.x + z.y * z.y;
        z = {-z.x / n, z.y / n};
        Sl2zMatrix s{-m.c, -m.d, m.a, m.b};
        m = s;
    };

    const UpperHalfPoint input = z;
    for (int iter = 0; iter < 100000; ++iter) {
        // nearest integer with ties upward puts x in [-1/2, 1/2)
        i64 k = static_cast<i64>(std::floor(z.x + 0.5));
        if (k != 0) translate(k);
        if (z.x * z.x + z.y * z.y < 1.0) {
            invert();
            continue;
        }
        // boundary of the unit circle: prefer the x <= 0 representative
        if (z.x * z.x + z.y * z.y == 1.0 && z.x > 0.0) invert();
        // recompute in one shot from the exact integer matrix, discarding
        // the roundoff accumulated across the steps
        cplx w{input.x, input.y};
        cplx out = (double(m.a) * w + double(m.b)) / (double(m.c) * w + double(m.d));
        z = {out.real(), out.imag()};
        // the recomputed value can land exactly on a boundary the stepped
        // value only approached; settle the conventions once more
        i64 k2 = static_cast<i64>(std::floor(z.x + 0.5));
        if (k2 != 0) translate(k2);
        if (z.x * z.x + z.y * z.y == 1.0 && z.x > 0.0) {
            // exact reflection on the unit circle: -1/z = -conj(z)
            z.x = -z.x;
            m = {-m.c, -m.d, m.a, m.b};
        }
        return {z, m};
    }
    throw std::runtime_error("reduce_fundamental: reduction did not terminate");
}

cplx TwistedMeasure::total_mass() const {
    cplx acc{0.0, 0.0};
    for (const Atom& a : atoms) acc += a.weight;
    return acc;
}

TwistedMeasure twisted_measure(u32 p, UpperHalfPoint tau, const WeightTable& K, Interval I,
                               int threads) {
    if (I.lo < 1 || I.hi > p || I.lo > I.hi) {
        throw std::invalid_argument("twisted_measure: interval must satisfy 1 <= lo <= hi <= p");
    }
    if (K.p() != p) {
        throw std::invalid_argument("twisted_measure: weight table is modulo a different prime");
    }
    TwistedMeasure mu;
    const u32 len = I.length();
    mu.normalization = 1.0 / double(len);
    mu.atoms.resize(len);
    parallel_chunks(len, 1024, resolve_threads(threads),
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            u32 t = I.lo + static_cast<u32>(i);
                            UpperHalfPoint pt = hecke_point(p, t % p, tau);
                            mu.atoms[i] = {reduce_fundamental(pt).z,
                                           K.at_int(i64(t)) * mu.normalization};
                        }
                    });
    return mu;
}

TwistedMeasure untwisted_full_measure(u32 p, UpperHalfPoint tau, int threads) {
    TwistedMeasure mu;
    mu.normalization = 1.0 / double(p + 1);
    mu.atoms.resize(p + 1);
    parallel_chunks(p + 1, 1024, resolve_threads(threads),
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            std::optional<u32> t;
                            if (i < p) t = static_cast<u32>(i);
                            UpperHalfPoint pt = hecke_point(p, t, tau);
                            mu.atoms[i] = {reduce_fundamental(pt).z, cplx{mu.normalization, 0.0}};
                        }
                    });
    return mu;
}

TwistedMeasure poly_twisted_measure(u32 p, UpperHalfPoint tau, const PrimeContext& ctx,
                                    const PolyFp& phi, Interval I, int threads) {
    if (poly_degree(phi) < 1) {
        throw std::invalid_argument("poly_twisted_measure: deg(phi) must be >= 1");
    }
    if (ctx.p() != p) {
        throw std::invalid_argument("poly_twisted_measure: context is for a different prime");
    }
    // multiplicity of t as a value of phi
    std::vector<u32> count(p, 0);
    for (u32 x = 0; x < p; ++x) ++count[poly_eval(ctx, phi, x)];

    TwistedMeasure mu;
    const u32 len = I.length();
    mu.normalization = 1.0 / double(len);
    mu.atoms.resize(len);
    parallel_chunks(len, 1024, resolve_threads(threads),
                    [&](std::size_t, std::size_t begin, std::size_t end) {
                        for (std::size_t i = begin; i < end; ++i) {
                            u32 t = I.lo + static_cast<u32>(i);
                            UpperHalfPoint pt = hecke_point(p, t % p, tau);
                            double w = double(count[t % p]) * mu.normalization;
                            mu.atoms[i] = {reduce_fundamental(pt).z, cplx{w, 0.0}};
                        }
                    });
    return mu;
}

cplx pair_with_box(const TwistedMeasure& mu, const Box& box) {
    if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) {
        throw std::invalid_argument("pair_with_box: degenerate box");
    }
    cplx acc{0.0, 0.0};
    for (const auto& atom : mu.atoms) {
        if (atom.z.x >= box.x0 && atom.z.x < box.x1 && atom.z.y >= box.y0 && atom.z.y < box.y1) {
            acc += atom.weight;
        }
    }
    return acc;
}

double hyperbolic_box_mass(const Box& box) {
    if (!(box.x0 < box.x1) || !(box.y0 < box.y1)) {
        throw std::invalid_argument("hyperbolic_box_mass: degenerate box");
    }
    const double xa = std::max(box.x0, -0.5);
    const double xb = std::min(box.x1, 0.5);
    if (xa >= xb) return 0.0;
    auto integrand = [&](double x) {
        double circle = std::sqrt(std::max(0.0, 1.0 - x * x));
        double ylo = std::max(box.y0, circle);
        double yhi = box.y1;
        if (ylo >= yhi) return 0.0;
        double upper = std::isinf(yhi) ? 0.0 : 1.0 / yhi;
        return 1.0 / ylo - upper;
    };
    // Simpson rule; the integrand has a kink where the circle crosses y0,
    // so use a fine grid.
    const int n = 40000;  // even
    const double h = (xb - xa) / n;
    double acc = integrand(xa) + integrand(xb);
    for (int i = 1; i < n; ++i) {
        acc += integrand(xa + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0 * (3.0 / std::numbers::pi);
}

std::array<Box, 9> standard_boxes() {
    const double ycuts[5] = {1.0, 1.3, 1.75, 2.5, 4.0};
    std::array<Box, 9> boxes;
    std::size_t i = 0;
    for (int col = 0; col < 2; ++col) {
        double x0 = col == 0 ? -0.5 : 0.0;
        double x1 = col == 0 ? 0.0 : 0.5;
        for (int row = 0; row < 4; ++row) {
            boxes[i++] = {x0, x1, ycuts[row], ycuts[row + 1]};
        }
    }
    boxes[8] = {-0.5, 0.5, 4.0, std::numeric_limits<double>::infinity()};
    return boxes;
}

FourierSideReport fourier_side_check(u32 p, UpperHalfPoint tau, const WeightTable& K, Interval I,
                                     std::span<const cplx> freq_coeffs) {
    if (freq_coeffs.empty()) {
        throw std::invalid_argument("fourier_side_check: need at least one frequency");
    }
    if (I.lo < 1 || I.hi > p || I.lo > I.hi) {
        throw std::invalid_argument("fourier_side_check: bad interval");
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const double inv_len = 1.0 / double(I.length());
    auto e_nz = [&](double n, UpperHalfPoint z) {
        // e(n z) for z in the upper half plane
        double mod = std::exp(-two_pi * n * z.y);
        double arg = two_pi * n * z.x;
        return cplx{mod * std::cos(arg), mod * std::sin(arg)};
    };

    FourierSideReport report;

    // Route A: evaluate g at the (unreduced) Hecke points directly.
    cplx direct{0.0, 0.0};
    for (u32 t = I.lo; t <= I.hi; ++t) {
        UpperHalfPoint zt = hecke_point(p, t % p, tau);
        cplx g{0.0, 0.0};
        for (std::size_t j = 0; j < freq_coeffs.size(); ++j) {
            g += freq_coeffs[j] * e_nz(double(j + 1), zt);
        }
        direct += K.at_int(i64(t)) * g;
    }
    report.direct = direct * inv_len;

    // Route B: per frequency, sqrt(p)/|I| * K'_I(n) * e(n tau / p) with
    // K'_I(n) = (1/p) sum_x Khat(n - x) D_I(x).
    const PrimeContext& ctx = K.context();
    WeightTable khat = dft(K);
    std::vector<cplx> d_kernel(p);
    for (u32 x = 0; x < p; ++x) {
        cplx acc{0.0, 0.0};
        for (u32 t = I.lo; t <= I.hi; ++t) {
            acc += ctx.unit_root_p(u64(t) * x);
        }
        d_kernel[x] = acc;
    }
    cplx via{0.0, 0.0};
    for (std::size_t j = 0; j < freq_coeffs.size(); ++j) {
        u32 n = static_cast<u32>(j + 1);
        cplx kprime{0.0, 0.0};
        for (u32 x = 0; x < p; ++x) {
            kprime += khat[ctx.reduce(i64(n % p) - i64(x))] * d_kernel[x];
        }
        kprime /= double(p);
        UpperHalfPoint tau_over_p{tau.x / p, tau.y / p};
        via += freq_coeffs[j] * e_nz(double(n), tau_over_p) * std::sqrt(double(p)) * inv_len *
               kprime;
    }
    report.via_dft = via;
    report.max_abs_diff = std::abs(report.direct - report.via_dft);
    return report;
}

}  // namespace tracelab
