#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "tracelab/orbits.hpp"

using namespace tracelab;

namespace {

// apply an SL2(Z) matrix to a point, independently of the reducer
UpperHalfPoint apply(const Sl2zMatrix& m, UpperHalfPoint z) {
    cplx w{z.x, z.y};
    cplx out = (double(m.a) * w + double(m.b)) / (double(m.c) * w + double(m.d));
    return {out.real(), out.imag()};
}

bool in_fundamental_domain(UpperHalfPoint z) {
    return z.x >= -0.5 - 1e-12 && z.x < 0.5 + 1e-12 && z.x * z.x + z.y * z.y >= 1.0 - 1e-12;
}

}  // namespace

TEST_CASE("hecke points") {
    UpperHalfPoint i{0.0, 1.0};
    UpperHalfPoint z0 = hecke_point(5, 0u, i);
    CHECK(z0.x == 0.0);
    CHECK(z0.y == doctest::Approx(0.2).epsilon(1e-15));
    UpperHalfPoint zinf = hecke_point(5, std::nullopt, i);
    CHECK(zinf.y == doctest::Approx(5.0).epsilon(1e-15));
    UpperHalfPoint z2 = hecke_point(5, 2u, i);
    CHECK(z2.x == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(z2.y == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("fundamental domain reduction: worked points") {
    // i is already reduced
    ReductionResult r1 = reduce_fundamental({0.0, 1.0});
    CHECK(r1.z.x == 0.0);
    CHECK(r1.z.y == 1.0);
    CHECK(r1.m.det() == 1);

    // i/5 inverts to 5i
    ReductionResult r2 = reduce_fundamental({0.0, 0.2});
    CHECK(r2.z.x == doctest::Approx(0.0));
    CHECK(r2.z.y == doctest::Approx(5.0).epsilon(1e-12));

    // 0.4 + 0.2i reduces somewhere in F with exact matrix bookkeeping
    ReductionResult r3 = reduce_fundamental({0.4, 0.2});
    CHECK(in_fundamental_domain(r3.z));
    UpperHalfPoint moved = apply(r3.m, {0.4, 0.2});
    CHECK(moved.x == doctest::Approx(r3.z.x).epsilon(1e-12));
    CHECK(moved.y == doctest::Approx(r3.z.y).epsilon(1e-12));

    CHECK_THROWS_AS(reduce_fundamental({0.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(reduce_fundamental({0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("reduction bookkeeping on 10^5 random points") {
    std::mt19937_64 rng(31415926);
    std::uniform_real_distribution<double> ux(-8.0, 8.0);
    std::uniform_real_distribution<double> logy(-9.0, 2.0);
    for (int rep = 0; rep < 100000; ++rep) {
        UpperHalfPoint z{ux(rng), std::exp(logy(rng))};
        ReductionResult r = reduce_fundamental(z);
        CHECK(in_fundamental_domain(r.z));
        CHECK(r.m.det() == 1);
        // forward application expands deep points by y_out/y_in, so the
        // comparison scale carries that conditioning factor
        UpperHalfPoint moved = apply(r.m, z);
        double scale = std::max(1.0, r.z.y / z.y);
        CHECK(std::abs(moved.x - r.z.x) <= 1e-12 * scale);
        CHECK(std::abs(moved.y - r.z.y) <= 1e-12 * scale);
        // the exact inverse matrix must recover the input; for tiny y the
        // c*x+d cancellation caps the achievable precision near 1e-15 abs
        Sl2zMatrix inv{r.m.d, -r.m.b, -r.m.c, r.m.a};
        UpperHalfPoint back = apply(inv, r.z);
        CHECK(std::abs(back.x - z.x) <= 1e-12 * std::max(1.0, std::abs(z.x)));
        CHECK(std::abs(back.y - z.y) <= 1e-12 * std::max(z.y, 1e-2));
    }
}

TEST_CASE("boundary ties go to the x <= 0 side") {
    ReductionResult r = reduce_fundamental({0.5, 3.0});
    CHECK(r.z.x == -0.5);
    ReductionResult r2 = reduce_fundamental({-0.5, 3.0});
    CHECK(r2.z.x == -0.5);
    // circle boundary: the right half maps to the left half
    double y = std::sqrt(1.0 - 0.3 * 0.3);
    ReductionResult r3 = reduce_fundamental({0.3, y});
    CHECK(r3.z.x == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("twisted measure: mass accounting") {
    const u32 p = 101;
    PrimeContext ctx(p);
    UpperHalfPoint tau{0.0, 1.0};

    // K = 1 over the full interval: total mass 1
    TwistedMeasure m1 = twisted_measure(p, tau, constant_weight(ctx), {1, p});
    CHECK(m1.atoms.size() == p);
    CHECK(std::abs(m1.total_mass() - cplx{1.0, 0.0}) < 1e-12);

    // Legendre twist over the full interval: complete character sum is 0
    TwistedMeasure m2 = twisted_measure(p, tau, legendre_weight(ctx), {1, p});
    CHECK(std::abs(m2.total_mass()) < 1e-12);

    // mass equals the direct weighted sum on a partial interval
    Interval I{5, 77};
    WeightTable K = kloosterman_weight(ctx, 1);
    TwistedMeasure m3 = twisted_measure(p, tau, K, I);
    cplx expect{0.0, 0.0};
    for (u32 t = I.lo; t <= I.hi; ++t) expect += K.at_int(t);
    expect /= double(I.length());
    CHECK(std::abs(m3.total_mass() - expect) < 1e-12);

    CHECK_THROWS_AS(twisted_measure(p, tau, K, {0, p}), std::invalid_argument);
    CHECK_THROWS_AS(twisted_measure(p, tau, K, {1, p + 1}), std::invalid_argument);

    // determinism across thread counts
    TwistedMeasure m4 = twisted_measure(p, tau, K, I, 4);
    REQUIRE(m4.atoms.size() == m3.atoms.size());
    for (std::size_t i = 0; i < m3.atoms.size(); ++i) {
        CHECK(m3.atoms[i].z.x == m4.atoms[i].z.x);
        CHECK(m3.atoms[i].weight == m4.atoms[i].weight);
    }
}

TEST_CASE("pair_with_box and the hyperbolic quadrature oracle") {
    const u32 p = 211;
    PrimeContext ctx(p);
    TwistedMeasure mu = untwisted_full_measure(p, {0.0, 1.0});
    CHECK(mu.atoms.size() == p + 1);
    CHECK(std::abs(mu.total_mass() - cplx{1.0, 0.0}) < 1e-12);

    // whole fundamental domain: mass 1 on both sides
    Box whole{-0.5, 0.5, 0.5, std::numeric_limits<double>::infinity()};
    CHECK(std::abs(pair_with_box(mu, whole) - cplx{1.0, 0.0}) < 1e-12);
    CHECK(hyperbolic_box_mass(whole) == doctest::Approx(1.0).epsilon(1e-6));

    // strip y >= 2: exact value 3/(2 pi), quadrature should nail it
    Box strip{-0.5, 0.5, 2.0, std::numeric_limits<double>::infinity()};
    CHECK(hyperbolic_box_mass(strip) == doctest::Approx(3.0 / (2.0 * std::numbers::pi)).epsilon(1e-9));

    // empty box
    Box empty{0.1, 0.2, 0.2, 0.3};  // below the fundamental domain
    CHECK(std::abs(pair_with_box(mu, empty)) == 0.0);
    CHECK(hyperbolic_box_mass(empty) == 0.0);

    Box degenerate{0.3, 0.3, 1.0, 2.0};
    CHECK_THROWS_AS(pair_with_box(mu, degenerate), std::invalid_argument);
    CHECK_THROWS_AS(hyperbolic_box_mass(degenerate), std::invalid_argument);

    // standard boxes partition sanity: masses positive, tail matches closed form
    auto boxes = standard_boxes();
    double total = 0.0;
    for (const Box& b : boxes) {
        double m = hyperbolic_box_mass(b);
        CHECK(m > 0.01);
        total += m;
    }
    CHECK(hyperbolic_box_mass(boxes[8]) == doctest::Approx(3.0 / (4.0 * std::numbers::pi)).epsilon(1e-9));
    CHECK(total < 1.0);  // the sliver below y = 1 is deliberately uncovered
}

TEST_CASE("untwisted measure approaches the hyperbolic measure (smoke, p = 503)") {
    TwistedMeasure mu = untwisted_full_measure(503, {0.0, 1.0});
    for (const Box& b : standard_boxes()) {
        double diff = std::abs(pair_with_box(mu, b) - cplx{hyperbolic_box_mass(b), 0.0});
        CHECK(diff < 0.12);
    }
}

TEST_CASE("polynomial twists") {
    const u32 p = 101;
    PrimeContext ctx(p);
    UpperHalfPoint tau{0.0, 1.0};

    // phi = X: identical to the untwisted interval measure
    PolyFp x = poly_from_int(ctx, std::vector<i64>{0, 1});
    Interval I{1, p};
    TwistedMeasure m1 = poly_twisted_measure(p, tau, ctx, x, I);
    TwistedMeasure m2 = twisted_measure(p, tau, constant_weight(ctx), I);
    REQUIRE(m1.atoms.size() == m2.atoms.size());
    for (std::size_t i = 0; i < m1.atoms.size(); ++i) {
        CHECK(std::abs(m1.atoms[i].weight - m2.atoms[i].weight) < 1e-15);
        CHECK(m1.atoms[i].z.x == m2.atoms[i].z.x);
    }

    // atom weights are fiber multiplicities: total = #{x : phi(x) in I}/|I|
    PolyFp xsq = poly_from_int(ctx, std::vector<i64>{0, 0, 1});
    Interval J{1, 50};
    TwistedMeasure m3 = poly_twisted_measure(p, tau, ctx, xsq, J);
    CHECK(m3.atoms.size() == J.length());
    u32 count = 0;
    for (u32 v = 0; v < p; ++v) {
        u32 img = u32((u64(v) * v) % p);
        u32 img_in_interval = img == 0 ? p : img;  // t runs through [1, p]
        if (img_in_interval >= J.lo && img_in_interval <= J.hi) ++count;
    }
    CHECK(std::abs(m3.total_mass() - cplx{double(count) / J.length(), 0.0}) < 1e-12);

    // equivalence with the 1 + fiber_count weight on the same interval
    WeightTable fc = fiber_count_weight(ctx, xsq);
    std::vector<cplx> shifted(fc.values().begin(), fc.values().end());
    for (auto& v : shifted) v += 1.0;
    WeightTable mult(ctx, std::move(shifted), "1+fiber");
    TwistedMeasure m4 = twisted_measure(p, tau, mult, J);
    REQUIRE(m4.atoms.size() == m3.atoms.size());
    for (std::size_t i = 0; i < m3.atoms.size(); ++i) {
        CHECK(std::abs(m3.atoms[i].weight - m4.atoms[i].weight) < 1e-12);
    }
}

TEST_CASE("fourier side identity at finite truncation") {
    const u32 p = 101;
    PrimeContext ctx(p);
    UpperHalfPoint tau{0.3, 1.7};

    // zero weight: both sides vanish
    {
        FourierSideReport r = fourier_side_check(p, tau, constant_weight(ctx, cplx{0.0, 0.0}),
                                                 {1, p}, std::vector<cplx>{cplx{1.0, 0.0}});
        CHECK(std::abs(r.direct) == 0.0);
        CHECK(std::abs(r.via_dft) == 0.0);
    }
    // single frequency, dirac weight: both sides equal the single-term value
    {
        std::vector<cplx> freqs{cplx{1.0, 0.0}};
        WeightTable K = delta_weight(ctx, 3);
        FourierSideReport r = fourier_side_check(p, tau, K, {1, p}, freqs);
        CHECK(r.max_abs_diff < 1e-12);
        // independent direct evaluation
        cplx expect{0.0, 0.0};
        const double two_pi = 2 * std::numbers::pi;
        for (u32 t = 1; t <= p; ++t) {
            UpperHalfPoint z = hecke_point(p, t % p, tau);
            expect += K.at_int(t) * std::exp(-two_pi * z.y) *
                      cplx{std::cos(two_pi * z.x), std::sin(two_pi * z.x)};
        }
        expect /= double(p);
        CHECK(std::abs(r.direct - expect) < 1e-12);
    }
    // random weight, 3 frequencies, partial interval: discrepancy < 1e-8 relative
    {
        std::mt19937_64 rng(515);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<cplx> vals(p);
        for (auto& v : vals) v = {unif(rng), unif(rng)};
        WeightTable K(ctx, std::move(vals), "random");
        std::vector<cplx> freqs{cplx{0.7, 0.1}, cplx{-0.3, 0.9}, cplx{0.2, -0.4}};
        FourierSideReport r = fourier_side_check(p, tau, K, {17, 80}, freqs);
        CHECK(r.max_abs_diff <= 1e-8 * std::max(1.0, std::abs(r.direct)));
    }
    CHECK_THROWS_AS(fourier_side_check(p, tau, constant_weight(ctx), {1, p}, std::vector<cplx>{}),
                    std::invalid_argument);
}
