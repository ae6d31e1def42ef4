#include "tracelab/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tracelab/correlation.hpp"
#include "tracelab/modular.hpp"
#include "tracelab/orbits.hpp"
#include "tracelab/parallel.hpp"
#include "tracelab/resonance.hpp"

namespace tracelab {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

JsonValue pgl_json(const PglElement& g) {
    JsonValue arr = JsonValue::array();
    arr.push(std::int64_t(g.a));
    arr.push(std::int64_t(g.b));
    arr.push(std::int64_t(g.c));
    arr.push(std::int64_t(g.d));
    return arr;
}

JsonValue proj_point_json(const ProjP1& pt) {
    JsonValue j = JsonValue::object();
    if (pt.infinite) {
        j.set("infinite", true);
    } else {
        j.set("a", std::int64_t(pt.z.a));
        j.set("b", std::int64_t(pt.z.b));
    }
    return j;
}

JsonValue envelope(const ExperimentConfig& cfg, JsonValue results) {
    ExperimentConfig identity = cfg;
    identity.threads = 0;  // execution detail; kept out of the deterministic echo
    JsonValue j = JsonValue::object();
    j.set("schema", kSchemaTag);
    j.set("command", cfg.command);
    j.set("config", config_to_json(identity));
    j.set("results", std::move(results));
    return j;
}

struct OutputSink {
    const ExperimentConfig& cfg;
    std::ostream& out;
    std::ostream& err;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void emit(JsonValue results) const {
        std::string text = envelope(cfg, std::move(results)).dump();
        if (!cfg.out_path.empty()) {
            std::ofstream f(cfg.out_path);
            if (!f) throw std::runtime_error("cannot open output file: " + cfg.out_path);
            f << text << "\n";
        } else {
            out << text << "\n";
        }
        write_manifest();
    }

    void write_manifest() const {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        JsonValue m = JsonValue::object();
        m.set("schema", kSchemaTag);
        m.set("tool_version", kToolVersion);
        m.set("config", config_to_json(cfg));
        m.set("wall_time_ms", std::int64_t(ms));
        if (!cfg.out_path.empty()) {
            std::ofstream f(cfg.out_path + ".manifest.json");
            f << m.dump() << "\n";
        } else {
            err << m.dump() << "\n";
        }
    }
};

u32 single_prime(const ExperimentConfig& cfg) {
    if (cfg.primes.size() != 1) {
        throw CLI::ValidationError("--p", "exactly one prime is required");
    }
    return cfg.primes[0];
}

Interval interval_of(const ExperimentConfig& cfg, u32 p) {
    if (cfg.interval_lo == 0 && cfg.interval_hi == 0) return {1, p};
    if (cfg.interval_lo < 1 || cfg.interval_hi > p || cfg.interval_lo > cfg.interval_hi) {
        throw CLI::ValidationError("--interval", "need 1 <= lo <= hi <= p");
    }
    return {cfg.interval_lo, cfg.interval_hi};
}

JsonValue weight_table_json(const WeightTable& K, bool include_values) {
    JsonValue j = JsonValue::object();
    j.set("label", K.label());
    j.set("p", std::int64_t(K.p()));
    j.set("sup_norm", K.sup_norm());
    j.set("l2_norm", K.l2_norm());
    if (include_values) {
        JsonValue vals = JsonValue::array();
        for (cplx v : K.values()) vals.push(json_complex(v));
        j.set("values", std::move(vals));
    }
    return j;
}

int cmd_weight_eval(const ExperimentConfig& cfg, const OutputSink& sink, bool transform) {
    PrimeContext ctx(single_prime(cfg));
    WeightTable K = make_weight(ctx, cfg.weight);
    if (transform) K = dft(K);
    sink.emit(weight_table_json(K, true));
    return 0;
}

int cmd_corr_one(const ExperimentConfig& cfg, const OutputSink& sink) {
    PrimeContext ctx(single_prime(cfg));
    if (cfg.gamma_entries.size() != 4) {
        throw CLI::ValidationError("--gamma", "need four entries a,b,c,d");
    }
    PglElement g = pgl_normalize(ctx.p(), ctx.reduce(cfg.gamma_entries[0]),
                                 ctx.reduce(cfg.gamma_entries[1]), ctx.reduce(cfg.gamma_entries[2]),
                                 ctx.reduce(cfg.gamma_entries[3]));
    WeightTable K = make_weight(ctx, cfg.weight);
    cplx c = corr_sum(dft(K), g);
    JsonValue r = JsonValue::object();
    r.set("gamma", pgl_json(g));
    r.set("value", json_complex(c));
    r.set("abs_over_sqrt_p", std::abs(c) / std::sqrt(double(ctx.p())));
    sink.emit(std::move(r));
    return 0;
}

void write_spectrum_csv(const std::string& path, const PrimeContext& ctx,
                        const CorrelationSpectrum& spec) {
    if (!spec.has_full_values()) {
        throw std::runtime_error("spectrum CSV requires full retention (p <= 101)");
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open CSV file: " + path);
    f << "a,b,c,d,re,im,abs_over_sqrt_p\n";
    const double rsp = 1.0 / std::sqrt(double(ctx.p()));
    std::vector<PglElement> classes = pgl_enumerate(ctx.p());
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const PglElement& g = classes[i];
        cplx v = spec.values()[i];
        f << g.a << ',' << g.b << ',' << g.c << ',' << g.d << ',' << fmt17(v.real()) << ','
          << fmt17(v.imag()) << ',' << fmt17(std::abs(v) * rsp) << "\n";
    }
}

JsonValue spectrum_json(const CorrelationSpectrum& spec, bool include_entries) {
    JsonValue j = JsonValue::object();
    j.set("weight", spec.weight_label());
    j.set("p", std::int64_t(spec.context().p()));
    j.set("M", spec.threshold_m());
    j.set("cutoff", spec.cutoff());
    j.set("class_count", spec.class_count());
    j.set("max_abs", spec.max_abs());
    j.set("sum_sq", spec.sum_sq());
    JsonValue exc = JsonValue::array();
    for (const auto& e : spec.exceptional()) {
        JsonValue row = JsonValue::object();
        row.set("gamma", pgl_json(e.gamma));
        row.set("value", json_complex(e.value));
        exc.push(std::move(row));
    }
    j.set("exceptional_count", spec.exceptional().size());
    j.set("exceptional", std::move(exc));
    if (include_entries && spec.has_full_values()) {
        std::vector<PglElement> classes = pgl_enumerate(spec.context().p());
        JsonValue entries = JsonValue::array();
        for (std::size_t i = 0; i < classes.size(); ++i) {
            JsonValue row = JsonValue::object();
            row.set("gamma", pgl_json(classes[i]));
            row.set("value", json_complex(spec.values()[i]));
            entries.push(std::move(row));
        }
        j.set("entries", std::move(entries));
    }
    return j;
}

int cmd_corr_spectrum(const ExperimentConfig& cfg, const OutputSink& sink) {
    PrimeContext ctx(single_prime(cfg));
    WeightTable K = make_weight(ctx, cfg.weight);
    CorrelationSpectrum spec = spectrum(K, cfg.M, cfg.threads);
    if (!cfg.csv_path.empty()) write_spectrum_csv(cfg.csv_path, ctx, spec);
    sink.emit(spectrum_json(spec, ctx.p() <= 31));
    return 0;
}

JsonValue goodness_json(const GoodnessReport& report) {
    JsonValue j = JsonValue::object();
    j.set("is_good", report.is_good);
    j.set("M", report.m);
    j.set("pair_count", report.pairs.size());
    JsonValue pairs = JsonValue::array();
    for (const auto& q : report.pairs) {
        JsonValue pj = JsonValue::object();
        pj.set("x", proj_point_json(q.first));
        pj.set("y", proj_point_json(q.second));
        pairs.push(std::move(pj));
    }
    j.set("pairs", std::move(pairs));
    auto cell_name = [](ExceptionalCell c) {
        switch (c) {
            case ExceptionalCell::triangular: return "triangular";
            case ExceptionalCell::parabolic: return "parabolic";
            case ExceptionalCell::torus: return "torus";
            case ExceptionalCell::normalizer: return "normalizer";
            case ExceptionalCell::unclassified: return "unclassified";
        }
        return "unclassified";
    };
    JsonValue counts = JsonValue::object();
    counts.set("triangular", report.count(ExceptionalCell::triangular));
    counts.set("parabolic", report.count(ExceptionalCell::parabolic));
    counts.set("torus", report.count(ExceptionalCell::torus));
    counts.set("normalizer", report.count(ExceptionalCell::normalizer));
    counts.set("unclassified", report.count(ExceptionalCell::unclassified));
    j.set("cell_counts", std::move(counts));
    JsonValue entries = JsonValue::array();
    for (const auto& e : report.entries) {
        JsonValue row = JsonValue::object();
        row.set("gamma", pgl_json(e.entry.gamma));
        row.set("cell", cell_name(e.cell));
        if (e.cell == ExceptionalCell::torus || e.cell == ExceptionalCell::normalizer) {
            row.set("pair_index", e.pair_index);
        }
        row.set("abs", std::abs(e.entry.value));
        entries.push(std::move(row));
    }
    j.set("entries", std::move(entries));
    return j;
}

int cmd_goodness(const ExperimentConfig& cfg, const OutputSink& sink) {
    PrimeContext ctx(single_prime(cfg));
    WeightTable K = make_weight(ctx, cfg.weight);
    CorrelationSpectrum spec = spectrum(K, cfg.M, cfg.threads);
    GoodnessReport report = classify_exceptional(spec, cfg.M);
    JsonValue j = spectrum_json(spec, false);
    j.set("goodness", goodness_json(report));
    sink.emit(std::move(j));
    return 0;
}

int cmd_verify_sec16(const ExperimentConfig& cfg, const OutputSink& sink,
                     const std::string& case_name, i64 param) {
    Sec16Case which;
    if (case_name == "dirac") which = Sec16Case::dirac;
    else if (case_name == "additive") which = Sec16Case::additive;
    else if (case_name == "kloosterman") which = Sec16Case::kloosterman;
    else if (case_name == "quadratic") which = Sec16Case::quadratic;
    else if (case_name == "character") which = Sec16Case::character;
    else throw CLI::ValidationError("--case", "unknown case '" + case_name + "'");

    u32 p = single_prime(cfg);
    Sec16Report report = verify_sec16(which, p, cfg.M, param, cfg.threads);

    JsonValue j = JsonValue::object();
    j.set("case", case_name);
    j.set("p", std::int64_t(p));
    j.set("M", cfg.M);
    j.set("param", param);
    const char* status = report.status == Sec16Report::Status::pass          ? "pass"
                         : report.status == Sec16Report::Status::fail        ? "fail"
                                                                             : "out-of-range";
    j.set("status", status);
    j.set("expected_count", report.expected_count);
    j.set("observed_count", report.observed_count);
    JsonValue missing = JsonValue::array();
    for (const auto& g : report.missing) missing.push(pgl_json(g));
    JsonValue unexpected = JsonValue::array();
    for (const auto& g : report.unexpected) unexpected.push(pgl_json(g));
    j.set("missing", std::move(missing));
    j.set("unexpected", std::move(unexpected));
    j.set("expected_good", report.expected_good);
    j.set("observed_good", report.observed_good);
    sink.emit(std::move(j));
    return report.status == Sec16Report::Status::fail ? 1 : 0;
}

int cmd_twisted_sum(const ExperimentConfig& cfg, const OutputSink& sink) {
    u32 p = single_prime(cfg);
    PrimeContext ctx(p);
    WeightTable K = make_weight(ctx, cfg.weight);
    TestFunctionV V(cfg.P);
    std::size_t need = static_cast<std::size_t>(std::floor(2.0 * cfg.P * double(p)));
    std::size_t n_max = cfg.n_max > 0 ? cfg.n_max : need;
    CuspFormCoeffs f = delta_coefficients(n_max);
    cplx s = twisted_sum(f, K, V, p);
    JsonValue j = JsonValue::object();
    j.set("form", f.label);
    j.set("weight", K.label());
    j.set("p", std::int64_t(p));
    j.set("P", cfg.P);
    j.set("Q", V.Q());
    j.set("value", json_complex(s));
    j.set("abs", std::abs(s));
    j.set("local_exponent", std::abs(s) > 0 ? std::log(std::abs(s)) / std::log(double(p)) : 0.0);
    sink.emit(std::move(j));
    return 0;
}

int cmd_exponent_scan(const ExperimentConfig& cfg, const OutputSink& sink) {
    if (cfg.primes.size() < 3) {
        throw CLI::ValidationError("--primes", "need at least 3 primes");
    }
    std::vector<u32> primes = cfg.primes;
    std::sort(primes.begin(), primes.end());
    std::size_t n_max = cfg.n_max;
    if (n_max == 0) {
        n_max = static_cast<std::size_t>(std::floor(2.0 * cfg.P * double(primes.back()))) + 1;
    }
    CuspFormCoeffs f = delta_coefficients(n_max);
    ExponentScanReport report = exponent_scan(f, cfg.weight, primes, cfg.P, cfg.threads);

    if (!cfg.csv_path.empty()) {
        std::ofstream csv(cfg.csv_path);
        if (!csv) throw std::runtime_error("cannot open CSV file: " + cfg.csv_path);
        csv << "p,weight_label,P,Q,re,im,abs,local_exponent\n";
        for (const auto& row : report.rows) {
            csv << row.p << ',' << report.weight_label << ',' << fmt17(report.P) << ','
                << fmt17(report.Q) << ',' << fmt17(row.value.real()) << ','
                << fmt17(row.value.imag()) << ',' << fmt17(std::abs(row.value)) << ','
                << fmt17(row.local_exponent) << "\n";
        }
    }

    JsonValue j = JsonValue::object();
    j.set("form", f.label);
    j.set("weight", report.weight_label);
    j.set("P", report.P);
    j.set("Q", report.Q);
    j.set("slope", report.slope);
    j.set("intercept", report.intercept);
    j.set("residual_rms", report.residual_rms);
    j.set("used", report.used);
    JsonValue rows = JsonValue::array();
    for (const auto& row : report.rows) {
        JsonValue r = JsonValue::object();
        r.set("p", std::int64_t(row.p));
        r.set("value", json_complex(row.value));
        r.set("abs", std::abs(row.value));
        r.set("local_exponent", row.local_exponent);
        rows.push(std::move(r));
    }
    j.set("rows", std::move(rows));
    sink.emit(std::move(j));
    return 0;
}

int cmd_resonance_check(const ExperimentConfig& cfg, const OutputSink& sink) {
    u32 p = single_prime(cfg);
    PrimeContext ctx(p);
    WeightTable K = make_weight(ctx, cfg.weight);
    WeightTable khat = dft(K);
    auto instances = sample_instances(ctx, cfg.level, cfg.count, cfg.seed);

    const double tol = 1e-6 * double(p) * double(p);
    double worst = 0.0;
    JsonValue rows = JsonValue::array();
    for (const auto& inst : instances) {
        ResonatingMatrix g = gamma_of(inst);
        cplx e_direct = E_direct(inst, K);
        cplx e_fourier = E_via_fourier(inst, khat);
        cplx p_corr = double(p) * corr_sum(khat, g.mod_p);
        double d1 = std::abs(e_direct - e_fourier);
        double d2 = std::abs(e_direct - p_corr);
        double d = std::max(d1, d2);
        worst = std::max(worst, d);
        JsonValue r = JsonValue::object();
        r.set("c", std::int64_t(inst.c));
        r.set("d", std::int64_t(inst.d));
        r.set("e", std::int64_t(inst.e));
        r.set("n1", inst.n1);
        r.set("n2", inst.n2);
        r.set("gamma_mod_p", pgl_json(g.mod_p));
        r.set("det", g.det());
        r.set("E_direct", json_complex(e_direct));
        r.set("E_via_fourier", json_complex(e_fourier));
        r.set("p_times_corr", json_complex(p_corr));
        r.set("max_discrepancy", d);
        rows.push(std::move(r));
    }
    bool pass = worst < tol;
    JsonValue j = JsonValue::object();
    j.set("weight", K.label());
    j.set("p", std::int64_t(p));
    j.set("N", std::int64_t(cfg.level));
    j.set("count", std::int64_t(instances.size()));
    j.set("seed", std::int64_t(cfg.seed));
    j.set("tolerance", tol);
    j.set("worst_discrepancy", worst);
    j.set("status", pass ? "pass" : "fail");
    j.set("instances", std::move(rows));
    sink.emit(std::move(j));
    return pass ? 0 : 1;
}

void write_orbit_csv(const std::string& path, const TwistedMeasure& mu) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open CSV file: " + path);
    f << "x,y,re_w,im_w\n";
    for (const auto& atom : mu.atoms) {
        f << fmt17(atom.z.x) << ',' << fmt17(atom.z.y) << ',' << fmt17(atom.weight.real()) << ','
          << fmt17(atom.weight.imag()) << "\n";
    }
}

void write_orbit_svg(const std::string& path, const TwistedMeasure& mu) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open SVG file: " + path);
    const double width = 600.0, height = 700.0, y_max = 4.5;
    auto sx = [&](double x) { return (x + 0.5) * width; };
    auto sy = [&](double y) { return height - (y / y_max) * height; };
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // fundamental domain outline: walls at x = +-1/2 and the unit arc
    f << "<line x1=\"" << sx(-0.5) << "\" y1=\"" << sy(std::sqrt(3.0) / 2) << "\" x2=\""
      << sx(-0.5) << "\" y2=\"" << sy(y_max) << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << sx(0.5) << "\" y1=\"" << sy(std::sqrt(3.0) / 2) << "\" x2=\"" << sx(0.5)
      << "\" y2=\"" << sy(y_max) << "\" stroke=\"black\"/>\n";
    f << "<path d=\"M " << sx(-0.5) << ' ' << sy(std::sqrt(3.0) / 2);
    for (int i = 1; i <= 64; ++i) {
        double x = -0.5 + double(i) / 64.0;
        f << " L " << sx(x) << ' ' << sy(std::sqrt(1.0 - x * x));
    }
    f << "\" fill=\"none\" stroke=\"black\"/>\n";
    double wmax = 1e-300;
    for (const auto& atom : mu.atoms) wmax = std::max(wmax, std::abs(atom.weight));
    for (const auto& atom : mu.atoms) {
        double mag = std::abs(atom.weight) / wmax;
        const char* color = atom.weight.real() >= 0 ? "#1f4e9c" : "#b03030";
        f << "<circle cx=\"" << sx(atom.z.x) << "\" cy=\"" << sy(std::min(atom.z.y, y_max))
          << "\" r=\"" << 1.0 + 2.0 * mag << "\" fill=\"" << color << "\" fill-opacity=\"0.6\"/>\n";
    }
    f << "</svg>\n";
}

int cmd_orbit(const ExperimentConfig& cfg, const OutputSink& sink) {
    u32 p = single_prime(cfg);
    PrimeContext ctx(p);
    UpperHalfPoint tau{cfg.tau_x, cfg.tau_y};
    Interval I = interval_of(cfg, p);

    TwistedMeasure mu;
    std::string twist_label;
    if (!cfg.poly.empty()) {
        PolyFp phi = poly_from_int(ctx, cfg.poly);
        mu = poly_twisted_measure(p, tau, ctx, phi, I, cfg.threads);
        twist_label = "poly";
    } else {
        WeightTable K = make_weight(ctx, cfg.weight);
        mu = twisted_measure(p, tau, K, I, cfg.threads);
        twist_label = K.label();
    }

    if (!cfg.csv_path.empty()) write_orbit_csv(cfg.csv_path, mu);
    if (!cfg.svg_path.empty()) write_orbit_svg(cfg.svg_path, mu);

    JsonValue boxes = JsonValue::array();
    for (const Box& box : standard_boxes()) {
        cplx pairing = pair_with_box(mu, box);
        double hyper = hyperbolic_box_mass(box);
        JsonValue bj = JsonValue::object();
        JsonValue lim = JsonValue::array();
        lim.push(box.x0);
        lim.push(box.x1);
        lim.push(box.y0);
        lim.push(std::isinf(box.y1) ? JsonValue("inf") : JsonValue(box.y1));
        bj.set("box", std::move(lim));
        bj.set("pairing", json_complex(pairing));
        bj.set("hyperbolic_mass", hyper);
        bj.set("abs_diff", std::abs(pairing - cplx{hyper, 0.0}));
        boxes.push(std::move(bj));
    }
    JsonValue j = JsonValue::object();
    j.set("twist", twist_label);
    j.set("p", std::int64_t(p));
    j.set("tau", JsonValue::array().push(tau.x).push(tau.y));
    j.set("interval", JsonValue::array().push(std::int64_t(I.lo)).push(std::int64_t(I.hi)));
    j.set("atom_count", mu.atoms.size());
    j.set("total_mass", json_complex(mu.total_mass()));
    j.set("boxes", std::move(boxes));
    sink.emit(std::move(j));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"trace-lab: trace weights mod p, correlation sums over PGL2(F_p), "
                 "twisted sums of modular-form coefficients, and twisted Hecke orbits"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string weight_arg = "kloosterman";
    std::string case_name;
    i64 sec16_param = 1;

    auto add_common = [&](CLI::App* sub, bool with_weight = true) {
        sub->add_option("--p", cfg.primes, "prime modulus (repeatable)");
        if (with_weight) {
            sub->add_option("--weight", weight_arg,
                            "weight descriptor: bare kind or JSON object");
        }
        sub->add_option("--threads", cfg.threads, "worker threads (0 = TRACE_LAB_THREADS or 1)");
        sub->add_option("--out", cfg.out_path, "output JSON path (default stdout)");
        sub->add_option("--seed", cfg.seed, "RNG seed for any sampling");
    };

    CLI::App* weight_cmd = app.add_subcommand("weight", "weight table operations");
    weight_cmd->require_subcommand(1);
    CLI::App* weight_eval = weight_cmd->add_subcommand("eval", "construct and dump a weight table");
    add_common(weight_eval);

    CLI::App* dft_cmd = app.add_subcommand("dft", "unitary DFT of a weight table");
    add_common(dft_cmd);

    CLI::App* corr_cmd = app.add_subcommand("corr", "correlation sums");
    corr_cmd->require_subcommand(1);
    CLI::App* corr_one = corr_cmd->add_subcommand("one", "single correlation sum C(K;gamma)");
    add_common(corr_one);
    corr_one->add_option("--gamma", cfg.gamma_entries, "matrix entries a,b,c,d")->delimiter(',');
    CLI::App* corr_spectrum = corr_cmd->add_subcommand("spectrum", "all p^3-p correlation sums");
    add_common(corr_spectrum);
    corr_spectrum->add_option("--M", cfg.M, "exceptional threshold multiplier");
    corr_spectrum->add_option("--csv", cfg.csv_path, "per-class CSV dump path");

    CLI::App* goodness_cmd = app.add_subcommand("goodness", "exceptional-set classification");
    add_common(goodness_cmd);
    goodness_cmd->add_option("--M", cfg.M, "exceptional threshold multiplier");

    CLI::App* verify_cmd = app.add_subcommand("verify-sec16", "closed-form regression cases");
    add_common(verify_cmd, false);
    verify_cmd->add_option("--case", case_name, "dirac|additive|kloosterman|quadratic|character")
        ->required();
    verify_cmd->add_option("--M", cfg.M, "exceptional threshold multiplier");
    verify_cmd->add_option("--param", sec16_param, "case parameter (u, a, or character index)");

    CLI::App* tsum_cmd = app.add_subcommand("twisted-sum", "S_V(Delta, K; p)");
    add_common(tsum_cmd);
    tsum_cmd->add_option("--support", cfg.P, "dyadic support parameter P");
    tsum_cmd->add_option("--nmax", cfg.n_max, "coefficient cutoff override");

    CLI::App* scan_cmd = app.add_subcommand("exponent-scan", "|S_V| across primes with OLS slope");
    add_common(scan_cmd);
    scan_cmd->add_option("--support", cfg.P, "dyadic support parameter P");
    scan_cmd->add_option("--nmax", cfg.n_max, "coefficient cutoff override");
    scan_cmd->add_option("--csv", cfg.csv_path, "per-prime CSV path");

    CLI::App* res_cmd = app.add_subcommand("resonance-check", "E = p*C(K;gamma) identity");
    add_common(res_cmd);
    res_cmd->add_option("--N", cfg.level, "level N >= 2 coprime to p");
    res_cmd->add_option("--count", cfg.count, "number of sampled instances");

    CLI::App* orbit_cmd = app.add_subcommand("orbit", "twisted Hecke-orbit measure");
    add_common(orbit_cmd);
    orbit_cmd->add_option("--tau", [&cfg](const std::vector<std::string>& vals) {
        if (vals.size() != 1) return false;
        return std::sscanf(vals[0].c_str(), "%lf,%lf", &cfg.tau_x, &cfg.tau_y) == 2;
    }, "base point x,y in the upper half plane");
    orbit_cmd->add_option("--interval", [&cfg](const std::vector<std::string>& vals) {
        if (vals.size() != 1) return false;
        return std::sscanf(vals[0].c_str(), "%u:%u", &cfg.interval_lo, &cfg.interval_hi) == 2;
    }, "interval lo:hi within [1,p]");
    orbit_cmd->add_option("--poly", cfg.poly, "polynomial twist coefficients c0,c1,...")
        ->delimiter(',');
    orbit_cmd->add_option("--csv", cfg.csv_path, "atom CSV path");
    orbit_cmd->add_option("--svg", cfg.svg_path, "scatter SVG path");

    try {
        std::vector<std::string> argv(args);
        std::reverse(argv.begin(), argv.end());
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help and friends
            out << app.help() << std::flush;
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        cfg.weight = parse_weight_arg(weight_arg);
        cfg.threads = resolve_threads(cfg.threads);

        OutputSink sink{cfg, out, err};
        if (weight_eval->parsed()) {
            cfg.command = "weight-eval";
            return cmd_weight_eval(cfg, sink, false);
        }
        if (dft_cmd->parsed()) {
            cfg.command = "dft";
            return cmd_weight_eval(cfg, sink, true);
        }
        if (corr_one->parsed()) {
            cfg.command = "corr-one";
            return cmd_corr_one(cfg, sink);
        }
        if (corr_spectrum->parsed()) {
            cfg.command = "corr-spectrum";
            return cmd_corr_spectrum(cfg, sink);
        }
        if (goodness_cmd->parsed()) {
            cfg.command = "goodness";
            return cmd_goodness(cfg, sink);
        }
        if (verify_cmd->parsed()) {
            cfg.command = "verify-sec16";
            return cmd_verify_sec16(cfg, sink, case_name, sec16_param);
        }
        if (tsum_cmd->parsed()) {
            cfg.command = "twisted-sum";
            return cmd_twisted_sum(cfg, sink);
        }
        if (scan_cmd->parsed()) {
            cfg.command = "exponent-scan";
            return cmd_exponent_scan(cfg, sink);
        }
        if (res_cmd->parsed()) {
            cfg.command = "resonance-check";
            return cmd_resonance_check(cfg, sink);
        }
        if (orbit_cmd->parsed()) {
            cfg.command = "orbit";
            return cmd_orbit(cfg, sink);
        }
        err << "usage error: no subcommand\n";
        return 2;
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tracelab
