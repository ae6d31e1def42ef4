#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tracelab/cli.hpp"
#include "tracelab/parallel.hpp"

using namespace tracelab;
using njson = nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("thread resolution: explicit value, env fallback, default") {
    CHECK(resolve_threads(5) == 5);
    setenv("TRACE_LAB_THREADS", "3", 1);
    CHECK(resolve_threads(0) == 3);
    CHECK(resolve_threads(2) == 2);
    unsetenv("TRACE_LAB_THREADS");
    CHECK(resolve_threads(0) == 1);
}

TEST_CASE("weight spec JSON round trip is lossless") {
    for (const std::string& text :
         {std::string(R"({"kind":"dirac","u":3})"),
          std::string(R"({"kind":"kloosterman","a":2})"),
          std::string(R"({"kind":"hyper-kloosterman","m":4})"),
          std::string(R"({"kind":"mixed-char","chi":2,"phi1_num":[0,1],"phi1_den":[1],"phi2_num":[0,0,1],"phi2_den":[1]})"),
          std::string(R"({"kind":"fiber-count","phi":[0,1,1]})"),
          std::string(R"({"kind":"legendre"})")}) {
        WeightSpec spec = weight_spec_from_json_text(text);
        std::string dumped = weight_spec_to_json(spec).dump();
        WeightSpec again = weight_spec_from_json_text(dumped);
        CHECK(weight_spec_to_json(again).dump() == dumped);
    }
    CHECK_THROWS_AS(weight_spec_from_json_text(R"({"kind":"nope"})"), std::invalid_argument);
}

TEST_CASE("experiment config round trips through JSON") {
    ExperimentConfig cfg;
    cfg.command = "corr-spectrum";
    cfg.primes = {17, 19};
    cfg.weight.kind = WeightSpec::Kind::kloosterman;
    cfg.weight.shift = 2;
    cfg.M = 3.25;
    cfg.P = 0.5;
    cfg.interval_lo = 3;
    cfg.interval_hi = 15;
    cfg.seed = 987654321;
    cfg.threads = 4;
    cfg.level = 3;
    cfg.count = 55;
    cfg.tau_x = -0.25;
    cfg.tau_y = 1.75;
    cfg.poly = {1, 0, 2};

    std::string text = config_to_json(cfg).dump();
    ExperimentConfig back = config_from_json_text(text);
    CHECK(config_to_json(back).dump() == text);
    CHECK(back.primes == cfg.primes);
    CHECK(back.seed == cfg.seed);
    CHECK(back.threads == cfg.threads);
    CHECK(back.tau_y == cfg.tau_y);
    CHECK(back.poly == cfg.poly);
}

TEST_CASE("verify-sec16 pass and failure exit codes") {
    CliResult pass = run({"verify-sec16", "--case", "kloosterman", "--p", "17", "--M", "3"});
    CHECK(pass.exit_code == 0);
    njson j = njson::parse(pass.out);
    CHECK(j["schema"] == "trace-lab/1");
    CHECK(j["results"]["status"] == "pass");

    // the quadratic case genuinely fails beyond p = 7 (see the ledger note)
    CliResult fail = run({"verify-sec16", "--case", "quadratic", "--p", "19", "--M", "2"});
    CHECK(fail.exit_code == 1);
    CHECK(njson::parse(fail.out)["results"]["status"] == "fail");

    // below the stated range: an explicit result, exit 0
    CliResult oor = run({"verify-sec16", "--case", "quadratic", "--p", "5", "--M", "2"});
    CHECK(oor.exit_code == 0);
    CHECK(njson::parse(oor.out)["results"]["status"] == "out-of-range");
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}).exit_code == 2);
    CHECK(run({"corr", "spectrum", "--weight", "legendre"}).exit_code == 2);  // no prime
    CHECK(run({"verify-sec16", "--p", "17"}).exit_code == 2);                 // missing --case
    CHECK(run({"corr", "one", "--p", "7", "--weight", "legendre"}).exit_code == 2);  // no gamma
    CHECK(run({"weight", "eval", "--p", "9", "--weight", "legendre"}).exit_code == 2);  // not prime
    CHECK(run({"weight", "eval", "--p", "7", "--weight", "{\"kind\":\"zzz\"}"}).exit_code == 2);
}

TEST_CASE("corr spectrum: 24 entries at p = 3") {
    CliResult r = run({"corr", "spectrum", "--p", "3", "--weight", "legendre", "--M", "2"});
    REQUIRE(r.exit_code == 0);
    njson j = njson::parse(r.out);
    CHECK(j["results"]["class_count"] == 24);
    CHECK(j["results"]["entries"].size() == 24);
}

TEST_CASE("determinism: byte-identical output across runs and thread counts") {
    std::vector<std::string> base = {"corr", "spectrum", "--p", "23", "--weight",
                                     "kloosterman", "--M", "3"};
    CliResult a = run(base);
    CliResult b = run(base);
    CHECK(a.out == b.out);

    std::vector<std::string> t4 = base;
    t4.insert(t4.end(), {"--threads", "4"});
    std::vector<std::string> t8 = base;
    t8.insert(t8.end(), {"--threads", "8"});
    CHECK(run(t4).out == a.out);
    CHECK(run(t8).out == a.out);

    // seeded sampling: same seed same bytes, different seed different bytes
    std::vector<std::string> res1 = {"resonance-check", "--p", "13", "--weight", "legendre",
                                     "--count", "5", "--seed", "42"};
    std::vector<std::string> res2 = {"resonance-check", "--p", "13", "--weight", "legendre",
                                     "--count", "5", "--seed", "43"};
    CHECK(run(res1).out == run(res1).out);
    CHECK(run(res1).out != run(res2).out);
}

TEST_CASE("output and manifest files") {
    std::string out_path = "/tmp/tracelab_test_out.json";
    std::remove(out_path.c_str());
    std::remove((out_path + ".manifest.json").c_str());
    CliResult r = run({"goodness", "--p", "11", "--weight", "legendre", "--M", "2", "--out", out_path});
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.empty());

    std::ifstream f(out_path);
    REQUIRE(f.good());
    njson j = njson::parse(f);
    CHECK(j["results"]["goodness"]["is_good"] == true);
    CHECK(j["results"]["goodness"]["cell_counts"]["triangular"] > 0);

    std::ifstream mf(out_path + ".manifest.json");
    REQUIRE(mf.good());
    njson m = njson::parse(mf);
    CHECK(m["tool_version"] == "0.1.0");
    CHECK(m["config"]["command"] == "goodness");
    CHECK(m.contains("wall_time_ms"));
}

TEST_CASE("resonance-check passes on a catalog weight") {
    CliResult r = run({"resonance-check", "--p", "17", "--weight", "quadratic-phase", "--count",
                       "10", "--seed", "7"});
    REQUIRE(r.exit_code == 0);
    njson j = njson::parse(r.out);
    CHECK(j["results"]["status"] == "pass");
    CHECK(j["results"]["instances"].size() == 10);
    for (const auto& inst : j["results"]["instances"]) {
        CHECK(inst["max_discrepancy"].get<double>() < 1e-6 * 17 * 17);
    }
}

TEST_CASE("orbit command emits boxes, csv and svg") {
    std::string csv = "/tmp/tracelab_orbit.csv";
    std::string svg = "/tmp/tracelab_orbit.svg";
    std::remove(csv.c_str());
    std::remove(svg.c_str());
    CliResult r = run({"orbit", "--p", "211", "--weight", "legendre", "--tau", "0,1",
                       "--csv", csv, "--svg", svg});
    REQUIRE(r.exit_code == 0);
    njson j = njson::parse(r.out);
    CHECK(j["results"]["atom_count"] == 211);
    CHECK(j["results"]["boxes"].size() == 9);

    std::ifstream fc(csv);
    REQUIRE(fc.good());
    std::string header;
    std::getline(fc, header);
    CHECK(header == "x,y,re_w,im_w");
    std::size_t lines = 0;
    for (std::string line; std::getline(fc, line);) ++lines;
    CHECK(lines == 211);

    std::ifstream fs(svg);
    REQUIRE(fs.good());
    std::string svg_text((std::istreambuf_iterator<char>(fs)), std::istreambuf_iterator<char>());
    CHECK(svg_text.find("<svg") != std::string::npos);
    CHECK(svg_text.find("<circle") != std::string::npos);
}

TEST_CASE("twisted-sum and exponent-scan commands") {
    CliResult ts = run({"twisted-sum", "--p", "101", "--weight", "kloosterman", "--support", "0.5"});
    REQUIRE(ts.exit_code == 0);
    njson j = njson::parse(ts.out);
    CHECK(j["results"]["form"] == "Delta");
    CHECK(j["results"]["Q"].get<double>() <= 50.0);

    CliResult scan = run({"exponent-scan", "--weight", "additive", "--p", "211", "--p", "307",
                          "--p", "401", "--p", "503", "--support", "0.5"});
    REQUIRE(scan.exit_code == 0);
    njson s = njson::parse(scan.out);
    CHECK(s["results"]["rows"].size() == 4);
    CHECK(s["results"]["used"].get<int>() >= 3);
}

TEST_CASE("dft command matches weight eval of the transform") {
    CliResult r = run({"dft", "--p", "7", "--weight", "{\"kind\":\"dirac\",\"u\":2}"});
    REQUIRE(r.exit_code == 0);
    njson j = njson::parse(r.out);
    // dft of the dirac weight is the additive character table: all unit modulus
    CHECK(j["results"]["label"] == "dft(dirac(u=2))");
    for (const auto& v : j["results"]["values"]) {
        double re = v[0].get<double>(), im = v[1].get<double>();
        CHECK(std::abs(std::sqrt(re * re + im * im) - 1.0) < 1e-12);
    }
}
