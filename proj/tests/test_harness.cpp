#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "ptor/oracle.hpp"
#include "ptor/records.hpp"
#include "ptor/sink.hpp"

using namespace ptor;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("ptor_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

ScanRecord random_record(std::mt19937_64& rng) {
    auto coin = [&] { return rng() % 3 != 0; };
    ScanRecord r;
    static const char* kinds[] = {"field", "vptor-min", "family", "huge-p", "bs"};
    r.kind = kinds[rng() % 5];
    if (coin()) r.p = rng() % 100000;
    if (coin()) {
        BigInt d = BigInt(static_cast<unsigned long>(rng()));
        for (int i = rng() % 4; i > 0; --i) d *= static_cast<unsigned long>(rng());
        r.D = d;
    }
    if (coin()) r.m = BigInt(static_cast<long>(rng() >> 1)) * (rng() % 2 ? 1 : -1);
    if (coin()) r.value = static_cast<i64>(rng() % 2000) - 1000;
    if (coin()) r.vptor = static_cast<i64>(rng() % 60);
    if (coin()) r.v_cl = static_cast<i64>(rng() % 10);
    if (coin()) r.v_w = static_cast<i64>(rng() % 2);
    if (coin()) r.delta = static_cast<i64>(rng() % 20);
    if (coin()) r.c_p = std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 80));
    if (coin()) r.gap = -std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(rng() % 60));
    if (coin()) r.h = rng() % 1000000;
    static const char* flags[] = {"", "p-rational", "rho=3;core", "a=9728;b=557872", "delta-only;probably-squarefree"};
    r.flags = flags[rng() % 5];
    return r;
}

int run(const std::string& cmd) {
    int st = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string capture(const std::string& cmd) {
    std::string out;
    FILE* p = ::popen(cmd.c_str(), "r");
    char buf[4096];
    size_t k;
    while ((k = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    ::pclose(p);
    return out;
}

OracleConfig fake_live() {
    OracleConfig c;
    c.mode = OracleMode::live;
    c.executable = FAKE_GP_PATH;
    return c;
}

} // namespace

TEST_CASE("sink round trip of random records") {
    std::mt19937_64 rng(2024);
    std::vector<ScanRecord> recs;
    for (int i = 0; i < 1000; ++i) recs.push_back(random_record(rng));
    for (const char* name : {"r.csv", "r.jsonl"}) {
        fs::path p = tmp(name);
        {
            RecordSink s(p.string(), format_for_path(p.string()), {{"range", "[5,100]"}});
            for (const auto& r : recs) s.write(r);
            CHECK(s.count() == 1000);
            s.close();
        }
        SinkContents c = read_sink(p.string());
        CHECK_FALSE(c.partial);
        REQUIRE(c.records.size() == recs.size());
        for (size_t i = 0; i < recs.size(); ++i) CHECK_MESSAGE(c.records[i] == recs[i], name << " row " << i);
        CHECK(c.meta.at("range") == "[5,100]");
        CHECK(c.meta.at("records") == "1000");
    }
    for (const auto& r : recs) {
        CHECK(from_csv_line(to_csv_line(r)) == r);
        CHECK(from_json_line(to_json_line(r)) == r);
    }
}

TEST_CASE("empty stream writes header and trailer only") {
    fs::path p = tmp("empty.csv");
    {
        RecordSink s(p.string(), SinkFormat::csv, {});
        s.close();
        CHECK(s.count() == 0);
    }
    std::ifstream in(p);
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == kCsvHeader);
    CHECK(l2.rfind("# meta ", 0) == 0);
    CHECK_FALSE(std::getline(in, l3));
    CHECK(read_sink(p.string()).records.empty());
}

TEST_CASE("abandoned sink is marked partial") {
    for (const char* name : {"part.csv", "part.jsonl"}) {
        fs::path p = tmp(name);
        {
            RecordSink s(p.string(), format_for_path(p.string()), {});
            ScanRecord r;
            r.kind = "field";
            s.write(r);
        }
        SinkContents c = read_sink(p.string());
        CHECK(c.partial);
        CHECK(c.records.size() == 1);
    }
    CHECK_THROWS(RecordSink("/nonexistent-dir/x.csv", SinkFormat::csv, {}));
}

TEST_CASE("a table row round-trips and delta-only rows stay distinguishable") {
    FieldRecord f = field_record(field_from_m(BigInt(41)), 2);
    ScanRecord full = to_record(f);
    CHECK(from_csv_line(to_csv_line(full)) == full);
    CHECK(full.vptor == 4);
    FamilyRow fr;
    fr.rho = 20;
    fr.m = fr.core = fr.D = BigInt(1) << 40;
    fr.delta = 19;
    ScanRecord donly = to_record(fr, 2);
    CHECK_FALSE(donly.vptor.has_value());
    CHECK(donly.flags.find("rho=20") != std::string::npos);
    ScanRecord back = from_json_line(to_json_line(donly));
    CHECK(back == donly);
    CHECK_FALSE(back.vptor.has_value());
    ScanRecord bad;
    bad.kind = "x";
    bad.flags = "a,b";
    CHECK_THROWS_AS(to_csv_line(bad), UsageError);
}

TEST_CASE("four-decimal truncation") {
    CHECK(trunc4(2.45145) == "2.4514");
    CHECK(trunc4(2.45139999999) == "2.4514");
    CHECK(trunc4(1.49329) == "1.4932");
    CHECK(trunc4(0.0) == "0.0000");
    CHECK(trunc4(-0.00001) == "0.0000");
    CHECK(trunc4(-1.23456) == "-1.2345");
}

TEST_CASE("script generation is deterministic") {
    FieldSpec f = FieldSpec::quadratic(BigInt(4194305));
    CHECK(gp_script(f, 2, 13) == gp_script(FieldSpec::quadratic(BigInt(4194305)), 2, 13));
    CHECK(gp_script(f, 2, 13) != gp_script(f, 2, 14));
    CHECK(gp_script(f, 2, 13).find("P = x^2 - 4194305;") != std::string::npos);
    auto specs = enumerate_cyclic_cubic(19, 19);
    REQUIRE(specs.size() == 1);
    FieldSpec c = FieldSpec::cubic(specs[0]);
    CHECK(c.key == "cubic:19:1");
    CHECK(c.poly_string() == "x^3 + x^2 - 6*x - 7");
    CHECK(FieldSpec::from_key("cubic:19:1").poly_string() == c.poly_string());
    FieldSpec b = FieldSpec::biquadratic(BigInt(474), BigInt(3));
    CHECK(b.key == "biquad:3:158:474");
    CHECK(b.poly_string() == "x^4 - 322*x^2 + 24025");
    CHECK(FieldSpec::washington(BigInt(513)).poly_string() == "x^3 - 134480895*x^2 - 263169*x - 1");
    CHECK_THROWS_AS(FieldSpec::from_key("nope:1"), UsageError);
}

TEST_CASE("structure consistency") {
    OracleResult r;
    r.key = "quad:4194305";
    r.p = 2;
    r.vptor = 12;
    r.structure = {8192, 2048, 2};
    CHECK_NOTHROW(check_structure(r));
    CHECK(torsion_exponent(r.structure, 2) == 11);
    r.vptor = 11;
    CHECK_THROWS_AS(check_structure(r), IntegrityError);
    OracleResult j = oracle_result_from_json(oracle_result_to_json(r));
    CHECK(j.structure == r.structure);
    CHECK(j.vptor == 11);
}

TEST_CASE("live oracle escalates n for 4194305") {
    fs::path log = tmp("gp.log");
    fs::remove(log);
    ::setenv("FAKE_GP_LOG", log.c_str(), 1);
    OracleClient oc(fake_live());
    OracleResult r = oc.query(FieldSpec::quadratic(BigInt(4194305)), 2);
    ::unsetenv("FAKE_GP_LOG");
    CHECK(r.vptor == 12);
    REQUIRE(r.structure.size() == 3);
    CHECK(r.structure[1] == 2048);
    CHECK(r.structure[2] == 2);
    CHECK(r.n >= 13);
    CHECK(r.provenance.find("gp") == 0);
    std::ifstream in(log);
    std::vector<int> ns;
    std::string line;
    while (std::getline(in, line)) ns.push_back(std::stoi(line.substr(line.rfind('|') + 1)));
    CHECK(ns.front() == 3);
    CHECK(ns.size() >= 3);
    for (size_t i = 1; i < ns.size(); ++i) CHECK(ns[i] > ns[i - 1]);
}

TEST_CASE("live oracle on small fields") {
    OracleClient oc(fake_live());
    CHECK(oc.query(FieldSpec::quadratic(BigInt(41)), 2).vptor == 4);
    CHECK(oc.query(FieldSpec::quadratic(BigInt(5)), 7).vptor == 0);
    OracleResult c = oc.query(FieldSpec::cubic(enumerate_cyclic_cubic(19, 19)[0]), 3);
    CHECK(c.vptor == 1);
    CHECK(c.disc == 361);
    CHECK(c.n == 4);  // a1 = 0 is not below n - 2 at n = 2
}

TEST_CASE("oracle failures are unavailability, not disagreement") {
    OracleClient oc(fake_live());
    CHECK_THROWS_AS(oc.query(FieldSpec::quadratic(BigInt(1000003)), 2), OracleUnavailable);
    ::setenv("FAKE_GP_GARBAGE", "1", 1);
    CHECK_THROWS_AS(oc.query(FieldSpec::quadratic(BigInt(41)), 2), OracleUnavailable);
    ::unsetenv("FAKE_GP_GARBAGE");
    OracleConfig missing = fake_live();
    missing.executable = "/nonexistent/gp";
    OracleClient none(missing);
    CHECK_THROWS_AS(none.query(FieldSpec::quadratic(BigInt(41)), 2), OracleUnavailable);
    OracleConfig capped = fake_live();
    capped.max_n = 8;
    OracleClient small(capped);
    CHECK_THROWS_AS(small.query(FieldSpec::quadratic(BigInt(4194305)), 2), OracleUnavailable);
    OracleClient off(OracleConfig{});
    CHECK_THROWS_AS(off.query(FieldSpec::quadratic(BigInt(41)), 2), OracleUnavailable);

    VerifyReport rep = oracle_verify(oc, {{FieldSpec::quadratic(BigInt(1000003)), 2}});
    CHECK(rep.disagreements.empty());
    CHECK(rep.unavailable.size() == 1);
}

TEST_CASE("concurrent live queries") {
    OracleConfig cfg = fake_live();
    cfg.concurrency = 2;
    OracleClient oc(cfg);
    std::vector<int> got(6);
    std::vector<std::thread> ts;
    for (int i = 0; i < 6; ++i)
        ts.emplace_back([&, i] { got[i] = oc.query(FieldSpec::quadratic(BigInt(i % 2 ? 41 : 229)), i % 2 ? 2 : 3).vptor; });
    for (auto& t : ts) t.join();
    for (int i = 0; i < 6; ++i) CHECK(got[i] == (i % 2 ? 4 : 1));
}

TEST_CASE("verification against the committed fixtures") {
    OracleConfig cfg;
    cfg.mode = OracleMode::fixtures;
    cfg.fixtures = PTOR_FIXTURES;
    OracleClient oc(cfg);
    auto samples = fixture_samples(oc);
    CHECK(samples.size() > 40);
    VerifyReport rep = oracle_verify(oc, samples);
    for (const auto& d : rep.disagreements) FAIL_CHECK(d.key << " p=" << d.p << ": " << d.reason);
    CHECK(rep.unavailable.empty());
    CHECK(rep.checked > 100);
}

TEST_CASE("a tampered fixture is reported as a disagreement") {
    fs::path p = tmp("bad.jsonl");
    {
        std::ofstream out(p);
        out << R"({"key": "quad:41", "p": 2, "vptor": 5})" << "\n";
        out << R"({"key": "cubic:31:2", "p": 2, "vptor": 3})" << "\n";
    }
    OracleConfig cfg;
    cfg.mode = OracleMode::fixtures;
    cfg.fixtures = p.string();
    OracleClient oc(cfg);
    VerifyReport rep = oracle_verify(oc, fixture_samples(oc));
    CHECK(rep.disagreements.size() == 2);
    {
        std::ofstream out(p);
        out << R"({"key": "quad:41", "p": 2, "vptor": 4})" << "\n" << R"({"key": "quad:41", "p": 2, "vptor": 4})" << "\n";
    }
    CHECK_THROWS_AS(load_fixtures(p.string()), OracleUnavailable);
}

TEST_CASE("CLI exit codes and rows") {
    const std::string cli = PTOR_CLI_PATH;
    std::string out = capture(cli + " field --m 41 --p 2");
    CHECK(out.find("vptor=4") != std::string::npos);
    CHECK(out.find("Cp=1.4932") != std::string::npos);
    out = capture(cli + " field --m 5 --p 7");
    CHECK(out.find("vptor=0") != std::string::npos);
    CHECK(out.find("p-rational") != std::string::npos);
    CHECK(run(cli + " field --m 41 --p 2") == 0);
    CHECK(run(cli + " field --m 41 --p 2 --bogus") == 1);
    CHECK(run(cli + " field --m 12 --p 2") == 1);
    CHECK(run(cli + " frobnicate") == 1);
    CHECK(run(cli + " field --D 81624 --p 2 --class-ceiling 1000") == 2);
    CHECK(run(cli + " oracle-verify --oracle off") == 4);
    fs::path bad = tmp("cli_bad.jsonl");
    {
        std::ofstream o(bad);
        o << R"({"key": "quad:41", "p": 2, "vptor": 5})" << "\n";
    }
    CHECK(run(cli + " oracle-verify --fixtures " + bad.string()) == 5);
    CHECK(run(cli + " oracle-verify") == 0);
    fs::path csv = tmp("cli.csv");
    CHECK(run(cli + " scan-delta --p 3 --case ramified --max-d 2000 --out " + csv.string()) == 0);
    SinkContents c = read_sink(csv.string());
    REQUIRE(c.records.size() == 4);
    CHECK(c.records[0].D == 93);
    CHECK(c.meta.at("command") == "scan-delta");
}
