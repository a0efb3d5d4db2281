#include "ptor/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <semaphore>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>
#include "json.hpp"

namespace ptor {

using nlohmann::json;

// ---- field specs ---------------------------------------------------------

FieldSpec FieldSpec::quadratic(const BigInt& m) {
    field_from_m(m);
    FieldSpec f;
    f.kind = Kind::quadratic;
    f.key = "quad:" + m.get_str();
    f.poly = {1, 0, BigInt(-m)};
    return f;
}

FieldSpec FieldSpec::biquadratic(const BigInt& m1, const BigInt& m2) {
    field_from_m(m1);
    field_from_m(m2);
    if (m1 == m2) throw UsageError("biquadratic field needs distinct quadratic subfields");
    BigInt m3 = squarefree_core(BigInt(m1 * m2)).core;
    if (m3 == 1) throw UsageError("biquadratic field needs distinct quadratic subfields");
    std::vector<BigInt> s{m1, m2, m3};
    std::sort(s.begin(), s.end());
    FieldSpec f;
    f.kind = Kind::biquadratic;
    f.key = "biquad:" + s[0].get_str() + ":" + s[1].get_str() + ":" + s[2].get_str();
    // Minimal polynomial of sqrt a + sqrt b.
    const BigInt &a = s[0], &b = s[1];
    f.poly = {1, 0, BigInt(-2 * (a + b)), 0, BigInt((a - b) * (a - b))};
    f.subfields = s;
    return f;
}

FieldSpec FieldSpec::cubic(const CubicFieldSpec& s) {
    FieldSpec f;
    f.kind = Kind::cubic;
    f.key = s.key();
    f.poly = {1, s.poly.c2, s.poly.c1, s.poly.c0};
    return f;
}

FieldSpec FieldSpec::washington(const BigInt& N) {
    Cubic P = washington_poly(N);
    FieldSpec f;
    f.kind = Kind::washington;
    f.key = "washington:" + N.get_str();
    f.poly = {1, P.c2, P.c1, P.c0};
    return f;
}

FieldSpec FieldSpec::from_key(const std::string& key) {
    auto parts = [&] {
        std::vector<std::string> v;
        std::stringstream ss(key);
        std::string t;
        while (std::getline(ss, t, ':')) v.push_back(t);
        return v;
    }();
    try {
        if (parts.size() == 2 && parts[0] == "quad") return quadratic(BigInt(parts[1]));
        if (parts.size() == 4 && parts[0] == "biquad") return biquadratic(BigInt(parts[1]), BigInt(parts[2]));
        if (parts.size() == 2 && parts[0] == "washington") return washington(BigInt(parts[1]));
        if (parts.size() == 3 && parts[0] == "cubic") {
            u64 f = std::stoull(parts[1]);
            i64 b = std::stoll(parts[2]);
            for (const auto& s : enumerate_cyclic_cubic(f, f))
                if (s.b == b) return cubic(s);
        }
    } catch (const std::invalid_argument&) {
    }
    throw UsageError("unrecognised field key: " + key);
}

std::string FieldSpec::poly_string() const {
    const int deg = static_cast<int>(poly.size()) - 1;
    std::string s;
    for (int i = 0; i <= deg; ++i) {
        const BigInt& c = poly[static_cast<size_t>(i)];
        if (c == 0) continue;
        const int e = deg - i;
        std::string mono = e == 0 ? "" : e == 1 ? "x" : "x^" + std::to_string(e);
        BigInt a = abs(c);
        if (s.empty())
            s += c < 0 ? "-" : "";
        else
            s += c < 0 ? " - " : " + ";
        if (a != 1 || e == 0) s += a.get_str() + (e == 0 ? "" : "*");
        s += mono;
    }
    return s.empty() ? "0" : s;
}

// ---- results -------------------------------------------------------------

int torsion_exponent(const std::vector<BigInt>& structure, u64 p) {
    int best = 0;
    for (size_t i = 1; i < structure.size(); ++i)
        if (auto v = padic_valuation(structure[i], p)) best = std::max(best, *v);
    return best;
}

void check_structure(const OracleResult& r) {
    if (r.vptor < 0) throw IntegrityError("negative vptor from oracle for " + r.key);
    if (r.structure.empty()) return;
    int sum = 0;
    for (size_t i = 1; i < r.structure.size(); ++i) {
        auto v = padic_valuation(r.structure[i], r.p);
        if (!v) throw IntegrityError("zero entry in oracle structure for " + r.key);
        sum += *v;
    }
    if (sum != r.vptor)
        throw IntegrityError(fmt::format("oracle structure for {} has torsion valuation {} but vptor={}", r.key, sum,
                                         r.vptor));
}

namespace {

BigInt json_big(const json& j) {
    return j.is_string() ? BigInt(j.get<std::string>()) : BigInt(j.dump());
}

} // namespace

OracleResult oracle_result_from_json(const std::string& line) {
    json j = json::parse(line);
    OracleResult r;
    r.key = j.at("key").get<std::string>();
    r.p = j.at("p").get<u64>();
    r.vptor = j.at("vptor").get<int>();
    if (j.contains("structure"))
        for (const auto& e : j.at("structure")) r.structure.push_back(json_big(e));
    if (j.contains("n")) r.n = j.at("n").get<int>();
    if (j.contains("disc")) r.disc = json_big(j.at("disc"));
    if (j.contains("poly")) r.poly = j.at("poly").get<std::string>();
    if (j.contains("provenance")) r.provenance = j.at("provenance").get<std::string>();
    return r;
}

std::string oracle_result_to_json(const OracleResult& r) {
    json j;
    j["key"] = r.key;
    j["p"] = r.p;
    j["vptor"] = r.vptor;
    if (!r.structure.empty()) {
        json s = json::array();
        for (const auto& e : r.structure) s.push_back(e.get_str());
        j["structure"] = s;
    }
    if (r.n) j["n"] = r.n;
    if (r.disc) j["disc"] = r.disc->get_str();
    if (r.poly) j["poly"] = *r.poly;
    j["provenance"] = r.provenance;
    return j.dump();
}

std::map<std::pair<std::string, u64>, OracleResult> load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw OracleUnavailable("cannot open fixture file " + path);
    std::map<std::pair<std::string, u64>, OracleResult> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        OracleResult r;
        try {
            r = oracle_result_from_json(line);
        } catch (const std::exception& e) {
            throw OracleUnavailable(fmt::format("{}:{}: {}", path, lineno, e.what()));
        }
        auto k = std::make_pair(r.key, r.p);
        if (!out.emplace(k, std::move(r)).second)
            throw OracleUnavailable(fmt::format("{}:{}: duplicate fixture", path, lineno));
    }
    return out;
}

// ---- script and live client ----------------------------------------------

std::string gp_script(const FieldSpec& f, u64 p, int n) {
    return fmt::format(
        "\\\\ v_p(#T_K) from the ray class group of modulus p^n\n"
        "P = {};\n"
        "p = {};\n"
        "n = {};\n"
        "K = bnfinit(P, 1);\n"
        "Kpn = bnrinit(K, p^n);\n"
        "C5 = component(Kpn, 5);\n"
        "Hpn0 = component(C5, 1);\n"
        "Hpn = component(C5, 2);\n"
        "Hpn1 = component(Hpn, 1);\n"
        "print(\"vptor=\", valuation(Hpn0 / Hpn1, p));\n"
        "print(\"structure=\", vector(#Hpn, k, p^valuation(Hpn[k], p)));\n"
        "print(\"disc=\", K.disc);\n"
        "print(\"version=\", version());\n"
        "quit\n",
        f.poly_string(), p, n);
}

struct OracleClient::Gate {
    explicit Gate(unsigned n) : sem(static_cast<std::ptrdiff_t>(n)) {}
    std::counting_semaphore<64> sem;
};

OracleClient::OracleClient(OracleConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.concurrency = std::clamp(cfg_.concurrency, 1u, 64u);
    gate_ = std::make_unique<Gate>(cfg_.concurrency);
    if (cfg_.mode == OracleMode::fixtures) {
        fixtures_ = load_fixtures(cfg_.fixtures);
        std::ifstream in(cfg_.fixtures);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#') {
                auto r = oracle_result_from_json(line);
                order_.emplace_back(r.key, r.p);
            }
    }
    if (cfg_.mode == OracleMode::live && cfg_.executable.empty())
        if (const char* e = std::getenv(kOracleEnv)) cfg_.executable = e;
}

OracleClient::~OracleClient() = default;

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

std::vector<BigInt> parse_vector(const std::string& s) {
    std::vector<BigInt> v;
    std::string t;
    for (char c : s) {
        if (c == '[' || c == ']' || c == ' ' || c == '\r') continue;
        if (c == ',') {
            if (!t.empty()) v.emplace_back(t);
            t.clear();
        } else if ((c >= '0' && c <= '9') || c == '-') {
            t += c;
        } else {
            throw std::invalid_argument("bad vector " + s);
        }
    }
    if (!t.empty()) v.emplace_back(t);
    return v;
}

} // namespace

OracleResult OracleClient::run_live(const FieldSpec& f, u64 p, int n) {
    if (cfg_.executable.empty())
        throw OracleUnavailable(std::string("no CAS executable configured (set ") + kOracleEnv + ")");
    if (::access(cfg_.executable.c_str(), X_OK) != 0)
        throw OracleUnavailable("CAS executable not runnable: " + cfg_.executable);

    static std::atomic<unsigned> serial{0};
    auto path = std::filesystem::temp_directory_path() /
                fmt::format("ptor-oracle-{}-{}.gp", ::getpid(), serial.fetch_add(1));
    {
        std::ofstream out(path);
        out << gp_script(f, p, n);
        if (!out) throw OracleUnavailable("cannot write oracle script " + path.string());
    }
    std::string text;
    int status;
    {
        gate_->sem.acquire();
        std::string cmd = shell_quote(cfg_.executable) + " -q -f " + shell_quote(path.string()) + " 2>&1";
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) {
            gate_->sem.release();
            std::filesystem::remove(path);
            throw OracleUnavailable("cannot start " + cfg_.executable);
        }
        char buf[4096];
        size_t k;
        while ((k = std::fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, k);
        status = ::pclose(pipe);
        gate_->sem.release();
    }
    std::filesystem::remove(path);
    if (status != 0)
        throw OracleUnavailable(fmt::format("CAS exited with status {} for {}: {}", status, f.key, text));

    OracleResult r;
    r.key = f.key;
    r.p = p;
    r.n = n;
    r.poly = f.poly_string();
    bool have_v = false, have_s = false;
    std::istringstream lines(text);
    std::string line;
    try {
        while (std::getline(lines, line)) {
            if (line.rfind("vptor=", 0) == 0) {
                r.vptor = std::stoi(line.substr(6));
                have_v = true;
            } else if (line.rfind("structure=", 0) == 0) {
                for (auto& e : parse_vector(line.substr(10)))
                    if (e != 1) r.structure.push_back(e);
                have_s = true;
            } else if (line.rfind("disc=", 0) == 0) {
                r.disc = BigInt(line.substr(5));
            } else if (line.rfind("version=", 0) == 0) {
                r.provenance = "gp " + line.substr(8);
            }
        }
    } catch (const std::exception& e) {
        throw OracleUnavailable("unparsable CAS reply for " + f.key + ": " + e.what());
    }
    if (!have_v || !have_s) throw OracleUnavailable("incomplete CAS reply for " + f.key + ": " + text);
    return r;
}

OracleResult OracleClient::query(const FieldSpec& f, u64 p, int n_hint) {
    switch (cfg_.mode) {
    case OracleMode::off:
        throw OracleUnavailable("oracle is off");
    case OracleMode::fixtures: {
        auto it = fixtures_.find({f.key, p});
        if (it == fixtures_.end()) throw OracleUnavailable(fmt::format("no fixture for {} at p={}", f.key, p));
        check_structure(it->second);
        return it->second;
    }
    case OracleMode::live:
        break;
    }
    int n = n_hint > 0 ? n_hint : (p == 2 ? 3 : 2);
    for (;;) {
        OracleResult r = run_live(f, p, n);
        check_structure(r);
        int a1 = torsion_exponent(r.structure, p);
        // The torsion exponent must sit strictly below p^(n - margin).
        if (a1 < n - cfg_.margin) return r;
        int next = std::max(2 * n, a1 + cfg_.margin + 1);
        if (next > cfg_.max_n)
            throw OracleUnavailable(fmt::format("n escalation for {} exceeded {}", f.key, cfg_.max_n));
        n = next;
    }
}

// ---- verification --------------------------------------------------------

std::vector<VerifySample> fixture_samples(const OracleClient& oracle) {
    std::vector<VerifySample> out;
    for (const auto& [key, p] : oracle.fixture_keys()) out.push_back({FieldSpec::from_key(key), p});
    return out;
}

VerifyReport oracle_verify(OracleClient& oracle, const std::vector<VerifySample>& samples, const TorsionOptions& opt) {
    VerifyReport rep;
    for (const auto& s : samples) {
        const std::string tag = fmt::format("{} p={}", s.field.key, s.p);
        OracleResult r;
        try {
            r = oracle.query(s.field, s.p);
        } catch (const OracleUnavailable& e) {
            rep.unavailable.push_back(tag + ": " + e.what());
            continue;
        } catch (const IntegrityError& e) {
            rep.disagreements.push_back({s.field.key, s.p, std::nullopt, -1, e.what()});
            continue;
        }
        auto disagree = [&](std::optional<int> native, std::string why) {
            rep.disagreements.push_back({s.field.key, s.p, native, r.vptor, std::move(why)});
        };
        if (r.poly && *r.poly != s.field.poly_string())
            disagree(std::nullopt, "recorded polynomial " + *r.poly + " differs from " + s.field.poly_string());

        using Kind = FieldSpec::Kind;
        if (s.field.kind == Kind::quadratic || s.field.kind == Kind::biquadratic) {
            if (s.field.kind == Kind::biquadratic && s.p == 2) {
                ++rep.oracle_only;
                rep.notes.push_back(tag + ": additivity over subfields needs p odd");
                continue;
            }
            std::vector<BigInt> ms =
                s.field.kind == Kind::quadratic ? std::vector<BigInt>{BigInt(-s.field.poly[2])} : s.field.subfields;
            int native = 0;
            try {
                for (const auto& m : ms) native += field_record(field_from_m(m), s.p, opt).vptor;
            } catch (const CapacityError& e) {
                ++rep.oracle_only;
                rep.notes.push_back(tag + ": native path out of range: " + e.what());
                continue;
            }
            ++rep.checked;
            if (native != r.vptor) disagree(native, "decomposition differs from the ray class computation");
            continue;
        }

        ++rep.oracle_only;
        if (s.p % 3 == 2 && r.vptor % 2 != 0) disagree(std::nullopt, "odd valuation at p = 2 mod 3");
        if (r.disc) {
            BigInt f;
            if (!is_square(*r.disc, &f) || !f.fits_ulong_p() || !conductor_valid(f.get_ui())) {
                disagree(std::nullopt, "field discriminant is not the square of a cyclic cubic conductor");
                continue;
            }
            Cubic P{s.field.poly[1], s.field.poly[2], s.field.poly[3]};
            BigInt pd = discriminant(P);
            if (pd % *r.disc != 0 || !is_square(BigInt(pd / *r.disc)))
                disagree(std::nullopt, "polynomial discriminant is not an index square times the field discriminant");
            if (s.field.kind == Kind::cubic) {
                u64 fc = std::stoull(s.field.key.substr(6, s.field.key.find(':', 6) - 6));
                if (f.get_ui() != fc) disagree(std::nullopt, "field discriminant is not f^2");
            }
        }
    }
    return rep;
}

} // namespace ptor
