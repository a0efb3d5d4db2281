#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ptor/archimedean.hpp"
#include "ptor/cubic.hpp"
#include "ptor/families.hpp"
#include "ptor/oracle.hpp"
#include "ptor/records.hpp"
#include "ptor/sink.hpp"

#ifndef PTOR_VERSION
#define PTOR_VERSION "0.0.0"
#endif
#ifndef PTOR_FIXTURES
#define PTOR_FIXTURES "oracle.jsonl"
#endif

using namespace ptor;

namespace {

struct Common {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    u64 block = 4096;
    std::string out;
    std::string format;
    u64 class_ceiling = kDefaultClassCeiling;
    int max_n = 4096;

    ScanOptions scan() const {
        ScanOptions o;
        o.workers = workers;
        o.block = block;
        o.torsion.class_ceiling = class_ceiling;
        o.torsion.delta.max_N = max_n;
        return o;
    }
};

struct OracleOpts {
    std::string mode = "fixtures";
    std::string fixtures = PTOR_FIXTURES;
    std::string executable;
    unsigned concurrency = 2;
    int margin = 2;

    OracleConfig config() const {
        OracleConfig c;
        c.mode = mode == "live" ? OracleMode::live : mode == "fixtures" ? OracleMode::fixtures : OracleMode::off;
        c.fixtures = fixtures;
        c.executable = executable;
        c.concurrency = concurrency;
        c.margin = margin;
        return c;
    }
};

void add_oracle_options(CLI::App* sc, OracleOpts& o) {
    sc->add_option("--oracle", o.mode, "oracle mode")->check(CLI::IsMember({"off", "live", "fixtures"}));
    sc->add_option("--fixtures", o.fixtures, "fixture JSONL file");
    sc->add_option("--gp", o.executable, std::string("CAS executable (default $") + kOracleEnv + ")");
    sc->add_option("--oracle-workers", o.concurrency, "concurrent CAS processes");
    sc->add_option("--margin", o.margin, "n escalation margin");
}

// Optional record file, opened lazily.
class Output {
public:
    Output(const Common& c, std::string command, SinkMeta meta) {
        if (c.out.empty()) return;
        SinkFormat fmt = c.format.empty() ? format_for_path(c.out)
                                          : (c.format == "jsonl" ? SinkFormat::jsonl : SinkFormat::csv);
        meta["command"] = std::move(command);
        meta["version"] = PTOR_VERSION;
        meta["class_ceiling"] = std::to_string(c.class_ceiling);
        meta["max_N"] = std::to_string(c.max_n);
        sink_ = std::make_unique<RecordSink>(c.out, fmt, std::move(meta));
    }
    void write(const ScanRecord& r) {
        if (sink_) sink_->write(r);
    }
    void close() {
        if (sink_) sink_->close();
    }

private:
    std::unique_ptr<RecordSink> sink_;
};

std::string range_str(u64 lo, u64 hi) { return fmt::format("[{},{}]", lo, hi); }

QuadFieldId field_arg(const std::string& m, std::optional<u64> D) {
    if (D) {
        auto K = field_from_discriminant(*D);
        if (!K) throw UsageError(fmt::format("{} is not a real quadratic fundamental discriminant", *D));
        return *K;
    }
    if (m.empty()) throw UsageError("give --m or --D");
    return field_from_m(BigInt(m));
}

void print_field(const FieldRecord& r) {
    fmt::print("D={} m={} h={} v_cl={} delta={} v_w={} vptor={} Ymin={} Cp={}{}\n", r.K.D.get_str(),
               r.K.m.get_str(), r.h, r.v_cl, r.delta, r.v_w, r.vptor, trunc4(r.gap), trunc4(r.c_p),
               r.vptor == 0 ? " p-rational" : "");
}

int run_oracle_verify(OracleClient& oracle, const std::vector<VerifySample>& samples, const Common& c,
                      Output& out) {
    TorsionOptions t = c.scan().torsion;
    VerifyReport rep = oracle_verify(oracle, samples, t);
    for (const auto& d : rep.disagreements) {
        fmt::print("DISAGREE {} p={} native={} oracle={}: {}\n", d.key, d.p,
                   d.native ? std::to_string(*d.native) : "-", d.oracle, d.reason);
        ScanRecord s;
        s.kind = "disagreement";
        s.p = d.p;
        s.vptor = d.oracle;
        if (d.native) s.value = *d.native;
        s.flags = d.key;
        for (auto& ch : s.flags)
            if (ch == ',') ch = ';';
        out.write(s);
    }
    for (const auto& u : rep.unavailable) fmt::print("UNAVAILABLE {}\n", u);
    for (const auto& n : rep.notes) fmt::print("note {}\n", n);
    fmt::print("checked={} oracle_only={} disagreements={} unavailable={}\n", rep.checked, rep.oracle_only,
               rep.disagreements.size(), rep.unavailable.size());
    out.close();
    if (!rep.disagreements.empty()) return static_cast<int>(ExitCode::disagreement);
    if (!rep.unavailable.empty()) return static_cast<int>(ExitCode::oracle_unavailable);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-adic torsion of real quadratic fields: invariants, scans and cross-checks"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--workers", c.workers, "worker threads");
    app.add_option("--block", c.block, "discriminants per work block");
    app.add_option("--out", c.out, "record file (.csv or .jsonl)");
    app.add_option("--format", c.format, "record format")->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--class-ceiling", c.class_ceiling, "largest D for exact class numbers");
    app.add_option("--max-n", c.max_n, "modulus exponent ceiling");

    // field
    std::string f_m;
    std::optional<u64> f_D;
    u64 f_p = 2;
    auto* field = app.add_subcommand("field", "single-field report");
    field->add_option("--m", f_m, "squarefree m");
    field->add_option("--D", f_D, "fundamental discriminant");
    field->add_option("--p", f_p, "prime")->required();

    // scan-delta
    u64 sd_p = 2, sd_lo = 5, sd_hi = 0;
    std::string sd_case = "unramified";
    bool sd_shift = false;
    auto* sdelta = app.add_subcommand("scan-delta", "successive maxima of delta_p");
    sdelta->add_option("--p", sd_p, "prime")->required();
    sdelta->add_option("--case", sd_case, "branch")->check(CLI::IsMember({"unramified", "ramified"}));
    sdelta->add_option("--min-d", sd_lo, "smallest D");
    sdelta->add_option("--max-d", sd_hi, "largest D")->required();
    sdelta->add_flag("--m2-shifted", sd_shift, "p = 2, m = 2 mod 8: one less than the standard delta");

    // scan-vptor
    std::vector<u64> sv_p;
    u64 sv_lo = 5, sv_hi = 0;
    auto* svptor = app.add_subcommand("scan-vptor", "successive minima of log sqrt D / log p - vptor");
    svptor->add_option("--p", sv_p, "prime(s)")->required()->delimiter(',');
    svptor->add_option("--min-d", sv_lo, "smallest D");
    svptor->add_option("--max-d", sv_hi, "largest D")->required();

    // family
    FamilyParams fp;
    std::string fa_a = "1", fa_var = "plus1", fa_pol = "require";
    auto* family = app.add_subcommand("family", "m = a^2 p^(2 rho) + 1 or + 4");
    family->add_option("--p", fp.p, "prime")->required();
    family->add_option("--a", fa_a, "a");
    family->add_option("--variant", fa_var, "plus1 or plus4")->check(CLI::IsMember({"plus1", "plus4"}));
    family->add_option("--rho-min", fp.rho_lo, "first rho");
    family->add_option("--rho-max", fp.rho_hi, "last rho");
    family->add_option("--policy", fa_pol, "squarefree policy")->check(CLI::IsMember({"require", "allow-core"}));
    family->add_option("--trial-bound", fp.trial_bound, "trial division bound for squarefreeness");

    // reciprocal
    ReciprocalParams rp;
    std::string rc_lo = "1", rc_hi = "10000";
    auto* recip = app.add_subcommand("reciprocal", "fields from a (d + p^(2 rho) a) = m b^2");
    recip->add_option("--p", rp.p, "prime")->required();
    recip->add_option("--rho", rp.rho, "rho")->required();
    recip->add_option("--a-min", rc_lo, "first a");
    recip->add_option("--a-max", rc_hi, "last a");

    // huge-p
    u64 hp_p = 0, hp_lo = 5, hp_hi = 0;
    auto* huge = app.add_subcommand("huge-p", "fields with delta_p >= 1 for a large prime");
    huge->add_option("--p", hp_p, "prime")->required();
    huge->add_option("--min-d", hp_lo, "smallest D");
    huge->add_option("--max-d", hp_hi, "largest D")->required();

    // cubic-enum
    u64 ce_lo = 7, ce_hi = 0;
    OracleOpts ce_or;
    u64 ce_p = 0;
    auto* cenum = app.add_subcommand("cubic-enum", "cyclic cubic fields by conductor");
    cenum->add_option("--min-f", ce_lo, "smallest conductor");
    cenum->add_option("--max-f", ce_hi, "largest conductor")->required();
    cenum->add_option("--p", ce_p, "prime for oracle torsion values");
    add_oracle_options(cenum, ce_or);

    // washington
    u64 wa_p = 2, wa_alo = 1, wa_ahi = 12;
    int wa_klo = 2, wa_khi = 10, wa_vp = -1;
    OracleOpts wa_or;
    wa_or.mode = "off";
    auto* wash = app.add_subcommand("washington", "x^3 - (N^3-2N^2+3N-3)x^2 - N^2 x - 1, N = 1 + a p^k");
    wash->add_option("--p", wa_p, "prime")->required();
    wash->add_option("--k-min", wa_klo, "first k");
    wash->add_option("--k-max", wa_khi, "last k");
    wash->add_option("--a-min", wa_alo, "first a");
    wash->add_option("--a-max", wa_ahi, "last a");
    wash->add_option("--vp", wa_vp, "print only vptor above this (oracle on)");
    add_oracle_options(wash, wa_or);

    // bs-scan
    u64 bs_lo = 100000, bs_hi = 200000;
    auto* bs = app.add_subcommand("bs-scan", "extremes of log(hR)/log sqrt D");
    bs->add_option("--min-d", bs_lo, "smallest D");
    bs->add_option("--max-d", bs_hi, "largest D");

    // means
    std::vector<std::string> mn_places{"inf"};
    u64 mn_lo = 5, mn_hi = 0;
    auto* means = app.add_subcommand("means", "mean of C_v over a discriminant range");
    means->add_option("--place", mn_places, "inf or a prime")->delimiter(',');
    means->add_option("--min-d", mn_lo, "smallest D");
    means->add_option("--max-d", mn_hi, "largest D")->required();

    // oracle-verify
    OracleOpts ov_or;
    std::string ov_sample = "fixtures";
    u64 ov_p = 2, ov_lo = 5, ov_hi = 0, ov_step = 1;
    auto* overify = app.add_subcommand("oracle-verify", "decomposition against the ray class computation");
    overify->add_option("--sample", ov_sample, "fixtures or range")->check(CLI::IsMember({"fixtures", "range"}));
    overify->add_option("--p", ov_p, "prime (range sample)");
    overify->add_option("--min-d", ov_lo, "smallest D (range sample)");
    overify->add_option("--max-d", ov_hi, "largest D (range sample)");
    overify->add_option("--every", ov_step, "keep every k-th field (range sample)");
    add_oracle_options(overify, ov_or);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
    }

    try {
        ScanOptions so = c.scan();

        if (*field) {
            QuadFieldId K = field_arg(f_m, f_D);
            FieldRecord r = field_record(K, f_p, so.torsion);
            Output out(c, "field", {{"p", std::to_string(f_p)}});
            print_field(r);
            out.write(to_record(r));
            out.close();
        } else if (*sdelta) {
            so.torsion.delta.convention = sd_shift ? DeltaConvention::m2_shifted : DeltaConvention::standard;
            Branch br = sd_case == "ramified" ? Branch::ramified : Branch::unramified;
            Output out(c, "scan-delta",
                       {{"p", std::to_string(sd_p)}, {"case", sd_case}, {"range", range_str(sd_lo, sd_hi)}});
            for (const auto& r : scan_delta_max(sd_p, br, sd_lo, sd_hi, so)) {
                fmt::print("D={} m={} delta={}\n", r.D, r.m, r.delta);
                out.write(to_record(r, sd_p, br));
            }
            out.close();
        } else if (*svptor) {
            Output out(c, "scan-vptor", {{"range", range_str(sv_lo, sv_hi)}});
            auto res = scan_vptor_extrema(sv_p, sv_lo, sv_hi, so);
            for (u64 p : sv_p) {
                fmt::print("p={}\n", p);
                for (const auto& r : res[p]) {
                    fmt::print("D={} m={} vptor={} Ymin={} Cp={}\n", r.D, r.m, r.vptor, trunc4(r.gap),
                               trunc4(r.c_p));
                    out.write(to_record(r));
                }
            }
            out.close();
        } else if (*family) {
            fp.a = BigInt(fa_a);
            fp.variant = fa_var == "plus4" ? FamilyVariant::plus4 : FamilyVariant::plus1;
            fp.policy = fa_pol == "allow-core" ? SquarefreePolicy::allow_core : SquarefreePolicy::require;
            Output out(c, "family",
                       {{"p", std::to_string(fp.p)}, {"a", fa_a}, {"variant", fa_var}, {"policy", fa_pol}});
            for (const auto& r : scan_family(fp, so)) {
                std::string tail = r.vptor ? fmt::format("vptor={} Cp={} vph={}", *r.vptor, trunc4(*r.c_p), *r.v_cl)
                                           : fmt::format("delta+v_w={} vptor unavailable(class number out of range)",
                                                         r.delta + r.v_w);
                fmt::print("m={} rho={} {}{}\n", r.core.get_str(), r.rho, tail, r.flags.empty() ? "" : " [" + r.flags + "]");
                out.write(to_record(r, fp.p));
            }
            out.close();
        } else if (*recip) {
            rp.a_lo = BigInt(rc_lo);
            rp.a_hi = BigInt(rc_hi);
            Output out(c, "reciprocal", {{"p", std::to_string(rp.p)}, {"rho", std::to_string(rp.rho)}});
            for (const auto& r : reciprocal_search(rp, so)) {
                std::string tail = r.vptor ? fmt::format(" vptor={} Cp={}", *r.vptor, trunc4(*r.c_p)) : "";
                fmt::print("D={} a={} b={} m={} delta={}{}\n", r.D.get_str(), r.a.get_str(), r.b.get_str(),
                           r.m.get_str(), r.delta_eta, tail);
                out.write(to_record(r, rp.p));
            }
            out.close();
        } else if (*huge) {
            Output out(c, "huge-p", {{"p", std::to_string(hp_p)}, {"range", range_str(hp_lo, hp_hi)}});
            for (const auto& r : huge_p_regulator_scan(hp_p, hp_lo, hp_hi, so)) {
                fmt::print("D={} m={}{} Cp>={}\n", r.D, r.m, r.ramified ? " ramified" : "", trunc4(r.c_p_lower));
                std::fflush(stdout);
                out.write(to_record(r, hp_p));
            }
            out.close();
        } else if (*cenum) {
            std::unique_ptr<OracleClient> oracle;
            if (ce_p) oracle = std::make_unique<OracleClient>(ce_or.config());
            Output out(c, "cubic-enum", {{"range", range_str(ce_lo, ce_hi)}});
            u64 n = 0, disc_f2 = 0;
            for (const auto& s : enumerate_cyclic_cubic(ce_lo, ce_hi)) {
                ++n;
                BigInt d = discriminant(s.poly);
                BigInt f2 = BigInt(static_cast<unsigned long>(s.f)) * static_cast<unsigned long>(s.f);
                if (d == f2) ++disc_f2;
                ScanRecord rec = to_record(s);
                std::string tail;
                if (oracle) {
                    rec.p = ce_p;
                    try {
                        OracleResult o = oracle->query(FieldSpec::cubic(s), ce_p);
                        rec.vptor = rec.value = o.vptor;
                        rec.c_p = o.vptor * std::log(static_cast<double>(ce_p)) / std::log(static_cast<double>(s.f));
                        tail = fmt::format(" vptor={} Cp={}", o.vptor, trunc4(*rec.c_p));
                    } catch (const OracleUnavailable&) {
                        tail = " vptor=?";
                        rec.flags += ";oracle-unavailable";
                    }
                }
                fmt::print("f={} a={} b={} P={} disc={}{}\n", s.f, s.a, s.b, to_string(s.poly), d.get_str(), tail);
                out.write(rec);
            }
            fmt::print("fields={} disc(P)=f^2 for {}\n", n, disc_f2);
            out.close();
        } else if (*wash) {
            std::unique_ptr<OracleClient> oracle;
            if (wa_or.mode != "off") oracle = std::make_unique<OracleClient>(wa_or.config());
            Output out(c, "washington", {{"p", std::to_string(wa_p)}});
            for (const auto& w : washington_grid(wa_p, wa_klo, wa_khi, wa_alo, wa_ahi)) {
                bool irr = irreducible(w.poly);
                ScanRecord rec;
                rec.kind = "washington";
                rec.p = wa_p;
                rec.m = w.N;
                rec.flags = fmt::format("a={};k={};P={}", w.a, w.k, to_string(w.poly));
                if (!irr) rec.flags += ";reducible";
                std::string tail;
                if (oracle && irr) {
                    OracleResult o;
                    try {
                        o = oracle->query(FieldSpec::washington(w.N), wa_p);
                    } catch (const OracleUnavailable& e) {
                        fmt::print(stderr, "{}\n", e.what());
                        continue;
                    }
                    if (o.vptor <= wa_vp) continue;
                    rec.vptor = rec.value = o.vptor;
                    if (o.disc) {
                        rec.D = *o.disc;
                        rec.c_p = o.vptor * std::log(static_cast<double>(wa_p)) / (0.5 * log_big(*o.disc));
                        tail = fmt::format(" D={} vptor={} Cp={}", o.disc->get_str(), o.vptor, trunc4(*rec.c_p));
                    } else {
                        tail = fmt::format(" vptor={}", o.vptor);
                    }
                }
                fmt::print("a={} k={} N={}{}{} P={}\n", w.a, w.k, w.N.get_str(), irr ? "" : " reducible", tail,
                           to_string(w.poly));
                out.write(rec);
            }
            out.close();
        } else if (*bs) {
            ArchScan r = arch_scan(bs_lo, bs_hi, {}, so);
            Output out(c, "bs-scan", {{"range", range_str(bs_lo, bs_hi)}});
            fmt::print("fields={} BS_min={:.6f} at D={} BS_max={:.6f} at D={}\n", r.fields, r.bs_min, r.D_min,
                       r.bs_max, r.D_max);
            for (u64 D : {r.D_min, r.D_max})
                if (auto K = field_from_discriminant(D)) out.write(to_record(arch_record(*K, c.class_ceiling)));
            out.close();
        } else if (*means) {
            std::vector<Place> places;
            for (const auto& s : mn_places) places.push_back(Place{s == "inf" ? 0 : std::stoull(s)});
            ArchScan r = arch_scan(mn_lo, mn_hi, places, so);
            Output out(c, "means", {{"range", range_str(mn_lo, mn_hi)}});
            for (const auto& pm : r.means) {
                std::string name = pm.place.infinite() ? "inf" : std::to_string(pm.place.p);
                fmt::print("M_{}={:.8f} fields={} p-rational={}\n", name, pm.mean, pm.count, pm.zeros);
                ScanRecord s;
                s.kind = "mean";
                if (!pm.place.infinite()) s.p = pm.place.p;
                s.c_p = pm.mean;
                s.value = static_cast<i64>(pm.count);
                s.flags = "place=" + name;
                out.write(s);
            }
            out.close();
        } else if (*overify) {
            if (ov_or.mode == "off") throw OracleUnavailable("oracle-verify needs --oracle live or fixtures");
            OracleClient oracle(ov_or.config());
            std::vector<VerifySample> samples;
            if (ov_sample == "fixtures") {
                samples = fixture_samples(oracle);
            } else {
                if (ov_hi == 0) throw UsageError("--max-d is required for a range sample");
                u64 k = 0;
                for_each_fundamental(ov_lo, ov_hi, [&](const QuadFieldId& K) {
                    if (ov_p == 2 && K.m == 2) return;
                    if (k++ % std::max<u64>(ov_step, 1) == 0) samples.push_back({FieldSpec::quadratic(K.m), ov_p});
                });
            }
            Output out(c, "oracle-verify", {{"sample", ov_sample}, {"oracle", ov_or.mode}});
            return run_oracle_verify(oracle, samples, c, out);
        }
    } catch (const UsageError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return static_cast<int>(ExitCode::usage);
    } catch (const CapacityError& e) {
        fmt::print(stderr, "capacity: {}\n", e.what());
        return static_cast<int>(ExitCode::capacity);
    } catch (const IntegrityError& e) {
        fmt::print(stderr, "integrity: {}\n", e.what());
        return static_cast<int>(ExitCode::integrity);
    } catch (const OracleUnavailable& e) {
        fmt::print(stderr, "oracle unavailable: {}\n", e.what());
        return static_cast<int>(ExitCode::oracle_unavailable);
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return static_cast<int>(ExitCode::usage);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return static_cast<int>(ExitCode::usage);
    }
    return 0;
}
