#include "ptor/records.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ptor {

namespace {

BigInt big(u64 v) { return BigInt(static_cast<unsigned long>(v)); }

void add_flag(std::string& flags, const std::string& f) {
    if (f.empty()) return;
    if (!flags.empty()) flags += ';';
    flags += f;
}

} // namespace

std::string trunc4(double x) {
    // The nudge keeps 2.4514 from printing as 2.4513 when held as 2.45139999...
    double t = std::trunc(x * 1e4 + std::copysign(1e-7, x)) / 1e4;
    if (t == 0.0) t = 0.0;  // no "-0.0000"
    return fmt::format("{:.4f}", t);
}

ScanRecord to_record(const DeltaMaxRow& r, u64 p, Branch branch) {
    ScanRecord s;
    s.kind = "delta-max";
    s.p = p;
    s.D = big(r.D);
    s.m = big(r.m);
    s.value = r.delta;
    s.delta = r.delta;
    s.flags = branch == Branch::ramified ? "ramified" : "unramified";
    return s;
}

ScanRecord to_record(const VptorRow& r) {
    ScanRecord s;
    s.kind = "vptor-min";
    s.p = r.p;
    s.D = big(r.D);
    s.m = big(r.m);
    s.value = r.vptor;
    s.vptor = r.vptor;
    s.v_cl = r.v_cl;
    s.v_w = r.v_w;
    s.delta = r.delta;
    s.c_p = r.c_p;
    s.gap = r.gap;
    s.h = r.h;
    return s;
}

ScanRecord to_record(const FieldRecord& r) {
    ScanRecord s = to_record(to_row(r));
    s.kind = "field";
    s.flags = to_string(r.dcase.kind);
    if (r.vptor == 0) add_flag(s.flags, "p-rational");
    return s;
}

ScanRecord to_record(const FamilyRow& r, u64 p) {
    ScanRecord s;
    s.kind = "family";
    s.p = p;
    s.D = r.D;
    s.m = r.core;
    s.value = r.vptor ? *r.vptor : r.delta + r.v_w;
    if (r.vptor) s.vptor = *r.vptor;
    if (r.v_cl) s.v_cl = *r.v_cl;
    s.v_w = r.v_w;
    s.delta = r.delta;
    if (r.c_p) s.c_p = *r.c_p;
    if (r.h) s.h = *r.h;
    s.flags = fmt::format("rho={}", r.rho);
    add_flag(s.flags, r.flags);
    if (!r.identity_ok) add_flag(s.flags, "identity-failed");
    return s;
}

ScanRecord to_record(const ReciprocalHit& r, u64 p) {
    ScanRecord s;
    s.kind = "reciprocal";
    s.p = p;
    s.D = r.D;
    s.m = r.m;
    s.value = r.vptor ? *r.vptor : r.delta_eta;
    s.delta = r.delta_eta;
    s.v_w = r.v_w;
    if (r.vptor) s.vptor = *r.vptor;
    if (r.v_cl) s.v_cl = *r.v_cl;
    if (r.c_p) s.c_p = *r.c_p;
    if (r.h) s.h = *r.h;
    s.flags = "a=" + r.a.get_str() + ";b=" + r.b.get_str();
    if (!r.proven) add_flag(s.flags, "probably-squarefree");
    if (!r.vptor) add_flag(s.flags, "delta-only");
    return s;
}

ScanRecord to_record(const HugePHit& r, u64 p) {
    ScanRecord s;
    s.kind = "huge-p";
    s.p = p;
    s.D = big(r.D);
    s.m = big(r.m);
    s.value = 1;
    s.c_p = r.c_p_lower;
    s.flags = r.ramified ? "ramified;delta>=1" : "delta>=1";
    return s;
}

ScanRecord to_record(const ArchRecord& r) {
    ScanRecord s;
    s.kind = "bs";
    s.D = big(r.D);
    s.m = big(r.m);
    s.h = r.h;
    s.c_p = r.bs_tilde;  // C at the infinite place
    s.flags = "place=inf";
    return s;
}

ScanRecord to_record(const CubicFieldSpec& c) {
    ScanRecord s;
    s.kind = "cubic";
    s.D = big(c.f) * big(c.f);
    s.m = big(c.f);
    s.flags = fmt::format("a={};b={};P={}", c.a, c.b, to_string(c.poly));
    return s;
}

} // namespace ptor
