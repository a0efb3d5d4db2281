#include "ptor/torsion.hpp"

#include <cmath>
#include <string>

namespace ptor {

const char* to_string(DeltaKind k) {
    switch (k) {
    case DeltaKind::unramified_odd: return "unramified";
    case DeltaKind::unramified_two: return "unramified-2";
    case DeltaKind::ramified_two: return "ramified-2";
    case DeltaKind::ramified_three: return "ramified-3";
    case DeltaKind::ramified_odd: return "ramified";
    }
    return "?";
}

DeltaCase classify(const BigInt& m, u64 p) {
    DeltaCase c;
    c.m_mod8 = static_cast<unsigned>(mpz_fdiv_ui(m.get_mpz_t(), 8));
    c.minus3_mod9 = mpz_fdiv_ui(m.get_mpz_t(), 9) == 6;
    if (p == 2) {
        if ((c.m_mod8 & 3) == 1) {
            c.kind = DeltaKind::unramified_two;
            c.s = c.m_mod8 == 1 ? 1 : -1;
        } else {
            c.kind = DeltaKind::ramified_two;
        }
        return c;
    }
    u64 r = mpz_fdiv_ui(m.get_mpz_t(), p);
    if (r == 0) {
        c.kind = p == 3 ? DeltaKind::ramified_three : DeltaKind::ramified_odd;
        return c;
    }
    c.kind = DeltaKind::unramified_odd;
    c.s = kronecker(static_cast<i64>(r), p);
    return c;
}

namespace {

enum : int { kSaturated = -1000000 };

[[noreturn]] void fail(const QuadFieldId& K, u64 p, const std::string& what) {
    throw IntegrityError("delta_" + std::to_string(p) + " for m=" + K.m.get_str() + ": " + what);
}

int halve(const QuadFieldId& K, u64 p, int v, int off) {
    if (((v - off) & 1) != 0)
        fail(K, p, "norm valuation " + std::to_string(v) + " has the wrong parity");
    return (v - off) / 2;
}

template <class QR>
int delta_attempt(const QR& R, const QuadFieldId& K, u64 p, const DeltaCase& dc, const UnitResidue& u,
                  DeltaConvention conv) {
    auto eps = R.make(u.eps.x, u.eps.y);
    auto coeff = [&](u64 e, i64 sub) { return R.coeff_valuation(R.sub_scalar(R.pow(eps, e), sub)); };
    auto normv = [&](u64 e) { return R.norm_valuation(R.sub_scalar(R.pow(eps, e), 1)); };
    int delta = 0;
    switch (dc.kind) {
    case DeltaKind::unramified_odd: {
        i64 target = dc.s == 1 ? 1 : u.norm;
        auto v = coeff(dc.s == 1 ? p - 1 : p + 1, target);
        if (!v) return kSaturated;
        if (*v < 1) fail(K, p, "eps^(p-s) is not congruent to its expected value mod p");
        delta = *v - 1;
        break;
    }
    case DeltaKind::unramified_two: {
        auto v = coeff(dc.s == 1 ? 2 : 6, 1);
        if (!v) return kSaturated;
        delta = *v - (dc.s == 1 ? 3 : 2);
        break;
    }
    case DeltaKind::ramified_two: {
        auto v = normv(4);
        if (!v) return kSaturated;
        int w = *v - 4;
        int off = dc.m_mod8 == 3 ? 2 : dc.m_mod8 == 7 ? 4 : 3;
        delta = halve(K, p, w, off);
        if (dc.m_mod8 == 2 && conv == DeltaConvention::standard) delta += 1;
        if (dc.m_mod8 == 2 && conv == DeltaConvention::m2_shifted && delta >= -1) return delta;
        break;
    }
    case DeltaKind::ramified_three: {
        auto v = normv(6);
        if (!v) return kSaturated;
        delta = halve(K, p, *v, dc.minus3_mod9 ? 5 : 3);
        break;
    }
    case DeltaKind::ramified_odd: {
        auto v = normv(p - 1);
        if (!v) return kSaturated;
        delta = halve(K, p, *v, 1);
        break;
    }
    }
    if (delta < 0) fail(K, p, "negative delta " + std::to_string(delta));
    return delta;
}

} // namespace

DeltaResult delta_p(const QuadFieldId& K, u64 p, const UnitSource& unit, const DeltaOptions& opt) {
    if (p == 2 && K.m == 2) throw UsageError("m = 2 with p = 2 is excluded");
    DeltaCase dc = classify(K.m, p);
    int N = opt.start_N > 0 ? opt.start_N : word_exponent(p, 62, 4);
    DeltaResult res;
    for (;;) {
        PrimePower pp(p, N);
        UnitResidue u = unit(pp);
        int d = with_quad_ring(pp, K.m, [&](const auto& R) { return delta_attempt(R, K, p, dc, u, opt.convention); });
        if (d != kSaturated) {
            res.delta = d;
            res.N = N;
            return res;
        }
        if (N >= opt.max_N)
            throw CapacityError("delta_" + std::to_string(p) + " for m=" + K.m.get_str() +
                                " saturated the modulus ceiling N=" + std::to_string(opt.max_N));
        N = std::min(2 * N, opt.max_N);
        ++res.escalations;
    }
}

UnitSource fundamental_unit_source(const QuadFieldId& K) {
    return [K](const PrimePower& pp) {
        UnitRep rep = fundamental_unit(K, pp);
        return UnitResidue{rep.residue, rep.norm};
    };
}

int w_valuation(const BigInt& m, u64 p) {
    if (p == 2) {
        unsigned r = static_cast<unsigned>(mpz_fdiv_ui(m.get_mpz_t(), 8));
        return (r == 1 || r == 7) ? 1 : 0;
    }
    if (p == 3) return mpz_fdiv_ui(m.get_mpz_t(), 9) == 6 ? 1 : 0;
    return 0;
}

int clc_valuation(u64 h, const BigInt& m, u64 p) {
    int v = vp(h, p);
    if (p == 2 && mpz_fdiv_ui(m.get_mpz_t(), 8) == 2) {
        if (v == 0) throw IntegrityError("odd class number for m = 2 mod 8: m=" + m.get_str());
        v -= 1;
    }
    return v;
}

double log_big(const BigInt& n) {
    long e = 0;
    double d = mpz_get_d_2exp(&e, n.get_mpz_t());
    return std::log(d) + static_cast<double>(e) * std::log(2.0);
}

double brauer_siegel_cp(int vptor, u64 p, const BigInt& D) {
    return vptor * std::log(static_cast<double>(p)) / (0.5 * log_big(D));
}

double brauer_siegel_gap(int vptor, u64 p, const BigInt& D) {
    return 0.5 * log_big(D) / std::log(static_cast<double>(p)) - vptor;
}

FieldRecord field_record(const QuadFieldId& K, u64 p, const TorsionOptions& opt, const ClassNumber* cn_in) {
    if (p == 2 && K.m == 2) throw UsageError("m = 2 with p = 2 is excluded");
    if (!K.small()) throw CapacityError("field too large for the continued fraction: m=" + K.m.get_str());
    const u64 D = K.D_u64();
    ClassNumber cn_local;
    if (!cn_in) cn_local = class_number(D, opt.class_ceiling);
    const ClassNumber& cn = cn_in ? *cn_in : cn_local;

    FieldRecord r;
    r.K = K;
    r.p = p;
    r.dcase = classify(K.m, p);
    r.h = cn.h;

    // The first unit computation also yields the regulator and norm.
    int N0 = opt.delta.start_N > 0 ? opt.delta.start_N : word_exponent(p, 62, 4);
    UnitRep first = fundamental_unit(K, PrimePower(p, N0));
    r.unit_norm = first.norm;
    r.regulator = first.regulator;
    if (first.norm != cn.unit_norm)
        throw IntegrityError("unit norm disagrees with the form cycles for D=" + std::to_string(D));
    if (!bound_check_h(D, cn.h))
        throw IntegrityError("h > sqrt(D)/2 for D=" + std::to_string(D));
    if (!bound_check_hr(D, cn.h, first.regulator))
        throw IntegrityError("h R / sqrt(D) > log(sqrt D)/2 for D=" + std::to_string(D));

    UnitSource src = [&](const PrimePower& pp) {
        if (pp.N == N0) return UnitResidue{first.residue, first.norm};
        UnitRep rep = fundamental_unit(K, pp);
        return UnitResidue{rep.residue, rep.norm};
    };
    DeltaOptions dopt = opt.delta;
    dopt.start_N = N0;
    dopt.convention = DeltaConvention::standard;
    DeltaResult dr = delta_p(K, p, src, dopt);
    r.delta = dr.delta;
    r.modulus_N = dr.N;
    r.v_w = w_valuation(K.m, p);
    r.v_cl = clc_valuation(cn.h, K.m, p);
    r.vptor = r.v_cl + r.delta + r.v_w;
    r.c_p = brauer_siegel_cp(r.vptor, p, K.D);
    r.gap = brauer_siegel_gap(r.vptor, p, K.D);
    return r;
}

int vptor(const BigInt& m, u64 p, const TorsionOptions& opt) {
    return field_record(field_from_m(m), p, opt).vptor;
}

} // namespace ptor
