#pragma once

#include <cmath>
#include <optional>

#include "ptor/errors.hpp"
#include "ptor/intbase.hpp"
#include "ptor/quadmod.hpp"

namespace ptor {

// Real quadratic field Q(sqrt m), m > 1 squarefree.
struct QuadFieldId {
    BigInt m;
    BigInt D;
    bool half = false;  // m = 1 mod 4, integral basis {1, (1 + sqrt m)/2}

    u64 m_u64() const { return m.get_ui(); }
    u64 D_u64() const { return D.get_ui(); }
    bool small() const { return D.fits_ulong_p() && D.get_ui() < (u64(1) << 60); }
};

// Throws UsageError unless m > 1 is squarefree.
QuadFieldId field_from_m(const BigInt& m);
// m is trusted to be squarefree.
QuadFieldId field_from_core(const BigInt& m);

bool is_fundamental_discriminant(u64 D);
std::optional<QuadFieldId> field_from_discriminant(u64 D);

// Fundamental unit eps > 1 of O_K, as a residue mod p^N together with its
// norm and log_inf(eps).
struct UnitRep {
    PrimePower modulus;
    QuadModElem<BigInt> residue;
    int norm = 0;
    double regulator = 0.0;
    u64 period = 0;
};

struct CfLimits {
    u64 max_period = 200'000'000;
};

// Continued fraction of w with complete quotients (P + sqrt m)/Q. The
// period ends at the first k >= 1 with Q_k = Q_0, and
// eps = p_{l-1} - q_{l-1} * conj(w), N(eps) = (-1)^l.
template <class V>
struct CfUnit {
    QuadModElem<V> eps{};
    int norm = 0;
    double regulator = 0.0;
    u64 period = 0;
};

template <bool WantRegulator, class Ring>
CfUnit<typename Ring::value_type> cf_unit(u64 m, const Ring& ring, const CfLimits& lim = {}) {
    using V = typename Ring::value_type;
    const bool half = (m & 3) == 1;
    const u64 s = isqrt(m);
    const i64 q0 = half ? 2 : 1;
    i64 P = half ? 1 : 0;
    i64 Q = q0;
    i64 Qprev = half ? static_cast<i64>((m - 1) / 2) : static_cast<i64>(m);
    // Convergents p_k / q_k of w, residues and scaled floats.
    V p1 = ring.from(i64{1}), p2 = ring.from(i64{0});
    V r1 = ring.from(i64{0}), r2 = ring.from(i64{1});
    double fp1 = 1, fp2 = 0, fq1 = 0, fq2 = 1;
    int scale = 0;
    u64 l = 0;
    for (;;) {
        u64 a = static_cast<u64>(P + static_cast<i64>(s)) / static_cast<u64>(Q);
        V pn = ring.mul_add(a, p1, p2);
        V rn = ring.mul_add(a, r1, r2);
        p2 = std::move(p1);
        p1 = std::move(pn);
        r2 = std::move(r1);
        r1 = std::move(rn);
        if constexpr (WantRegulator) {
            double ad = static_cast<double>(a);
            double fpn = ad * fp1 + fp2, fqn = ad * fq1 + fq2;
            fp2 = fp1;
            fp1 = fpn;
            fq2 = fq1;
            fq1 = fqn;
            if (fp1 > 0x1p500) {
                fp1 *= 0x1p-500;
                fp2 *= 0x1p-500;
                fq1 *= 0x1p-500;
                fq2 *= 0x1p-500;
                scale += 500;
            }
        }
        ++l;
        i64 Pn = static_cast<i64>(a) * Q - P;
        i64 Qn = Qprev + static_cast<i64>(a) * (P - Pn);
        P = Pn;
        Qprev = Q;
        Q = Qn;
        if (Q == q0) break;
        if (l >= lim.max_period) throw CapacityError("continued fraction period exceeds limit");
    }
    CfUnit<V> out;
    out.period = l;
    out.norm = (l & 1) ? -1 : 1;
    // p - q * conj(w) = (p - q t) + q w.
    out.eps.x = half ? ring.sub(p1, r1) : p1;
    out.eps.y = r1;
    if constexpr (WantRegulator) {
        double sm = std::sqrt(static_cast<double>(m));
        double wbar = half ? (sm - 1.0) / 2.0 : sm;
        out.regulator = std::log(fp1 + fq1 * wbar) + scale * std::log(2.0);
    }
    return out;
}

// Residue of the fundamental unit mod p^N. Requires m < 2^60.
UnitRep fundamental_unit(const QuadFieldId& K, const PrimePower& modulus, const CfLimits& lim = {});
double regulator(const QuadFieldId& K, const CfLimits& lim = {});

// Class numbers from cycles of reduced indefinite forms of discriminant D.
struct ClassNumber {
    u64 h = 0;        // wide
    u64 h_plus = 0;   // narrow
    int unit_norm = 0;
    u64 reduced_forms = 0;
};

inline constexpr u64 kDefaultClassCeiling = 10'000'000;

// Throws CapacityError above `ceiling`.
ClassNumber class_number(u64 D, u64 ceiling = kDefaultClassCeiling);

// h <= sqrt(D)/2.
bool bound_check_h(u64 D, u64 h);
// h * R / sqrt(D) <= log(sqrt(D)) / 2.
bool bound_check_hr(u64 D, u64 h, double R);

} // namespace ptor
