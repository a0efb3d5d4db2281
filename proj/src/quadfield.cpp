#include "ptor/quadfield.hpp"

#include <algorithm>
#include <string>

namespace ptor {

namespace {

// Discards residues; lets cf_unit compute only the regulator.
struct NullModulus {
    using value_type = char;
    char from(i64) const { return 0; }
    char from(const BigInt&) const { return 0; }
    char mul_add(u64, char, char) const { return 0; }
    char sub(char, char) const { return 0; }
};

} // namespace

QuadFieldId field_from_core(const BigInt& m) {
    QuadFieldId K;
    K.m = m;
    K.half = mpz_fdiv_ui(m.get_mpz_t(), 4) == 1;
    K.D = K.half ? m : BigInt(4 * m);
    return K;
}

QuadFieldId field_from_m(const BigInt& m) {
    if (m <= 1) throw UsageError("m must exceed 1");
    if (m.fits_ulong_p() && m.get_ui() < (u64(1) << 62)) {
        if (!is_squarefree(m.get_ui())) throw UsageError("m is not squarefree: " + m.get_str());
    } else {
        auto core = squarefree_core(m);
        if (core.b != 1) throw UsageError("m is not squarefree: " + m.get_str());
    }
    return field_from_core(m);
}

bool is_fundamental_discriminant(u64 D) {
    if (D < 5) return false;
    int e = __builtin_ctzll(D);
    u64 M = D >> e;
    bool ok = (e == 0 && (M & 3) == 1) || (e == 2 && (M & 3) != 1) || e == 3;
    return ok && is_squarefree(M);
}

std::optional<QuadFieldId> field_from_discriminant(u64 D) {
    if (!is_fundamental_discriminant(D)) return std::nullopt;
    u64 m = (D & 3) == 1 ? D : D / 4;
    return field_from_core(BigInt(static_cast<unsigned long>(m)));
}

UnitRep fundamental_unit(const QuadFieldId& K, const PrimePower& modulus, const CfLimits& lim) {
    if (!K.small()) throw CapacityError("continued fraction requires m < 2^60");
    u64 m = K.m_u64();
    UnitRep rep;
    rep.modulus = modulus;
    if (modulus.fits_word()) {
        WordModulus ring(modulus);
        auto u = cf_unit<true>(m, ring, lim);
        rep.residue = {ring.to_big(u.eps.x), ring.to_big(u.eps.y)};
        rep.norm = u.norm;
        rep.regulator = u.regulator;
        rep.period = u.period;
    } else {
        BigModulus ring(modulus);
        auto u = cf_unit<true>(m, ring, lim);
        rep.residue = {u.eps.x, u.eps.y};
        rep.norm = u.norm;
        rep.regulator = u.regulator;
        rep.period = u.period;
    }
    return rep;
}

double regulator(const QuadFieldId& K, const CfLimits& lim) {
    if (!K.small()) throw CapacityError("continued fraction requires m < 2^60");
    return cf_unit<true>(K.m_u64(), NullModulus{}, lim).regulator;
}

namespace {

inline u64 form_key(i64 a, u64 b) {
    return (static_cast<u64>(a + (i64{1} << 31)) << 32) | b;
}

void divisors_in(const std::vector<std::pair<std::uint32_t, int>>& fac, size_t i, u64 d, u64 lo, u64 hi,
                 std::vector<u64>& out) {
    if (d > hi) return;
    if (i == fac.size()) {
        if (d >= lo) out.push_back(d);
        return;
    }
    u64 v = d;
    for (int e = 0; e <= fac[i].second; ++e) {
        if (v > hi) break;
        divisors_in(fac, i + 1, v, lo, hi, out);
        v *= fac[i].first;
    }
}

} // namespace

ClassNumber class_number(u64 D, u64 ceiling) {
    if (D > ceiling)
        throw CapacityError("discriminant " + std::to_string(D) + " exceeds class number ceiling " +
                            std::to_string(ceiling));
    if (!is_fundamental_discriminant(D)) throw UsageError("not a fundamental discriminant: " + std::to_string(D));
    const u64 s = isqrt(D);
    const SpfSieve& sieve = spf_sieve(static_cast<std::uint32_t>(D / 4 + 1));

    // Reduced forms (a, b, c): 0 < b < sqrt D, |sqrt D - 2|a|| < b.
    std::vector<u64> keys;
    std::vector<std::pair<std::uint32_t, int>> fac;
    std::vector<u64> divs;
    for (u64 b = (D & 1) ? 1 : 2; b <= s; b += 2) {
        u64 n = (D - b * b) / 4;
        u64 lo = (s - b + 2) / 2, hi = (s + b) / 2;
        sieve.factor(static_cast<std::uint32_t>(n), fac);
        divs.clear();
        divisors_in(fac, 0, 1, lo, hi, divs);
        for (u64 a : divs) {
            keys.push_back(form_key(static_cast<i64>(a), b));
            keys.push_back(form_key(-static_cast<i64>(a), b));
        }
    }
    std::sort(keys.begin(), keys.end());
    auto index_of = [&](i64 a, u64 b) -> size_t {
        u64 k = form_key(a, b);
        auto it = std::lower_bound(keys.begin(), keys.end(), k);
        if (it == keys.end() || *it != k)
            throw IntegrityError("rho left the set of reduced forms at D=" + std::to_string(D));
        return static_cast<size_t>(it - keys.begin());
    };

    const i64 Di = static_cast<i64>(D), si = static_cast<i64>(s);
    std::vector<std::uint32_t> cycle(keys.size(), 0);
    std::uint32_t cycles = 0;
    for (size_t i = 0; i < keys.size(); ++i) {
        if (cycle[i]) continue;
        ++cycles;
        size_t j = i;
        i64 a = static_cast<i64>(keys[i] >> 32) - (i64{1} << 31);
        i64 b = static_cast<i64>(keys[i] & 0xffffffffu);
        do {
            cycle[j] = cycles;
            i64 c = (b * b - Di) / (4 * a);
            i64 m2 = 2 * (c < 0 ? -c : c);
            i64 r = (si + b) % m2;
            i64 nb = si - r;
            a = c;
            b = nb;
            j = index_of(a, static_cast<u64>(b));
        } while (j != i);
    }

    ClassNumber res;
    res.h_plus = cycles;
    res.reduced_forms = keys.size();
    u64 b0 = ((s & 1) == (D & 1)) ? s : s - 1;
    std::uint32_t principal = cycle[index_of(1, b0)];
    bool has_minus_one = false;
    for (size_t i = 0; i < keys.size(); ++i) {
        if (cycle[i] == principal && static_cast<i64>(keys[i] >> 32) - (i64{1} << 31) == -1) {
            has_minus_one = true;
            break;
        }
    }
    res.unit_norm = has_minus_one ? -1 : 1;
    res.h = has_minus_one ? res.h_plus : res.h_plus / 2;
    return res;
}

bool bound_check_h(u64 D, u64 h) {
    return static_cast<long double>(h) * h * 4 <= static_cast<long double>(D);
}

bool bound_check_hr(u64 D, u64 h, double R) {
    double sd = std::sqrt(static_cast<double>(D));
    return static_cast<double>(h) * R / sd <= 0.5 * std::log(sd) * (1 + 1e-12);
}

} // namespace ptor
