#include "ptor/cubic.hpp"

#include <algorithm>

#include "ptor/errors.hpp"

namespace ptor {

namespace {

void append_term(std::string& s, const BigInt& c, const char* mono) {
    if (c == 0) return;
    BigInt a = abs(c);
    s += c < 0 ? " - " : " + ";
    if (a != 1 || *mono == '\0') {
        s += a.get_str();
        if (*mono) s += "*";
    }
    s += mono;
}

BigInt exact_div(const BigInt& n, long d, u64 f) {
    if (mpz_fdiv_ui(n.get_mpz_t(), static_cast<unsigned long>(d)) != 0)
        throw IntegrityError("non-integral cubic coefficient for f=" + std::to_string(f));
    BigInt q;
    mpz_divexact_ui(q.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(d));
    return q;
}

} // namespace

std::string to_string(const Cubic& P) {
    std::string s = "x^3";
    append_term(s, P.c2, "x^2");
    append_term(s, P.c1, "x");
    append_term(s, P.c0, "");
    return s;
}

BigInt discriminant(const Cubic& P) {
    const BigInt &b = P.c2, &c = P.c1, &d = P.c0;
    return b * b * c * c - 4 * c * c * c - 4 * b * b * b * d - 27 * d * d + 18 * b * c * d;
}

bool irreducible(const Cubic& P) {
    if (P.c0 == 0) return false;
    // Any rational root is an integer dividing c0.
    Factorization fz = factor(abs(P.c0));
    if (!fz.complete) throw CapacityError("cannot factor constant term " + P.c0.get_str());
    std::vector<BigInt> divs{1};
    for (const auto& pf : fz.factors) {
        size_t n = divs.size();
        BigInt pk = 1;
        for (int e = 1; e <= pf.e; ++e) {
            pk *= pf.p;
            for (size_t i = 0; i < n; ++i) divs.push_back(divs[i] * pk);
        }
    }
    for (const auto& d : divs)
        if (P.eval(d) == 0 || P.eval(-d) == 0) return false;
    return true;
}

std::string CubicFieldSpec::key() const { return "cubic:" + std::to_string(f) + ":" + std::to_string(b); }

bool conductor_valid(u64 f) {
    if (f < 7) return false;
    u64 F = f;
    int e = 0;
    while (F % 3 == 0) {
        F /= 3;
        ++e;
    }
    if (e != 0 && e != 2) return false;
    if (F == 1) return e == 2;
    for (auto [q, k] : factor_u64(F))
        if (k > 1 || q % 3 != 1) return false;
    return true;
}

std::vector<CubicFieldSpec> enumerate_cyclic_cubic(u64 lo, u64 hi) {
    std::vector<CubicFieldSpec> out;
    for (u64 f = std::max<u64>(lo, 7); f <= hi; ++f) {
        if (!conductor_valid(f)) continue;
        const bool nine = f % 9 == 0;
        const i64 fi = static_cast<i64>(f);
        size_t before = out.size();
        for (i64 b = 1; 27 * b * b <= 4 * fi; ++b) {
            if (nine && b % 3 == 0) continue;
            i64 A = 4 * fi - 27 * b * b;
            i64 a = static_cast<i64>(isqrt(static_cast<u64>(A)));
            if (a * a != A) continue;
            CubicFieldSpec s;
            s.f = f;
            s.b = b;
            BigInt F(static_cast<long>(fi));
            if (!nine) {
                if (a % 3 == 1) a = -a;
                s.poly.c2 = 1;
                s.poly.c1 = exact_div(1 - F, 3, f);
                s.poly.c0 = exact_div(F * (a - 3) + 1, 27, f);
            } else {
                if (a % 9 == 3) a = -a;
                s.poly.c2 = 0;
                s.poly.c1 = -exact_div(F, 3, f);
                s.poly.c0 = -exact_div(F * a, 27, f);
            }
            s.a = a;
            out.push_back(std::move(s));
        }
        if (out.size() == before)
            throw IntegrityError("no representation 4f = a^2 + 27b^2 for conductor " + std::to_string(f));
    }
    return out;
}

Cubic washington_poly(const BigInt& N) {
    if (N == 1) throw UsageError("the Washington family needs N != 1");
    Cubic P;
    P.c2 = -(N * N * N - 2 * N * N + 3 * N - 3);
    P.c1 = -(N * N);
    P.c0 = -1;
    return P;
}

std::string WashingtonMember::key() const { return "washington:" + N.get_str(); }

std::vector<WashingtonMember> washington_grid(u64 p, int k_lo, int k_hi, u64 a_lo, u64 a_hi) {
    if (!is_prime(p)) throw UsageError("p must be prime");
    std::vector<WashingtonMember> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        BigInt pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), p, static_cast<unsigned long>(k));
        for (u64 a = a_lo; a <= a_hi; ++a) {
            if (a % p == 0) continue;
            WashingtonMember w;
            w.a = a;
            w.k = k;
            w.N = 1 + BigInt(static_cast<unsigned long>(a)) * pk;
            w.poly = washington_poly(w.N);
            out.push_back(std::move(w));
        }
    }
    return out;
}

} // namespace ptor
