#pragma once

#include <string>
#include <vector>

#include "ptor/intbase.hpp"

namespace ptor {

// Monic cubic x^3 + c2 x^2 + c1 x + c0.
struct Cubic {
    BigInt c2, c1, c0;

    BigInt eval(const BigInt& x) const { return ((x + c2) * x + c1) * x + c0; }
    bool operator==(const Cubic&) const = default;
};

std::string to_string(const Cubic& P);
BigInt discriminant(const Cubic& P);
// No rational root; for a cubic this is irreducibility over Q.
bool irreducible(const Cubic& P);

// Cyclic cubic field of conductor f, 4f = a^2 + 27 b^2, defined by poly.
struct CubicFieldSpec {
    u64 f = 0;
    i64 a = 0;
    i64 b = 0;
    Cubic poly;

    // Stable identifier used as the oracle key.
    std::string key() const;
};

// f = F or 9F, F squarefree with every prime factor = 1 mod 3 (f = 9 allowed).
bool conductor_valid(u64 f);

// Every (a, b) representation for every valid conductor in [lo, hi],
// ascending f, ascending b within f. Throws IntegrityError if a valid
// conductor has no representation or a coefficient is not integral.
std::vector<CubicFieldSpec> enumerate_cyclic_cubic(u64 lo, u64 hi);

// x^3 - (N^3 - 2N^2 + 3N - 3) x^2 - N^2 x - 1; N = 1 is rejected.
Cubic washington_poly(const BigInt& N);

struct WashingtonMember {
    u64 a = 0;
    int k = 0;
    BigInt N;      // 1 + a p^k
    Cubic poly;
    std::string key() const;
};

// N = 1 + a p^k for k in [k_lo, k_hi], a in [a_lo, a_hi] prime to p.
std::vector<WashingtonMember> washington_grid(u64 p, int k_lo, int k_hi, u64 a_lo, u64 a_hi);

} // namespace ptor
