#pragma once

// Slow, obviously-correct reference computations used by the unit tests.
// Nothing here calls into the library.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace naive {

using u64 = std::uint64_t;
using i64 = std::int64_t;

inline std::vector<std::pair<u64, int>> trial_factor(u64 n) {
    std::vector<std::pair<u64, int>> out;
    for (u64 d = 2; d * d <= n; ++d) {
        int e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e) out.emplace_back(d, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline bool squarefree(u64 n) {
    for (auto [q, e] : trial_factor(n))
        if (e > 1) return false;
    return true;
}

inline int val(mpz_class n, u64 p) {
    if (n == 0) return 1 << 30;
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

// b^e mod m by e multiplications.
inline u64 slow_pow(u64 b, u64 e, u64 m) {
    unsigned __int128 r = 1 % m;
    for (u64 i = 0; i < e; ++i) r = r * (b % m) % m;
    return static_cast<u64>(r);
}

// Legendre symbol by Euler's criterion, q an odd prime.
inline int legendre(i64 a, u64 q) {
    i64 r = a % static_cast<i64>(q);
    if (r < 0) r += static_cast<i64>(q);
    if (r == 0) return 0;
    u64 e = 1, b = static_cast<u64>(r);
    for (u64 k = (q - 1) / 2; k; k >>= 1) {
        if (k & 1) e = static_cast<u64>(static_cast<unsigned __int128>(e) * b % q);
        b = static_cast<u64>(static_cast<unsigned __int128>(b) * b % q);
    }
    return e == 1 ? 1 : -1;
}

// Kronecker symbol (a/n), n > 0, through the factorization of n.
inline int kronecker(i64 a, u64 n) {
    int s = 1;
    for (auto [q, e] : trial_factor(n)) {
        int t;
        if (q == 2) {
            if (a % 2 == 0) return 0;
            i64 r = ((a % 8) + 8) % 8;
            t = (r == 1 || r == 7) ? 1 : -1;
        } else {
            t = legendre(a, q);
        }
        if (t == 0) return 0;
        if (e & 1) s *= t;
    }
    return s;
}

inline bool is_fundamental(u64 D) {
    if (D % 4 == 1) return squarefree(D);
    if (D % 4 != 0) return false;
    u64 m = D / 4;
    return (m % 4 == 2 || m % 4 == 3) && squarefree(m);
}

// Fundamental unit (x + y sqrt m)/d, d = 2 for m = 1 mod 4, else 1, with the
// smallest y > 0. Empty if y exceeds `ymax`.
struct Unit {
    mpz_class x, y;
    int d = 1;
    int norm = 1;
};

inline std::optional<Unit> pell(u64 m, u64 ymax = 20'000'000) {
    const int d = m % 4 == 1 ? 2 : 1;
    const mpz_class k = d * d;
    for (u64 y = 1; y <= ymax; ++y) {
        mpz_class my2 = mpz_class(static_cast<unsigned long>(m)) * y * y;
        for (int sgn : {-1, 1}) {
            mpz_class t = my2 + sgn * k;
            if (t <= 0) continue;
            mpz_class r = sqrt(t);
            if (r * r == t) return Unit{r, mpz_class(static_cast<unsigned long>(y)), d, sgn};
        }
    }
    return std::nullopt;
}

inline double log_unit(const Unit& u, u64 m) {
    return std::log((u.x.get_d() + u.y.get_d() * std::sqrt(static_cast<double>(m))) / u.d);
}

// Class number from the analytic formula
//   h R = -1/2 sum_{0<a<D} (D/a) log sin(pi a / D).
inline u64 class_number_analytic(u64 D, double R) {
    long double s = 0;
    const long double pi = 3.14159265358979323846264338327950288L;
    for (u64 a = 1; a < D; ++a) {
        int c = kronecker(static_cast<i64>(D), a);
        if (c) s += c * std::log(std::sin(pi * a / D));
    }
    return static_cast<u64>(std::llround(static_cast<double>(-0.5L * s / R)));
}

// (x + y sqrt m) products modulo q, x, y exact residues.
struct Qm {
    mpz_class x, y;
};

inline Qm qmul(const Qm& a, const Qm& b, const mpz_class& m, const mpz_class& q) {
    Qm r{a.x * b.x + m * a.y * b.y, a.x * b.y + a.y * b.x};
    mpz_class t;
    mpz_fdiv_r(t.get_mpz_t(), r.x.get_mpz_t(), q.get_mpz_t());
    r.x = t;
    mpz_fdiv_r(t.get_mpz_t(), r.y.get_mpz_t(), q.get_mpz_t());
    r.y = t;
    return r;
}

// delta_p for p odd not dividing D: v_p(eps^(p^2 - 1) - 1) - 1, by
// repeated multiplication of the exact unit modulo p^N.
inline int delta_unramified(u64 m, u64 p, const Unit& u, int N = 24) {
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), p, N);
    mpz_class inv = 1;
    if (u.d == 2) mpz_invert(inv.get_mpz_t(), mpz_class(2).get_mpz_t(), q.get_mpz_t());
    Qm e{u.x * inv % q, u.y * inv % q};
    Qm r{1, 0};
    const mpz_class mm(static_cast<unsigned long>(m));
    for (u64 i = 0; i < p * p - 1; ++i) r = qmul(r, e, mm, q);
    int v = std::min(val(r.x - 1, p), val(r.y, p));
    return std::min(v, N) - 1;
}

} // namespace naive
