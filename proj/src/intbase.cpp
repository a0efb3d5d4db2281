#include "ptor/intbase.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>

namespace ptor {

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

BigInt isqrt(const BigInt& n) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const BigInt& n, BigInt* root) {
    if (n < 0) return false;
    if (!mpz_perfect_square_p(n.get_mpz_t())) return false;
    if (root) *root = isqrt(n);
    return true;
}

int kronecker(i64 a, u64 n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int t = 1;
    int e = __builtin_ctzll(n);
    n >>= e;
    if (e > 0) {
        if ((a & 1) == 0) return 0;
        int r8 = static_cast<int>(((a % 8) + 8) % 8);
        if ((e & 1) && (r8 == 3 || r8 == 5)) t = -t;
    }
    i64 am = a % static_cast<i64>(n);
    u64 x = static_cast<u64>(am < 0 ? am + static_cast<i64>(n) : am);
    u64 y = n;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            u64 r = y & 7;
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, y);
        if ((x & 3) == 3 && (y & 3) == 3) t = -t;
        x %= y;
    }
    return y == 1 ? t : 0;
}

int kronecker(const BigInt& a, const BigInt& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

std::optional<int> padic_valuation(const BigInt& n, u64 p) {
    if (n == 0) return std::nullopt;
    if (p == 2) return static_cast<int>(mpz_scan1(n.get_mpz_t(), 0));
    BigInt pp = static_cast<unsigned long>(p);
    BigInt t;
    int v = static_cast<int>(mpz_remove(t.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t()));
    return v;
}

std::optional<int> padic_valuation(i64 n, u64 p) {
    if (n == 0) return std::nullopt;
    u64 m = n < 0 ? static_cast<u64>(-(n + 1)) + 1 : static_cast<u64>(n);
    return vp(m, p);
}

int vp(u64 n, u64 p) {
    if (p == 2) return __builtin_ctzll(n);
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = __builtin_ctzll(d);
    d >>= s;
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        u64 x = powmod(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    if (n.fits_ulong_p()) return is_prime(static_cast<u64>(n.get_ui()));
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

namespace {

u64 rho_u64(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1; c < 200; ++c) {
        u64 y = 2, x = 2, q = 1, g = 1, ys = 2;
        u64 r = 1;
        const u64 m = 128;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
    return n;
}

void factor_rec_u64(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = rho_u64(n);
    factor_rec_u64(d, out);
    factor_rec_u64(n / d, out);
}

// Returns a nontrivial factor or 0 when the budget runs out.
BigInt rho_big(const BigInt& n, u64 budget) {
    BigInt x, y, ys, q, g, diff;
    u64 used = 0;
    for (unsigned long c = 1; c < 64 && used < budget; ++c) {
        y = 2;
        q = 1;
        g = 1;
        u64 r = 1;
        const u64 m = 256;
        auto f = [&](BigInt& v) {
            v = v * v + c;
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
        };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) f(y);
            u64 k = 0;
            do {
                ys = y;
                u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    f(y);
                    diff = x - y;
                    q *= diff;
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                }
                used += lim;
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1 && used < budget);
            r <<= 1;
        } while (g == 1 && used < budget);
        if (g == n) {
            do {
                f(ys);
                diff = x - ys;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n && g != 1) return g;
    }
    return 0;
}

void factor_rec_big(const BigInt& n, u64 budget, std::vector<BigInt>& out, Factorization& res) {
    if (n == 1) return;
    if (n.fits_ulong_p()) {
        std::vector<u64> ps;
        factor_rec_u64(n.get_ui(), ps);
        for (u64 p : ps) out.emplace_back(static_cast<unsigned long>(p));
        return;
    }
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    BigInt r;
    if (is_square(n, &r)) {
        factor_rec_big(r, budget, out, res);
        factor_rec_big(r, budget, out, res);
        return;
    }
    BigInt d = rho_big(n, budget);
    if (d == 0) {
        res.complete = false;
        out.push_back(n);
        return;
    }
    factor_rec_big(d, budget, out, res);
    factor_rec_big(BigInt(n / d), budget, out, res);
}

} // namespace

std::vector<std::pair<u64, int>> factor_u64(u64 n) {
    std::vector<std::pair<u64, int>> res;
    if (n <= 1) return res;
    std::vector<u64> ps;
    for (u64 p = 2; p < 1000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            ps.push_back(p);
            n /= p;
        }
    }
    factor_rec_u64(n, ps);
    std::sort(ps.begin(), ps.end());
    for (u64 p : ps) {
        if (!res.empty() && res.back().first == p)
            ++res.back().second;
        else
            res.emplace_back(p, 1);
    }
    return res;
}

Factorization factor(const BigInt& n0, u64 rho_budget) {
    Factorization res;
    BigInt n = abs(n0);
    if (n <= 1) return res;
    std::vector<BigInt> ps;
    for (unsigned long p = 2; p < 10000; p += (p == 2 ? 1 : 2)) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            do {
                ps.emplace_back(p);
                mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            } while (mpz_divisible_ui_p(n.get_mpz_t(), p));
        }
        if (BigInt(p) * p > n) break;
    }
    factor_rec_big(n, rho_budget, ps, res);
    std::sort(ps.begin(), ps.end());
    for (auto& p : ps) {
        if (p == 1) continue;
        if (!res.factors.empty() && res.factors.back().p == p)
            ++res.factors.back().e;
        else
            res.factors.push_back({p, 1});
    }
    return res;
}

SpfSieve::SpfSieve(std::uint32_t limit) : limit_(limit), spf_(static_cast<size_t>(limit) + 1, 0) {
    std::vector<std::uint32_t> primes;
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = i;
            primes.push_back(i);
        }
        for (std::uint32_t p : primes) {
            u64 v = static_cast<u64>(p) * i;
            if (p > spf_[i] || v > limit) break;
            spf_[v] = p;
        }
    }
}

void SpfSieve::factor(std::uint32_t n, std::vector<std::pair<std::uint32_t, int>>& out) const {
    out.clear();
    while (n > 1) {
        std::uint32_t p = spf_[n];
        int e = 0;
        do {
            n /= p;
            ++e;
        } while (n % p == 0);
        out.emplace_back(p, e);
    }
}

bool SpfSieve::squarefree(std::uint32_t n) const {
    while (n > 1) {
        std::uint32_t p = spf_[n];
        n /= p;
        if (n % p == 0) return false;
    }
    return true;
}

const SpfSieve& spf_sieve(std::uint32_t limit) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<SpfSieve>> sieves;
    std::lock_guard lock(mu);
    if (sieves.empty() || sieves.back()->limit() < limit) {
        std::uint32_t want = std::max<std::uint32_t>(limit, 1u << 16);
        if (!sieves.empty()) want = std::max<std::uint32_t>(want, sieves.back()->limit() * 2);
        sieves.push_back(std::make_unique<SpfSieve>(want));
    }
    return *sieves.back();
}

std::vector<bool> squarefree_flags(u64 lo, u64 hi) {
    if (hi < lo) return {};
    std::vector<bool> flags(hi - lo + 1, true);
    u64 r = isqrt(hi);
    std::vector<bool> comp(r + 1, false);
    for (u64 p = 2; p <= r; ++p) {
        if (comp[p]) continue;
        for (u64 k = p * p; k <= r; k += p) comp[k] = true;
        u64 sq = p * p;
        u64 start = (lo + sq - 1) / sq * sq;
        for (u64 k = start; k <= hi; k += sq) flags[k - lo] = false;
    }
    return flags;
}

SquarefreeCore squarefree_core(const BigInt& n, u64 rho_budget) {
    SquarefreeCore res;
    res.core = 1;
    res.b = 1;
    Factorization f = factor(n, rho_budget);
    res.proven = f.complete;
    for (auto& [p, e] : f.factors) {
        if (e & 1) res.core *= p;
        for (int i = 0; i < e / 2; ++i) res.b *= p;
    }
    return res;
}

bool is_squarefree(u64 n) {
    for (auto& [p, e] : factor_u64(n))
        if (e > 1) return false;
    return true;
}

const std::vector<std::uint32_t>& primes_up_to(std::uint32_t limit) {
    static std::mutex mu;
    static std::vector<std::unique_ptr<std::vector<std::uint32_t>>> cache;
    static std::vector<std::uint32_t> limits;
    std::lock_guard lock(mu);
    for (size_t i = 0; i < limits.size(); ++i)
        if (limits[i] == limit) return *cache[i];
    std::vector<bool> comp(static_cast<size_t>(limit) + 1, false);
    auto ps = std::make_unique<std::vector<std::uint32_t>>();
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        ps->push_back(static_cast<std::uint32_t>(i));
        for (u64 k = i * i; k <= limit; k += i) comp[k] = true;
    }
    limits.push_back(limit);
    cache.push_back(std::move(ps));
    return *cache.back();
}

SquarefreeStatus certify_squarefree(const BigInt& n0, u64 trial_bound, u64 rho_budget) {
    BigInt n = abs(n0);
    if (n == 0) return SquarefreeStatus::not_squarefree;
    const auto& ps = primes_up_to(static_cast<std::uint32_t>(trial_bound));
    for (std::uint32_t p : ps) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
            if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return SquarefreeStatus::not_squarefree;
        }
        if (n == 1) return SquarefreeStatus::squarefree;
    }
    // No prime factor below the bound: a cofactor under bound^2 is prime.
    BigInt tb = static_cast<unsigned long>(trial_bound);
    if (n < tb * tb || is_prime(n)) return SquarefreeStatus::squarefree;
    if (is_square(n)) return SquarefreeStatus::not_squarefree;
    Factorization f = factor(n, rho_budget);
    for (auto& pf : f.factors)
        if (pf.e > 1) return SquarefreeStatus::not_squarefree;
    return f.complete ? SquarefreeStatus::squarefree : SquarefreeStatus::probable;
}

PrimePower::PrimePower(u64 p_, int N_) : p(p_), N(N_) {
    mpz_ui_pow_ui(q.get_mpz_t(), p_, static_cast<unsigned long>(N_));
}

int word_exponent(u64 p, int bits, int min_n) {
    int n = 0;
    u128 v = 1;
    const u128 lim = static_cast<u128>(1) << bits;
    while (v * p < lim) {
        v *= p;
        ++n;
    }
    return std::max(n, min_n);
}

} // namespace ptor
