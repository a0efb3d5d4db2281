#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace ptor {

using BigInt = mpz_class;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

u64 isqrt(u64 n);
BigInt isqrt(const BigInt& n);
bool is_square(const BigInt& n, BigInt* root = nullptr);

// Kronecker symbol (a/n), n >= 1.
int kronecker(i64 a, u64 n);
int kronecker(const BigInt& a, const BigInt& n);

// p-adic valuation. std::nullopt stands for the infinite valuation of 0.
std::optional<int> padic_valuation(const BigInt& n, u64 p);
std::optional<int> padic_valuation(i64 n, u64 p);

// Exact p-adic valuation of an integer already known to be nonzero.
int vp(u64 n, u64 p);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
bool is_prime(u64 n);
bool is_prime(const BigInt& n);

struct PrimeFactor {
    BigInt p;
    int e = 0;
};

struct Factorization {
    std::vector<PrimeFactor> factors;
    // false when a composite cofactor could not be split within the budget;
    // that cofactor is then kept as a single entry with e = 1.
    bool complete = true;
};

// Full factorization: trial division, Miller-Rabin, Pollard-Brent.
// `rho_budget` caps the number of rho iterations per split attempt.
Factorization factor(const BigInt& n, u64 rho_budget = 50'000'000);
std::vector<std::pair<u64, int>> factor_u64(u64 n);

// Smallest-prime-factor table on [0, limit].
class SpfSieve {
public:
    explicit SpfSieve(std::uint32_t limit);
    std::uint32_t limit() const { return limit_; }
    std::uint32_t spf(std::uint32_t n) const { return spf_[n]; }
    // Prime factorization of n <= limit, ascending primes.
    void factor(std::uint32_t n, std::vector<std::pair<std::uint32_t, int>>& out) const;
    bool squarefree(std::uint32_t n) const;

private:
    std::uint32_t limit_;
    std::vector<std::uint32_t> spf_;
};

// Shared sieve covering at least `limit`; grows on demand, never shrinks.
const SpfSieve& spf_sieve(std::uint32_t limit);

// flags[i] is true iff lo + i is squarefree, for lo >= 1.
std::vector<bool> squarefree_flags(u64 lo, u64 hi);

struct SquarefreeCore {
    BigInt core;   // squarefree part
    BigInt b;      // n = core * b^2
    bool proven = true;
};

// n > 0.
SquarefreeCore squarefree_core(const BigInt& n, u64 rho_budget = 50'000'000);
bool is_squarefree(u64 n);

enum class SquarefreeStatus { squarefree, not_squarefree, probable };

// Trial division by all primes up to `trial_bound`, then a primality or
// perfect-square test on the cofactor, then a bounded rho attempt. Whatever
// is still undecided comes back as `probable`.
SquarefreeStatus certify_squarefree(const BigInt& n, u64 trial_bound = 10'000'000, u64 rho_budget = 2'000'000);

// Primes up to `limit` (cached).
const std::vector<std::uint32_t>& primes_up_to(std::uint32_t limit);

// Modulus p^N used for residue arithmetic in O_K / p^N.
struct PrimePower {
    u64 p = 0;
    int N = 0;
    BigInt q;

    PrimePower() = default;
    PrimePower(u64 p_, int N_);
    bool fits_word() const { return q.fits_ulong_p() && q.get_ui() < (u64(1) << 62); }
};

// Largest N with p^N < 2^bits (at least `min_n`).
int word_exponent(u64 p, int bits = 62, int min_n = 2);

} // namespace ptor
