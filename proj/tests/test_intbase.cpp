#include <random>

#include "doctest.h"
#include "naive.hpp"
#include "ptor/intbase.hpp"

using namespace ptor;

TEST_CASE("isqrt is the floor square root") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        u64 n = rng() >> (rng() % 64);
        u64 r = isqrt(n);
        CHECK((unsigned __int128)r * r <= n);
        CHECK((unsigned __int128)(r + 1) * (r + 1) > n);
    }
    CHECK(isqrt(~u64(0)) == 4294967295ULL);
    BigInt big = BigInt("123456789012345678901234567890");
    BigInt r = isqrt(big);
    CHECK(r * r <= big);
    CHECK((r + 1) * (r + 1) > big);
}

TEST_CASE("is_square with root") {
    BigInt root;
    CHECK(is_square(BigInt(3844), &root));
    CHECK(root == 62);
    CHECK_FALSE(is_square(BigInt(3845)));
    CHECK(is_square(BigInt(0)));
}

TEST_CASE("kronecker agrees with Euler's criterion over factored moduli") {
    for (i64 a = -60; a <= 60; ++a)
        for (u64 n = 1; n <= 300; ++n) CHECK_MESSAGE(kronecker(a, n) == naive::kronecker(a, n), a << "/" << n);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        i64 a = static_cast<i64>(rng() % 2000000) - 1000000;
        u64 n = rng() % 100000 + 1;
        CHECK(kronecker(BigInt(static_cast<long>(a)), BigInt(static_cast<unsigned long>(n))) ==
              naive::kronecker(a, n));
    }
}

TEST_CASE("p-adic valuation") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 3000; ++i) {
        static const u64 P[] = {2, 3, 5, 7, 11, 13, 47};
        u64 p = P[rng() % 7];
        BigInt n = BigInt(static_cast<unsigned long>(rng() % 1000000 + 1));
        for (u64 k = rng() % 5; k; --k) n *= static_cast<unsigned long>(p);
        CHECK(*padic_valuation(n, p) == naive::val(n, p));
        CHECK(*padic_valuation(BigInt(-n), p) == naive::val(n, p));
    }
    CHECK_FALSE(padic_valuation(BigInt(0), 5).has_value());
    CHECK(vp(96, 2) == 5);
}

TEST_CASE("modular arithmetic against repeated multiplication") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        u64 m = rng() % ((u64(1) << 62) - 2) + 2;
        u64 a = rng() % m, b = rng() % m;
        CHECK(mulmod(a, b, m) == static_cast<u64>(static_cast<unsigned __int128>(a) * b % m));
        u64 e = rng() % 300;
        CHECK(powmod(a, e, m) == naive::slow_pow(a, e, m));
    }
}

TEST_CASE("primality against trial division") {
    for (u64 n = 0; n < 20000; ++n) CHECK(is_prime(n) == naive::prime(n));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300; ++i) {
        u64 n = rng() % 1'000'000'000'000ULL;
        CHECK(is_prime(n) == naive::prime(n));
    }
    CHECK(is_prime(13599893));
    CHECK(is_prime(BigInt("170141183460469231731687303715884105727")));
    CHECK_FALSE(is_prime(BigInt("170141183460469231731687303715884105729")));
}

TEST_CASE("factorization reproduces n and matches trial division") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 400; ++i) {
        u64 n = rng() % 10'000'000'000ULL + 2;
        auto want = naive::trial_factor(n);
        auto got = factor_u64(n);
        CHECK(got == want);
        Factorization f = factor(BigInt(static_cast<unsigned long>(n)));
        CHECK(f.complete);
        BigInt prod = 1;
        for (auto& pf : f.factors) {
            CHECK(is_prime(pf.p));
            for (int k = 0; k < pf.e; ++k) prod *= pf.p;
        }
        CHECK(prod == n);
    }
    // semiprime needing rho
    BigInt n = BigInt("1000000007") * BigInt("998244353") * BigInt("1000000009");
    Factorization f = factor(n);
    CHECK(f.complete);
    CHECK(f.factors.size() == 3);
}

TEST_CASE("squarefree sieve and cores") {
    auto flags = squarefree_flags(1000, 30000);
    for (u64 n = 1000; n <= 30000; ++n) CHECK(flags[n - 1000] == naive::squarefree(n));
    for (u64 n = 1; n < 3000; ++n) CHECK(is_squarefree(n) == naive::squarefree(n));
    SquarefreeCore c = squarefree_core(BigInt(4194305) * 9 * 49);
    CHECK(c.core == 4194305);
    CHECK(c.b == 21);
    CHECK(certify_squarefree(BigInt(43046722)) == SquarefreeStatus::squarefree);
    CHECK(certify_squarefree(BigInt(1000000007) * BigInt(1000000007) * 3) == SquarefreeStatus::not_squarefree);
}

TEST_CASE("prime list and word exponent") {
    const auto& ps = primes_up_to(1000);
    u64 k = 0;
    for (u64 n = 2; n <= 1000; ++n)
        if (naive::prime(n)) CHECK(ps.at(k++) == n);
    CHECK(ps.size() == k);
    int N = word_exponent(3);
    BigInt q = 1;
    for (int i = 0; i < N; ++i) q *= 3;
    CHECK(q < BigInt(1) << 62);
    CHECK(q * 3 >= BigInt(1) << 62);
}
