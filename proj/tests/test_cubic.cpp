#include <algorithm>
#include <cstdlib>
#include <map>

#include "doctest.h"
#include "naive.hpp"
#include "ptor/cubic.hpp"
#include "ptor/errors.hpp"

using namespace ptor;

namespace {

BigInt disc_formula(const Cubic& P) {
    const BigInt &b = P.c2, &c = P.c1, &d = P.c0;
    return BigInt(b * b * c * c - 4 * c * c * c - 4 * b * b * b * d - 27 * d * d + 18 * b * c * d);
}

bool has_rational_root(const Cubic& P) {
    // monic: rational roots are integer divisors of c0
    long c0 = P.c0.get_si();
    if (c0 == 0) return true;
    for (long d = 1; d <= std::labs(c0); ++d) {
        if (c0 % d) continue;
        for (long s : {d, -d})
            if (P.eval(BigInt(s)) == 0) return true;
    }
    return false;
}

bool conductor_naive(u64 f) {
    if (f < 7) return false;
    int e3 = 0;
    while (f % 3 == 0) {
        f /= 3;
        ++e3;
    }
    if (e3 != 0 && e3 != 2) return false;
    for (auto [q, e] : naive::trial_factor(f))
        if (e != 1 || q % 3 != 1) return false;
    return true;
}

int components(u64 f) {
    int t = f % 9 == 0 ? 1 : 0;
    for (auto [q, e] : naive::trial_factor(f))
        if (q != 3) ++t;
    return t;
}

} // namespace

TEST_CASE("conductor test") {
    for (u64 f = 1; f < 50000; ++f) CHECK_MESSAGE(conductor_valid(f) == conductor_naive(f), f);
    CHECK(conductor_valid(9));
    CHECK_FALSE(conductor_valid(27));
}

TEST_CASE("cyclic cubic enumeration: counts, discriminants, irreducibility") {
    auto specs = enumerate_cyclic_cubic(1, 20000);
    std::map<u64, int> count;
    u64 prev = 0;
    for (const auto& s : specs) {
        CHECK(s.f >= prev);
        prev = s.f;
        ++count[s.f];
        CHECK(4 * static_cast<i64>(s.f) == s.a * s.a + 27 * s.b * s.b);
        BigInt d = discriminant(s.poly);
        CHECK(d == disc_formula(s.poly));
        // field discriminant f^2 times the index b^2
        BigInt fb = BigInt(static_cast<unsigned long>(s.f)) * static_cast<long>(s.b);
        CHECK_MESSAGE(d == fb * fb, "f=" << s.f << " b=" << s.b);
        CHECK(irreducible(s.poly));
        CHECK_FALSE(has_rational_root(s.poly));
    }
    for (u64 f = 1; f <= 20000; ++f) {
        if (!conductor_naive(f)) {
            CHECK(count.count(f) == 0);
            continue;
        }
        CHECK_MESSAGE(count[f] == 1 << (components(f) - 1), "f=" << f);
    }
}

TEST_CASE("polynomials of small conductors") {
    auto specs = enumerate_cyclic_cubic(1, 200);
    std::map<u64, std::vector<std::string>> polys;
    for (const auto& s : specs) polys[s.f].push_back(to_string(s.poly));
    CHECK(polys[7] == std::vector<std::string>{"x^3 + x^2 - 2*x - 1"});
    CHECK(polys[9] == std::vector<std::string>{"x^3 - 3*x + 1"});
    CHECK(polys[19] == std::vector<std::string>{"x^3 + x^2 - 6*x - 7"});
    CHECK(polys[31] == std::vector<std::string>{"x^3 + x^2 - 10*x - 8"});
    CHECK(std::find(polys[171].begin(), polys[171].end(), "x^3 - 57*x - 152") != polys[171].end());
    std::vector<u64> fs;
    for (auto& [f, v] : polys) fs.push_back(f);
    CHECK(std::vector<u64>(fs.begin(), fs.begin() + 10) == std::vector<u64>{7, 9, 13, 19, 31, 37, 43, 61, 63, 67});
    CHECK(enumerate_cyclic_cubic(1, 200)[0].key() == "cubic:7:1");
}

TEST_CASE("Washington polynomials define cyclic cubic fields") {
    for (long N = 2; N < 60; ++N) {
        Cubic P = washington_poly(BigInt(N));
        BigInt d = disc_formula(P);
        CHECK(discriminant(P) == d);
        CHECK(is_square(d));
        CHECK(d > 0);
    }
    CHECK(to_string(washington_poly(BigInt(2))) == "x^3 - 3*x^2 - 4*x - 1");
    CHECK_THROWS_AS(washington_poly(BigInt(1)), UsageError);
    auto grid = washington_grid(3, 2, 4, 1, 6);
    for (const auto& w : grid) {
        CHECK(w.a % 3 != 0);
        BigInt N = 1;
        for (int i = 0; i < w.k; ++i) N *= 3;
        CHECK(w.N == N * static_cast<unsigned long>(w.a) + 1);
        CHECK(w.poly == washington_poly(w.N));
    }
    CHECK(grid.size() == 3 * 4);
}

TEST_CASE("cubic polynomial helpers") {
    Cubic P{BigInt(0), BigInt(-1), BigInt(0)};  // x^3 - x
    CHECK_FALSE(irreducible(P));
    CHECK(to_string(P) == "x^3 - x");
    CHECK(to_string(Cubic{BigInt(-5), BigInt(1), BigInt(-1)}) == "x^3 - 5*x^2 + x - 1");
}
