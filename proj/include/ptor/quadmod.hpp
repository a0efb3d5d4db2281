#pragma once

// Residue arithmetic in O_K / p^N O_K for K = Q(sqrt m), in the integral
// basis {1, w}: w = sqrt m, or (1 + sqrt m)/2 when m = 1 mod 4.

#include <optional>
#include <utility>

#include "ptor/intbase.hpp"

namespace ptor {

// Z / q with q < 2^62.
class WordModulus {
public:
    using value_type = u64;

    WordModulus(u64 q, u64 p) : q_(q), p_(p) {}
    explicit WordModulus(const PrimePower& pp) : q_(pp.q.get_ui()), p_(pp.p) {}

    u64 q() const { return q_; }
    u64 p() const { return p_; }

    u64 from(i64 v) const {
        i64 r = v % static_cast<i64>(q_);
        return static_cast<u64>(r < 0 ? r + static_cast<i64>(q_) : r);
    }
    u64 from(const BigInt& v) const {
        return mpz_fdiv_ui(v.get_mpz_t(), q_);
    }
    BigInt to_big(u64 v) const { return BigInt(static_cast<unsigned long>(v)); }

    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return s >= q_ ? s - q_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + q_ - b; }
    u64 neg(u64 a) const { return a == 0 ? 0 : q_ - a; }
    u64 mul(u64 a, u64 b) const { return static_cast<u64>(static_cast<u128>(a) * b % q_); }

    // a * x + y with a small and nonnegative; skips the 128-bit path when it can.
    u64 mul_add(u64 a, u64 x, u64 y) const {
        u64 prod;
        if (!__builtin_mul_overflow(a, x, &prod)) return add(prod % q_, y);
        return add(mul(a % q_, x), y);
    }

    bool is_zero(u64 a) const { return a == 0; }
    int val(u64 a) const { return vp(a, p_); }

private:
    u64 q_;
    u64 p_;
};

// Z / q for arbitrary q.
class BigModulus {
public:
    using value_type = BigInt;

    explicit BigModulus(const PrimePower& pp) : q_(pp.q), p_(pp.p) {}

    const BigInt& q() const { return q_; }
    u64 p() const { return p_; }

    BigInt from(i64 v) const { return from(BigInt(static_cast<long>(v))); }
    BigInt from(const BigInt& v) const {
        BigInt r;
        mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), q_.get_mpz_t());
        return r;
    }
    BigInt to_big(const BigInt& v) const { return v; }

    BigInt add(const BigInt& a, const BigInt& b) const {
        BigInt s = a + b;
        if (s >= q_) s -= q_;
        return s;
    }
    BigInt sub(const BigInt& a, const BigInt& b) const {
        BigInt s = a - b;
        if (s < 0) s += q_;
        return s;
    }
    BigInt neg(const BigInt& a) const { return a == 0 ? a : BigInt(q_ - a); }
    BigInt mul(const BigInt& a, const BigInt& b) const {
        BigInt r = a * b;
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
        return r;
    }
    BigInt mul_add(u64 a, const BigInt& x, const BigInt& y) const {
        BigInt r = x * static_cast<unsigned long>(a) + y;
        mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
        return r;
    }

    bool is_zero(const BigInt& a) const { return a == 0; }
    int val(const BigInt& a) const { return *padic_valuation(a, p_); }

private:
    BigInt q_;
    u64 p_;
};

template <class V>
struct QuadModElem {
    V x{};
    V y{};
};

// Multiplication context: w^2 = t*w + c.
template <class Ring>
class QuadModRing {
public:
    using V = typename Ring::value_type;
    using Elem = QuadModElem<V>;

    QuadModRing(Ring ring, const BigInt& m) : ring_(std::move(ring)) {
        if (mpz_fdiv_ui(m.get_mpz_t(), 4) == 1) {
            t_ = true;
            c_ = ring_.from(BigInt((m - 1) / 4));
        } else {
            t_ = false;
            c_ = ring_.from(m);
        }
    }

    const Ring& ring() const { return ring_; }
    bool half_basis() const { return t_; }

    Elem make(const BigInt& x, const BigInt& y) const { return {ring_.from(x), ring_.from(y)}; }
    Elem one() const { return {ring_.from(i64{1}), ring_.from(i64{0})}; }

    Elem mul(const Elem& a, const Elem& b) const {
        V yy = ring_.mul(a.y, b.y);
        V x = ring_.add(ring_.mul(a.x, b.x), ring_.mul(c_, yy));
        V y = ring_.add(ring_.mul(a.x, b.y), ring_.mul(a.y, b.x));
        if (t_) y = ring_.add(y, yy);
        return {x, y};
    }

    Elem pow(Elem a, const BigInt& e) const {
        Elem r = one();
        size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
        for (size_t i = bits; i-- > 0;) {
            r = mul(r, r);
            if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, a);
        }
        return r;
    }
    Elem pow(const Elem& a, u64 e) const { return pow(a, BigInt(static_cast<unsigned long>(e))); }

    Elem sub_scalar(Elem a, i64 k) const {
        a.x = ring_.sub(a.x, ring_.from(k));
        return a;
    }

    // N(x + y w) = x^2 + t x y - c y^2.
    V norm(const Elem& a) const {
        V r = ring_.sub(ring_.mul(a.x, a.x), ring_.mul(c_, ring_.mul(a.y, a.y)));
        if (t_) r = ring_.add(r, ring_.mul(a.x, a.y));
        return r;
    }

    // min(v_p(x), v_p(y)); nullopt when both coordinates vanish mod q,
    // meaning the true valuation is at least N.
    std::optional<int> coeff_valuation(const Elem& a) const {
        bool zx = ring_.is_zero(a.x), zy = ring_.is_zero(a.y);
        if (zx && zy) return std::nullopt;
        if (zx) return ring_.val(a.y);
        if (zy) return ring_.val(a.x);
        return std::min(ring_.val(a.x), ring_.val(a.y));
    }

    // v_p of the norm; nullopt when the norm vanishes mod q.
    std::optional<int> norm_valuation(const Elem& a) const {
        V n = norm(a);
        if (ring_.is_zero(n)) return std::nullopt;
        return ring_.val(n);
    }

private:
    Ring ring_;
    bool t_ = false;
    V c_{};
};

// Calls f with a QuadModRing over the cheapest backend able to hold p^N.
template <class F>
decltype(auto) with_quad_ring(const PrimePower& pp, const BigInt& m, F&& f) {
    if (pp.fits_word()) return f(QuadModRing<WordModulus>(WordModulus(pp), m));
    return f(QuadModRing<BigModulus>(BigModulus(pp), m));
}

} // namespace ptor
