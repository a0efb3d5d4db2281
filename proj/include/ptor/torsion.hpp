#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ptor/quadfield.hpp"

namespace ptor {

enum class DeltaKind {
    unramified_odd,   // p odd, p does not divide D
    unramified_two,   // p = 2, m = 1 mod 4
    ramified_two,     // p = 2, m = 2, 3 mod 4
    ramified_three,   // p = 3 | m
    ramified_odd,     // p > 3, p | m
};

struct DeltaCase {
    DeltaKind kind{};
    int s = 0;           // Kronecker symbol (D/p); 0 when ramified
    unsigned m_mod8 = 0;
    bool minus3_mod9 = false;
};

const char* to_string(DeltaKind k);

DeltaCase classify(const BigInt& m, u64 p);

// Ramified p = 2, m = 2 mod 8:
//   standard: (v_P(eps^4 - 1) - 5)/2, the valuation of the normalized
//             regulator; agrees with the published delta-maximum tables.
//   m2_shifted: (v_P(eps^4 - 1) - 7)/2, one less, as the m = 6 mod 8 branch.
// Every other case is identical under both conventions.
enum class DeltaConvention { standard, m2_shifted };

// Residue of a unit (mod p^N) and its norm. Called again with a larger
// modulus whenever the current one saturates.
struct UnitResidue {
    QuadModElem<BigInt> eps;
    int norm = 0;
};
using UnitSource = std::function<UnitResidue(const PrimePower&)>;

struct DeltaOptions {
    int start_N = 0;     // 0: largest N with p^N < 2^62
    int max_N = 4096;
    DeltaConvention convention = DeltaConvention::standard;
};

struct DeltaResult {
    int delta = 0;
    int N = 0;           // modulus exponent that produced the answer
    int escalations = 0;
};

// delta_p(eps) for any unit of O_K supplied by `unit`. Throws CapacityError
// past max_N, IntegrityError on parity or sign violations.
DeltaResult delta_p(const QuadFieldId& K, u64 p, const UnitSource& unit, const DeltaOptions& opt = {});

// Unit source backed by the continued fraction of the fundamental unit.
UnitSource fundamental_unit_source(const QuadFieldId& K);

// v_p(#W_K).
int w_valuation(const BigInt& m, u64 p);

// v_p(#Cl^c_K) from h; for p = 2 and m = 2 mod 8, #Cl = 2 #Cl^c.
int clc_valuation(u64 h, const BigInt& m, u64 p);

struct FieldRecord {
    QuadFieldId K;
    u64 p = 0;
    DeltaCase dcase;
    u64 h = 0;
    int unit_norm = 0;
    double regulator = 0.0;
    int v_cl = 0;
    int delta = 0;
    int v_w = 0;
    int vptor = 0;
    double c_p = 0.0;     // vptor log p / log sqrt D
    double gap = 0.0;     // log sqrt D / log p - vptor
    int modulus_N = 0;
};

struct TorsionOptions {
    u64 class_ceiling = kDefaultClassCeiling;
    DeltaOptions delta;
};

// Full decomposition v_cl + delta + v_w. Uses a precomputed class number
// when one is given.
FieldRecord field_record(const QuadFieldId& K, u64 p, const TorsionOptions& opt = {},
                         const ClassNumber* cn = nullptr);

// v_p(#T_K) for Q(sqrt m).
int vptor(const BigInt& m, u64 p, const TorsionOptions& opt = {});

double brauer_siegel_cp(int vptor, u64 p, const BigInt& D);
double brauer_siegel_gap(int vptor, u64 p, const BigInt& D);

// log of a positive big integer.
double log_big(const BigInt& n);

} // namespace ptor
