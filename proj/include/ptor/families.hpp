#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptor/torsion.hpp"

namespace ptor {

struct ScanOptions {
    unsigned workers = 1;
    u64 block = 4096;
    TorsionOptions torsion;
};

// Calls f(K) for every fundamental discriminant in [lo, hi], ascending.
// `step` > 1 restricts to multiples of step (used for ramified odd p).
template <class F>
void for_each_fundamental(u64 lo, u64 hi, F&& f, u64 step = 1);

enum class Branch { unramified, ramified };

struct DeltaMaxRow {
    u64 D = 0;
    u64 m = 0;
    int delta = 0;
};

// Successive strict maxima of delta_p (starting above 0) over the fields of
// the given branch at p.
std::vector<DeltaMaxRow> scan_delta_max(u64 p, Branch branch, u64 lo, u64 hi, const ScanOptions& opt = {});

struct VptorRow {
    u64 D = 0;
    u64 m = 0;
    u64 p = 0;
    u64 h = 0;
    int v_cl = 0;
    int delta = 0;
    int v_w = 0;
    int vptor = 0;
    double c_p = 0.0;
    double gap = 0.0;
};

VptorRow to_row(const FieldRecord& r);

// Successive strict minima of the gap log sqrt D / log p - vptor over fields
// with vptor > 0. Q(sqrt 2) is skipped for p = 2.
std::vector<VptorRow> scan_vptor_extrema(u64 p, u64 lo, u64 hi, const ScanOptions& opt = {});

// Same scan for several primes, sharing one class number per field.
std::map<u64, std::vector<VptorRow>> scan_vptor_extrema(const std::vector<u64>& primes, u64 lo, u64 hi,
                                                        const ScanOptions& opt = {});

// m = a^2 p^(2 rho) + 1 (unit a p^rho + sqrt m) or
// m = a^2 p^(2 rho) + 4, a p odd (unit (a p^rho + sqrt m)/2).
enum class FamilyVariant { plus1, plus4 };
enum class SquarefreePolicy { require, allow_core };

struct FamilyParams {
    u64 p = 2;
    BigInt a = 1;
    FamilyVariant variant = FamilyVariant::plus1;
    int rho_lo = 2;
    int rho_hi = 10;
    SquarefreePolicy policy = SquarefreePolicy::require;
    u64 trial_bound = 10'000'000;
};

struct FamilyRow {
    int rho = 0;
    BigInt m;             // family integer a^2 p^(2 rho) + 1 or + 4
    BigInt core;          // squarefree kernel; equals m unless core-replaced
    BigInt b = 1;         // m = core * b^2
    BigInt D;
    bool squarefree_proven = true;
    bool core_replaced = false;
    int delta = 0;        // delta_p of the family unit
    int v_w = 0;
    bool identity_ok = true;           // delta + v_w == rho - 1 (squarefree rows)
    std::optional<u64> h;
    std::optional<int> v_cl;
    std::optional<int> delta_fundamental;
    std::optional<int> vptor;
    std::optional<double> c_p;
    std::string flags;
};

// Rows with m not squarefree are dropped under `require` and re-based on the
// squarefree kernel under `allow_core`. Fields above the class ceiling carry
// delta only.
std::vector<FamilyRow> scan_family(const FamilyParams& fp, const ScanOptions& opt = {});

struct ReciprocalParams {
    u64 p = 2;
    int rho = 2;
    BigInt a_lo = 1;
    BigInt a_hi = 1000;
    u64 rho_budget = 5'000'000;
};

// a (d + p^(2 rho) a) = m b^2 with d = 2 (p odd) or d = 1 (p = 2); the unit
// eta = 1 + p^r (p^r a + b sqrt m), r = rho (p odd) or rho + 1 (p = 2).
struct ReciprocalHit {
    BigInt a;
    BigInt b;
    BigInt m;
    BigInt D;
    bool proven = true;     // squarefree kernel fully certified
    int delta_eta = 0;
    int v_w = 0;
    std::optional<u64> h;
    std::optional<int> v_cl;
    std::optional<int> vptor;       // from the fundamental unit
    std::optional<int> vptor_eta;   // v_cl + delta_eta + v_w (upper bound)
    std::optional<double> c_p;
};

bool reciprocal_identity_holds(u64 p, int rho, const BigInt& a, const BigInt& m, const BigInt& b);

// Successive strict minima of D over a in [a_lo, a_hi].
std::vector<ReciprocalHit> reciprocal_search(const ReciprocalParams& rp, const ScanOptions& opt = {});

struct HugePHit {
    u64 D = 0;
    u64 m = 0;
    bool ramified = false;
    double c_p_lower = 0.0;   // log p / log sqrt D, i.e. C_p when vptor = 1
};

// Fundamental discriminants in [lo, hi] with delta_p(eps) >= 1, for p too
// large for any other scan: eps^(p - s) = u mod p^2 (unramified) or
// v_p(N(eps^(p-1) - 1)) >= 3 (ramified).
std::vector<HugePHit> huge_p_regulator_scan(u64 p, u64 lo, u64 hi, const ScanOptions& opt = {});

// Implementation of the template above.
template <class F>
void for_each_fundamental(u64 lo, u64 hi, F&& f, u64 step) {
    lo = std::max<u64>(lo, 5);
    if (hi < lo) return;
    if (step > 1) {
        for (u64 D = (lo + step - 1) / step * step; D <= hi; D += step)
            if (auto K = field_from_discriminant(D)) f(*K);
        return;
    }
    auto sf = squarefree_flags(lo, hi);
    const u64 lo2 = std::max<u64>(1, lo / 8);
    auto sf2 = squarefree_flags(lo2, hi / 4);
    for (u64 D = lo; D <= hi; ++D) {
        int e = __builtin_ctzll(D);
        u64 M = D >> e;
        bool shape = (e == 0 && (M & 3) == 1) || (e == 2 && (M & 3) != 1) || e == 3;
        if (!shape) continue;
        // D squarefree, or D = 4M / 8M with M squarefree.
        if (e == 0 ? !sf[D - lo] : !sf2[M - lo2]) continue;
        f(field_from_core(BigInt(static_cast<unsigned long>(e == 0 ? D : D / 4))));
    }
}

} // namespace ptor
