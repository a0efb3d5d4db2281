#include "ptor/families.hpp"

#include <cmath>
#include <limits>

#include "ptor/parallel.hpp"

namespace ptor {

namespace {

bool is_ramified(DeltaKind k) {
    return k == DeltaKind::ramified_two || k == DeltaKind::ramified_three || k == DeltaKind::ramified_odd;
}

// Explicit unit with known norm, as x + y w coordinates.
UnitSource explicit_unit(BigInt x, BigInt y, int norm) {
    return [x = std::move(x), y = std::move(y), norm](const PrimePower& pp) {
        UnitResidue u;
        mpz_fdiv_r(u.eps.x.get_mpz_t(), x.get_mpz_t(), pp.q.get_mpz_t());
        mpz_fdiv_r(u.eps.y.get_mpz_t(), y.get_mpz_t(), pp.q.get_mpz_t());
        u.norm = norm;
        return u;
    };
}

// (X + Y sqrt m)/den in the {1, w} basis of Q(sqrt m); den is 1 or 2.
std::pair<BigInt, BigInt> to_omega(const QuadFieldId& K, const BigInt& X, const BigInt& Y, int den) {
    if (K.half) {
        // sqrt m = 2w - 1
        BigInt x = X - Y;
        if (den == 2) {
            if (!mpz_divisible_2exp_p(x.get_mpz_t(), 1)) throw IntegrityError("unit is not integral");
            return {BigInt(x / 2), Y};
        }
        return {x, BigInt(2 * Y)};
    }
    if (den == 2) throw IntegrityError("unit is not integral");
    return {X, Y};
}

} // namespace

std::vector<DeltaMaxRow> scan_delta_max(u64 p, Branch branch, u64 lo, u64 hi, const ScanOptions& opt) {
    const bool want_ram = branch == Branch::ramified;
    const u64 step = (want_ram && p > 2) ? p : 1;
    const DeltaOptions& dopt = opt.torsion.delta;
    auto blocks = map_blocks<DeltaMaxRow>(lo, hi, opt.block, opt.workers, [&](u64 b_lo, u64 b_hi) {
        std::vector<DeltaMaxRow> rows;
        int best = 0;
        for_each_fundamental(
            b_lo, b_hi,
            [&](const QuadFieldId& K) {
                if (p == 2 && K.m == 2) return;
                DeltaCase dc = classify(K.m, p);
                if (is_ramified(dc.kind) != want_ram) return;
                int d = delta_p(K, p, fundamental_unit_source(K), dopt).delta;
                if (d > best) {
                    best = d;
                    rows.push_back({K.D_u64(), K.m_u64(), d});
                }
            },
            step);
        return rows;
    });
    std::vector<DeltaMaxRow> out;
    int best = 0;
    for (auto& blk : blocks)
        for (auto& r : blk)
            if (r.delta > best) {
                best = r.delta;
                out.push_back(r);
            }
    return out;
}

VptorRow to_row(const FieldRecord& r) {
    VptorRow v;
    v.D = r.K.D_u64();
    v.m = r.K.m_u64();
    v.p = r.p;
    v.h = r.h;
    v.v_cl = r.v_cl;
    v.delta = r.delta;
    v.v_w = r.v_w;
    v.vptor = r.vptor;
    v.c_p = r.c_p;
    v.gap = r.gap;
    return v;
}

std::map<u64, std::vector<VptorRow>> scan_vptor_extrema(const std::vector<u64>& primes, u64 lo, u64 hi,
                                                        const ScanOptions& opt) {
    const double inf = std::numeric_limits<double>::infinity();
    auto blocks = map_blocks<VptorRow>(lo, hi, opt.block, opt.workers, [&](u64 b_lo, u64 b_hi) {
        std::vector<VptorRow> rows;
        std::vector<double> best(primes.size(), inf);
        for_each_fundamental(b_lo, b_hi, [&](const QuadFieldId& K) {
            ClassNumber cn = class_number(K.D_u64(), opt.torsion.class_ceiling);
            for (size_t i = 0; i < primes.size(); ++i) {
                u64 p = primes[i];
                if (p == 2 && K.m == 2) continue;
                FieldRecord r = field_record(K, p, opt.torsion, &cn);
                if (r.vptor == 0 || !(r.gap < best[i])) continue;
                best[i] = r.gap;
                rows.push_back(to_row(r));
            }
        });
        return rows;
    });
    std::map<u64, std::vector<VptorRow>> out;
    std::map<u64, double> best;
    for (u64 p : primes) {
        out[p];
        best[p] = inf;
    }
    for (auto& blk : blocks)
        for (auto& r : blk)
            if (r.gap < best[r.p]) {
                best[r.p] = r.gap;
                out[r.p].push_back(r);
            }
    return out;
}

std::vector<VptorRow> scan_vptor_extrema(u64 p, u64 lo, u64 hi, const ScanOptions& opt) {
    return scan_vptor_extrema(std::vector<u64>{p}, lo, hi, opt)[p];
}

std::vector<FamilyRow> scan_family(const FamilyParams& fp, const ScanOptions& opt) {
    if (fp.rho_lo < 1 || fp.rho_hi < fp.rho_lo) throw UsageError("bad rho range");
    if (fp.a < 1) throw UsageError("a must be positive");
    if (mpz_divisible_ui_p(fp.a.get_mpz_t(), fp.p)) throw UsageError("p must not divide a");
    const bool plus4 = fp.variant == FamilyVariant::plus4;
    std::vector<FamilyRow> rows;
    for (int rho = fp.rho_lo; rho <= fp.rho_hi; ++rho) {
        BigInt P;
        mpz_ui_pow_ui(P.get_mpz_t(), fp.p, static_cast<unsigned long>(rho));
        BigInt A = fp.a * P;
        if (plus4 && mpz_even_p(A.get_mpz_t())) throw UsageError("the +4 family needs a p odd");
        FamilyRow row;
        row.rho = rho;
        row.m = A * A + (plus4 ? 4 : 1);
        SquarefreeStatus st = certify_squarefree(row.m, fp.trial_bound);
        if (st == SquarefreeStatus::not_squarefree) {
            if (fp.policy == SquarefreePolicy::require) continue;
            SquarefreeCore c = squarefree_core(row.m);
            row.core = c.core;
            row.b = c.b;
            row.core_replaced = true;
            row.squarefree_proven = c.proven;
            row.flags = "core-replaced";
            if (row.core == 1) continue;
        } else {
            row.core = row.m;
            row.squarefree_proven = st == SquarefreeStatus::squarefree;
            if (!row.squarefree_proven) row.flags = "probably-squarefree";
        }
        QuadFieldId K = field_from_core(row.core);
        row.D = K.D;
        if (fp.p == 2 && K.m == 2) continue;
        auto [x, y] = to_omega(K, A, row.b, plus4 ? 2 : 1);
        const DeltaOptions& dopt = opt.torsion.delta;
        row.delta = delta_p(K, fp.p, explicit_unit(x, y, -1), dopt).delta;
        row.v_w = w_valuation(K.m, fp.p);
        if (!row.core_replaced) row.identity_ok = row.delta + row.v_w == rho - 1;
        if (K.small() && K.D_u64() <= opt.torsion.class_ceiling) {
            FieldRecord r = field_record(K, fp.p, opt.torsion);
            row.h = r.h;
            row.v_cl = r.v_cl;
            row.delta_fundamental = r.delta;
            row.vptor = r.vptor;
            row.c_p = r.c_p;
            if (r.delta > row.delta)
                throw IntegrityError("delta of the fundamental unit exceeds that of a power of it, m=" +
                                     row.m.get_str());
            if (!row.core_replaced && r.delta != row.delta)
                row.flags += row.flags.empty() ? "unit-not-fundamental" : ";unit-not-fundamental";
        } else {
            row.flags += row.flags.empty() ? "delta-only" : ";delta-only";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

bool reciprocal_identity_holds(u64 p, int rho, const BigInt& a, const BigInt& m, const BigInt& b) {
    BigInt P;
    mpz_ui_pow_ui(P.get_mpz_t(), p, static_cast<unsigned long>(2 * rho));
    BigInt d = p == 2 ? 1 : 2;
    return a * (d + P * a) == m * b * b;
}

namespace {

struct RecCandidate {
    BigInt a, m, b;
    bool proven = true;
};

void merge_factors(const Factorization& f, std::map<BigInt, int>& acc, bool& complete) {
    for (auto& pf : f.factors) acc[pf.p] += pf.e;
    complete = complete && f.complete;
}

} // namespace

std::vector<ReciprocalHit> reciprocal_search(const ReciprocalParams& rp, const ScanOptions& opt) {
    if (rp.rho < 1) throw UsageError("rho must be positive");
    if (rp.a_lo < 1 || rp.a_hi < rp.a_lo) throw UsageError("bad a range");
    if (!rp.a_hi.fits_ulong_p()) throw CapacityError("a range exceeds 64 bits");
    const u64 p = rp.p;
    BigInt P;
    mpz_ui_pow_ui(P.get_mpz_t(), p, static_cast<unsigned long>(2 * rp.rho));
    const BigInt d = p == 2 ? 1 : 2;

    auto blocks = map_blocks<RecCandidate>(rp.a_lo.get_ui(), rp.a_hi.get_ui(), 256, opt.workers,
                                           [&](u64 b_lo, u64 b_hi) {
        std::vector<RecCandidate> out;
        BigInt best_D = -1;
        for (u64 ai = b_lo; ai <= b_hi; ++ai) {
            BigInt a = static_cast<unsigned long>(ai);
            BigInt second = d + P * a;
            std::map<BigInt, int> acc;
            bool complete = true;
            merge_factors(factor(a, rp.rho_budget), acc, complete);
            merge_factors(factor(second, rp.rho_budget), acc, complete);
            BigInt m = 1, b = 1;
            for (auto& [q, e] : acc) {
                if (e & 1) m *= q;
                for (int i = 0; i < e / 2; ++i) b *= q;
            }
            if (m == 1) continue;
            BigInt D = mpz_fdiv_ui(m.get_mpz_t(), 4) == 1 ? m : BigInt(4 * m);
            if (best_D < 0 || D < best_D) {
                best_D = D;
                out.push_back({a, m, b, complete});
            }
        }
        return out;
    });

    std::vector<ReciprocalHit> hits;
    BigInt best_D = -1;
    for (auto& blk : blocks) {
        for (auto& c : blk) {
            QuadFieldId K = field_from_core(c.m);
            if (best_D >= 0 && K.D >= best_D) continue;
            best_D = K.D;
            if (!reciprocal_identity_holds(p, rp.rho, c.a, c.m, c.b))
                throw IntegrityError("reciprocal identity fails for a=" + c.a.get_str());
            ReciprocalHit hit;
            hit.a = c.a;
            hit.b = c.b;
            hit.m = c.m;
            hit.D = K.D;
            hit.proven = c.proven;
            // eta = 1 + p^r (p^r a + b sqrt m)
            int r = p == 2 ? rp.rho + 1 : rp.rho;
            BigInt pr;
            mpz_ui_pow_ui(pr.get_mpz_t(), p, static_cast<unsigned long>(r));
            BigInt prA;
            mpz_ui_pow_ui(prA.get_mpz_t(), p, static_cast<unsigned long>(rp.rho));
            BigInt X = 1 + pr * prA * c.a, Y = pr * c.b;
            auto [x, y] = to_omega(K, X, Y, 1);
            if (!(p == 2 && K.m == 2)) {
                DeltaOptions dopt = opt.torsion.delta;
                hit.delta_eta = delta_p(K, p, explicit_unit(x, y, 1), dopt).delta;
                hit.v_w = w_valuation(K.m, p);
                if (K.small() && K.D_u64() <= opt.torsion.class_ceiling) {
                    FieldRecord fr = field_record(K, p, opt.torsion);
                    hit.h = fr.h;
                    hit.v_cl = fr.v_cl;
                    hit.vptor = fr.vptor;
                    hit.vptor_eta = fr.v_cl + hit.delta_eta + hit.v_w;
                    hit.c_p = fr.c_p;
                    if (fr.delta > hit.delta_eta)
                        throw IntegrityError("delta of eta below that of the fundamental unit, a=" + c.a.get_str());
                }
            }
            hits.push_back(std::move(hit));
        }
    }
    return hits;
}

std::vector<HugePHit> huge_p_regulator_scan(u64 p, u64 lo, u64 hi, const ScanOptions& opt) {
    if (p < 5 || !is_prime(p)) throw UsageError("huge-p scan needs a prime p >= 5");
    if (p >= (u64(1) << 31)) throw CapacityError("p^2 must fit in 62 bits");
    const double logp = std::log(static_cast<double>(p));
    auto blocks = map_blocks<HugePHit>(lo, hi, opt.block, opt.workers, [&](u64 b_lo, u64 b_hi) {
        std::vector<HugePHit> out;
        const WordModulus ring(p * p, p);
        for_each_fundamental(b_lo, b_hi, [&](const QuadFieldId& K) {
            const u64 m = K.m_u64();
            const u64 D = K.D_u64();
            bool hit = false, ram = false;
            if (m % p == 0) {
                ram = true;
                PrimePower pp(p, 3);
                UnitRep u = fundamental_unit(K, pp);
                QuadModRing<BigModulus> R(BigModulus(pp), K.m);
                auto A = R.sub_scalar(R.pow(R.make(u.residue.x, u.residue.y), p - 1), 1);
                auto v = R.norm_valuation(A);
                hit = !v || *v >= 3;
            } else {
                int s = kronecker(static_cast<i64>(m % p), p);
                auto cf = cf_unit<false>(m, ring);
                QuadModRing<WordModulus> R(ring, K.m);
                i64 target = s == 1 ? 1 : cf.norm;
                auto A = R.sub_scalar(R.pow(cf.eps, s == 1 ? p - 1 : p + 1), target);
                auto v = R.coeff_valuation(A);
                hit = !v || *v >= 2;
            }
            if (hit) out.push_back({D, m, ram, logp / (0.5 * std::log(static_cast<double>(D)))});
        });
        return out;
    });
    std::vector<HugePHit> hits;
    for (auto& blk : blocks)
        for (auto& h : blk) hits.push_back(h);
    return hits;
}

} // namespace ptor
