#include "ptor/archimedean.hpp"

#include <cmath>
#include <limits>

#include "ptor/parallel.hpp"

namespace ptor {

ArchRecord arch_record(const QuadFieldId& K, const ClassNumber& cn) {
    if (!K.small()) throw CapacityError("field too large: m=" + K.m.get_str());
    ArchRecord r;
    r.D = K.D_u64();
    r.m = K.m_u64();
    r.h = cn.h;
    r.regulator = regulator(K);
    if (!bound_check_h(r.D, r.h)) throw IntegrityError("h > sqrt(D)/2 for D=" + std::to_string(r.D));
    if (!bound_check_hr(r.D, r.h, r.regulator))
        throw IntegrityError("h R / sqrt(D) > log(sqrt D)/2 for D=" + std::to_string(r.D));
    const double logsqrt = 0.5 * std::log(static_cast<double>(r.D));
    const double loghr = std::log(static_cast<double>(r.h)) + std::log(r.regulator);
    r.t_inf = std::exp(loghr - logsqrt);
    r.bs = loghr / logsqrt;
    r.bs_tilde = (loghr - logsqrt) / logsqrt;
    return r;
}

ArchRecord arch_record(const QuadFieldId& K, u64 class_ceiling) {
    if (!K.small()) throw CapacityError("field too large: m=" + K.m.get_str());
    return arch_record(K, class_number(K.D_u64(), class_ceiling));
}

void NeumaierSum::add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

void NeumaierSum::merge(const NeumaierSum& o) {
    add(o.sum_);
    add(o.comp_);
}

namespace {

struct Acc {
    u64 fields = 0;
    double bs_min = std::numeric_limits<double>::infinity();
    double bs_max = -std::numeric_limits<double>::infinity();
    u64 D_min = 0, D_max = 0;
    std::vector<NeumaierSum> sums;
    std::vector<u64> counts, zeros;

    explicit Acc(size_t n) : sums(n), counts(n, 0), zeros(n, 0) {}

    void extremes(double bs, u64 D) {
        // Ties keep the smaller D, as an ascending scan would.
        if (bs < bs_min) {
            bs_min = bs;
            D_min = D;
        }
        if (bs > bs_max) {
            bs_max = bs;
            D_max = D;
        }
    }
};

} // namespace

ArchScan arch_scan(u64 lo, u64 hi, const std::vector<Place>& places, const ScanOptions& opt) {
    for (const auto& pl : places)
        if (!pl.infinite() && !is_prime(pl.p)) throw UsageError("not a prime: " + std::to_string(pl.p));
    const size_t np = places.size();
    auto blocks = map_blocks<Acc>(lo, hi, opt.block, opt.workers, [&](u64 b_lo, u64 b_hi) {
        Acc acc(np);
        for_each_fundamental(b_lo, b_hi, [&](const QuadFieldId& K) {
            const u64 D = K.D_u64();
            ClassNumber cn = class_number(D, opt.torsion.class_ceiling);
            ArchRecord ar = arch_record(K, cn);
            ++acc.fields;
            acc.extremes(ar.bs, D);
            for (size_t i = 0; i < np; ++i) {
                const u64 p = places[i].p;
                double c;
                if (p == 0) {
                    c = ar.bs_tilde;
                } else {
                    if (p == 2 && K.m == 2) continue;
                    c = field_record(K, p, opt.torsion, &cn).c_p;
                    if (c == 0.0) ++acc.zeros[i];
                }
                acc.sums[i].add(c);
                ++acc.counts[i];
            }
        });
        return std::vector<Acc>{std::move(acc)};
    });
    Acc total(np);
    for (auto& blk : blocks)
        for (auto& a : blk) {
            total.fields += a.fields;
            if (a.fields == 0) continue;
            if (a.bs_min < total.bs_min) {
                total.bs_min = a.bs_min;
                total.D_min = a.D_min;
            }
            if (a.bs_max > total.bs_max) {
                total.bs_max = a.bs_max;
                total.D_max = a.D_max;
            }
            for (size_t i = 0; i < np; ++i) {
                total.sums[i].merge(a.sums[i]);
                total.counts[i] += a.counts[i];
                total.zeros[i] += a.zeros[i];
            }
        }
    ArchScan out;
    out.lo = lo;
    out.hi = hi;
    out.fields = total.fields;
    out.bs_min = total.bs_min;
    out.bs_max = total.bs_max;
    out.D_min = total.D_min;
    out.D_max = total.D_max;
    for (size_t i = 0; i < np; ++i) {
        PlaceMean pm;
        pm.place = places[i];
        pm.count = total.counts[i];
        pm.zeros = total.zeros[i];
        pm.mean = pm.count ? total.sums[i].value() / static_cast<double>(pm.count) : 0.0;
        out.means.push_back(pm);
    }
    return out;
}

} // namespace ptor
