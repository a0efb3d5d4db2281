#pragma once

#include <vector>

#include "ptor/families.hpp"

namespace ptor {

struct ArchRecord {
    u64 D = 0;
    u64 m = 0;
    u64 h = 0;
    double regulator = 0.0;
    double t_inf = 0.0;     // h R / sqrt D
    double bs = 0.0;        // log(h R) / log sqrt D
    double bs_tilde = 0.0;  // bs - 1
};

// Throws IntegrityError when h <= sqrt(D)/2 or hR/sqrt(D) <= log(sqrt D)/2 fails.
ArchRecord arch_record(const QuadFieldId& K, u64 class_ceiling = kDefaultClassCeiling);
ArchRecord arch_record(const QuadFieldId& K, const ClassNumber& cn);

// Compensated (Neumaier) summation.
class NeumaierSum {
public:
    void add(double x);
    void merge(const NeumaierSum& o);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// A place: p = 0 is the infinite place with C = bs_tilde; a prime p gives C_p.
struct Place {
    u64 p = 0;
    bool infinite() const { return p == 0; }
};

struct PlaceMean {
    Place place;
    u64 count = 0;
    double mean = 0.0;
    u64 zeros = 0;     // p-rational fields (finite places)
};

struct ArchScan {
    u64 lo = 0, hi = 0;
    u64 fields = 0;
    double bs_min = 0.0, bs_max = 0.0;
    u64 D_min = 0, D_max = 0;   // where the extremes occur
    std::vector<PlaceMean> means;
};

// One pass over the fundamental discriminants in [lo, hi]: BS extremes and
// the mean of C_v for every requested place. p = 2 leaves out Q(sqrt 2).
ArchScan arch_scan(u64 lo, u64 hi, const std::vector<Place>& places, const ScanOptions& opt = {});

} // namespace ptor
