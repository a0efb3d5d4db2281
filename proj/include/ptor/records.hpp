#pragma once

#include <string>

#include "ptor/archimedean.hpp"
#include "ptor/cubic.hpp"
#include "ptor/families.hpp"
#include "ptor/sink.hpp"

namespace ptor {

ScanRecord to_record(const DeltaMaxRow& r, u64 p, Branch branch);
ScanRecord to_record(const VptorRow& r);
ScanRecord to_record(const FieldRecord& r);
ScanRecord to_record(const FamilyRow& r, u64 p);
ScanRecord to_record(const ReciprocalHit& r, u64 p);
ScanRecord to_record(const HugePHit& r, u64 p);
ScanRecord to_record(const ArchRecord& r);
ScanRecord to_record(const CubicFieldSpec& s);

// Truncation (not rounding) to 4 decimals, the way the published tables
// print C_p and the gap.
std::string trunc4(double x);

} // namespace ptor
