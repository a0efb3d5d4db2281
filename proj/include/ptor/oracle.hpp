#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptor/cubic.hpp"
#include "ptor/torsion.hpp"

namespace ptor {

// A number field handed to the external CAS: a monic defining polynomial
// (coefficients from the leading 1 down) and a stable key.
struct FieldSpec {
    enum class Kind { quadratic, biquadratic, cubic, washington };
    Kind kind = Kind::quadratic;
    std::string key;
    std::vector<BigInt> poly;
    std::vector<BigInt> subfields;   // biquadratic: the three squarefree m

    static FieldSpec quadratic(const BigInt& m);
    // Q(sqrt m1, sqrt m2); m1, m2 squarefree, distinct, m1 m2 not a square.
    static FieldSpec biquadratic(const BigInt& m1, const BigInt& m2);
    static FieldSpec cubic(const CubicFieldSpec& s);
    static FieldSpec washington(const BigInt& N);

    // Inverse of `key`; cubic keys are re-enumerated.
    static FieldSpec from_key(const std::string& key);

    std::string poly_string() const;
};

struct OracleResult {
    std::string key;
    u64 p = 0;
    int vptor = 0;
    std::vector<BigInt> structure;   // p-parts of the ray class group, cyclotomic factor first
    int n = 0;                       // ray modulus exponent used
    std::optional<BigInt> disc;      // field discriminant, when reported
    std::optional<std::string> poly; // defining polynomial, when recorded
    std::string provenance;
};

// Throws IntegrityError unless the structure, minus its first entry, has
// p-valuation sum vptor. Empty structure passes.
void check_structure(const OracleResult& r);

// Largest p-valuation among the non-cyclotomic entries (0 if none).
int torsion_exponent(const std::vector<BigInt>& structure, u64 p);

// GP script computing v_p(#T_K) with modulus p^n. Deterministic.
std::string gp_script(const FieldSpec& f, u64 p, int n);

enum class OracleMode { off, live, fixtures };

struct OracleConfig {
    OracleMode mode = OracleMode::off;
    std::string executable;           // live; defaults to $PTOR_GP
    std::string fixtures;             // fixtures: JSONL file
    int margin = 2;
    int max_n = 512;
    unsigned concurrency = 2;
};

inline constexpr const char* kOracleEnv = "PTOR_GP";

// Fixture records, keyed by (key, p).
std::map<std::pair<std::string, u64>, OracleResult> load_fixtures(const std::string& path);
OracleResult oracle_result_from_json(const std::string& line);
std::string oracle_result_to_json(const OracleResult& r);

class OracleClient {
public:
    explicit OracleClient(OracleConfig cfg);
    ~OracleClient();
    OracleClient(const OracleClient&) = delete;
    OracleClient& operator=(const OracleClient&) = delete;

    // Throws OracleUnavailable for a missing executable, an unparsable
    // reply, a missing fixture or an exhausted n escalation.
    OracleResult query(const FieldSpec& f, u64 p, int n_hint = 0);

    const OracleConfig& config() const { return cfg_; }
    // Fixture keys in file order (fixtures mode).
    const std::vector<std::pair<std::string, u64>>& fixture_keys() const { return order_; }

private:
    OracleResult run_live(const FieldSpec& f, u64 p, int n);

    struct Gate;
    OracleConfig cfg_;
    std::map<std::pair<std::string, u64>, OracleResult> fixtures_;
    std::vector<std::pair<std::string, u64>> order_;
    std::unique_ptr<Gate> gate_;
};

struct Disagreement {
    std::string key;
    u64 p = 0;
    std::optional<int> native;
    int oracle = 0;
    std::string reason;
};

struct VerifyReport {
    u64 checked = 0;          // samples with a native value compared
    u64 oracle_only = 0;      // samples with structural checks only
    std::vector<Disagreement> disagreements;
    std::vector<std::string> unavailable;
    std::vector<std::string> notes;
};

struct VerifySample {
    FieldSpec field;
    u64 p = 0;
};

// Native decomposition vs oracle for each sample:
//  quadratic: vptor from field_record;
//  biquadratic, p odd: sum over the three quadratic subfields;
//  cubic and Washington fields: no native value; the oracle result must have
//  even valuation for p = 2 mod 3 and a recorded polynomial must match.
VerifyReport oracle_verify(OracleClient& oracle, const std::vector<VerifySample>& samples,
                           const TorsionOptions& opt = {});

// Every fixture entry as a sample.
std::vector<VerifySample> fixture_samples(const OracleClient& oracle);

} // namespace ptor
