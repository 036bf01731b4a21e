#pragma once

#include "lipnorm/rng.hpp"
#include "lipnorm/seq.hpp"

namespace lipnorm {

enum class CheckStatus { pass, fail, soft_warn };

inline const char* check_status_str(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::soft_warn: return "soft-warn";
    }
    return "?";
}

struct CheckRecord {
    std::string check;    // stable check id
    std::string instance; // replayable witness: spaces and parameters (full on fail)
    uint64_t seed = 0;
    CheckStatus status = CheckStatus::pass;
    std::string detail; // the numbers that were compared
};

struct AuditReport {
    std::vector<CheckRecord> records;

    size_t passes() const;
    size_t fails() const;
    size_t soft_warns() const;
    bool ok() const { return fails() == 0; } // soft warnings do not fail a run

    void add(std::string check, std::string instance, uint64_t seed, CheckStatus status,
             std::string detail);
    void merge(AuditReport other);
    std::string to_text() const; // one line per record plus a summary line
};

// Random instance distribution shared by all checks: 3-4 point spaces with
// distances from {1/2, 1, 3/2, 2} resampled until the triangle inequality
// holds; base-preserving maps; sequences of at most max_len entries.
SpacePtr random_space(Rng& rng, size_t min_points = 3, size_t max_points = 4);
PointMap random_map(Rng& rng, const SpacePtr& domain, const SpacePtr& codomain);
WeightedPairSequence random_sequence(Rng& rng, const SpacePtr& space, size_t max_len = 4);

// Proposition 3.3 equality of the measure supremum and factorization infimum:
// sup <= inf hard, and the bracket closes to 1e-6.
AuditReport check_prop33(size_t trials, uint64_t seed);

// Composition theorems: the exact ideal inequalities, the two mixed
// composition bounds, and the counterexample showing the naive composition
// formula pi_p(T.S) <= pi_r(T) pi_s(S) is false. starts sizes the witness
// searches (hard checks only loosen when it shrinks, they never flip).
AuditReport check_compositions(size_t trials, uint64_t seed, size_t starts = 32);

// Inclusion and monotonicity results: pi_p monotone in p (exact), sequence
// norms monotone in s and antitone in q, the (p,m(s;s)) inclusion scale, and
// the mixing-kind inclusion proposition. Lower-only right sides are demoted
// to soft checks.
AuditReport check_inclusions(size_t trials, uint64_t seed, size_t starts = 32);

// Interpolation-style bounds: the m(s;p) interpolation upper bound, its
// theta-interpolated generalization, the discrete-space closed forms, and the
// two-sided ((s;p),r)-space equivalence chain.
AuditReport check_interpolation(size_t trials, uint64_t seed, size_t starts = 32);

// Exact rational reproduction of the three-point composition counterexample.
AuditReport check_counterexample();

// Stable-law machinery: the p-th moment identity of s-stable sums and the
// witness-level inequality chain behind the type bound, within 3 standard
// errors.
AuditReport check_stable(size_t trials, uint64_t seed, size_t mc_samples = 100000);

// Chevet-Saphar norms: single-atom duality, the beta-triangle inequality of
// the upper values, the lower <= upper sandwich, and the S_G ratio bound.
AuditReport check_molecules(size_t trials, uint64_t seed, size_t starts = 32);

// Every check above, trial counts set by scale ("smoke" or "desk");
// deterministic given the seed.
AuditReport run_all(uint64_t seed, const std::string& scale);

} // namespace lipnorm
