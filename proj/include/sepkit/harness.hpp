#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sepkit/checker.hpp"
#include "sepkit/domain.hpp"

namespace sepkit {

struct HarnessConfig {
    int num_values = 3;
    std::vector<Value> locations{1, 2};
    std::vector<std::string> program_vars{"x", "y"};
    std::optional<LogicId> logic; // restrict the proof-system suites
    std::optional<Model> model;   // restrict to one memory model
    std::uint64_t seed = 1;
    int random_derivations = 200;
    std::string fixtures_dir = "fixtures";
    // Name of a deliberately broken variant (see mutation_names()); empty
    // for the faithful implementation.
    std::string mutation;
    // Failing cases kept verbatim in a report; the rest are only counted.
    std::size_t retained_failures = 20;
    // End a suite at its first failure (enough for a mutation control).
    bool stop_at_first_failure = false;
    // Failing case ids of the faithful run. A mutated run counts these as
    // baseline rather than as failures, so only new failures show the
    // mutation was detected.
    std::set<std::string> baseline_failures;
};

struct CaseFailure {
    std::string id;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    std::string mutation; // empty for faithful runs
    std::size_t cases = 0;
    std::size_t skipped = 0; // cases whose precondition did not hold
    std::size_t failures = 0;
    double seconds = 0;
    std::vector<CaseFailure> failed; // the first retained_failures, in case order
    std::vector<std::string> notes;
    std::size_t retained = 20; // capacity of `failed`
    bool stop_at_first = false;
    bool stopped = false; // ended early at its first failure
    std::set<std::string> baseline_ids; // from HarnessConfig::baseline_failures
    std::size_t baseline = 0;           // failures already present in the faithful run
    std::vector<std::string> failing_ids; // every failing case id, in order

    // Faithful runs must not fail; mutated runs must.
    bool as_expected() const { return mutation.empty() ? failures == 0 : failures > 0; }
};

std::vector<std::string> suite_names();
// Throws ConfigError for an unknown suite name.
SuiteReport run_suite(const std::string& name, const HarnessConfig& cfg);

SuiteReport suite_axiom_soundness(const HarnessConfig& cfg);
SuiteReport suite_preservation(const HarnessConfig& cfg);
SuiteReport suite_compat_equiv(const HarnessConfig& cfg);
SuiteReport suite_normalization(const HarnessConfig& cfg);
SuiteReport suite_expressiveness(const HarnessConfig& cfg);
SuiteReport suite_metamorphic(const HarnessConfig& cfg);
SuiteReport suite_backward_adjunction(const HarnessConfig& cfg);

struct MutationControl {
    std::string name;
    std::string suite; // the suite expected to detect it
    std::string description;
    bool reduced_domain = false; // runs at values {0,1} and one location
};

std::vector<MutationControl> mutation_controls();
// The configuration a control (and its faithful baseline) runs at.
HarnessConfig control_config(const MutationControl& m, const HarnessConfig& cfg);
// Runs a mutation control, stopping at its first new failure. `faithful` is
// the unmutated report of the same suite, or null to run it here.
SuiteReport run_mutation_control(const MutationControl& m, const HarnessConfig& cfg,
                                 const SuiteReport* faithful);
std::vector<std::string> mutation_names();
// Throws ConfigError for an unknown name.
Mutations proof_mutations(const std::string& name);

// Random derivations accepted by the checker, for the metamorphic suite and
// for exporting examples.
std::vector<Derivation> random_accepted_derivations(const HarnessConfig& cfg, int count);

// `suite=... case=... status=...` lines: one per failing case (up to the
// retained ones) and a summary line per suite.
std::string report_lines(const SuiteReport& r);
// Machine-readable summary of several suite runs.
std::string report_json(const std::vector<SuiteReport>& rs, const HarnessConfig& cfg);

} // namespace sepkit
