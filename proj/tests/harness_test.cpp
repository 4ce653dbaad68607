#include <doctest.h>

#include "sepkit/harness.hpp"

using namespace sepkit;

namespace {

HarnessConfig small() {
    HarnessConfig cfg;
    cfg.num_values = 2;
    cfg.locations = {1};
    cfg.fixtures_dir = SEPKIT_FIXTURES_DIR;
    return cfg;
}

} // namespace

TEST_CASE("suite and mutation names") {
    CHECK(suite_names().size() == 7);
    CHECK_THROWS_AS(run_suite("nonsense", small()), ConfigError);
    CHECK_THROWS_AS(proof_mutations("nonsense"), ConfigError);
    CHECK(mutation_controls().size() >= 5);
    for (const auto& m : mutation_controls()) {
        const auto names = suite_names();
        CHECK(std::find(names.begin(), names.end(), m.suite) != names.end());
    }
}

TEST_CASE("report lines are stable and carry no timing") {
    SuiteReport r;
    r.suite = "demo";
    r.cases = 3;
    r.failures = 2;
    r.retained = 1;
    r.failed = {{"a", "broken"}};
    r.seconds = 1.5;
    CHECK(report_lines(r) == "suite=demo case=a status=fail detail=broken\n"
                             "suite=demo case=... status=fail detail=1 further failures omitted\n"
                             "suite=demo case=* status=fail cases=3 skipped=0 failures=2 expected=no\n");
    r.mutation = "m";
    CHECK(report_lines(r).find("baseline=0 expected=yes") != std::string::npos);
}

TEST_CASE("fast suites at a reduced configuration") {
    const HarnessConfig cfg = small();
    for (const char* name : {"compat-equiv", "expressiveness"}) {
        const SuiteReport r = run_suite(name, cfg);
        CHECK_MESSAGE(r.failures == 0, name);
        CHECK(r.cases > 0);
    }
}

TEST_CASE("the metamorphic suite is deterministic in its seed") {
    HarnessConfig cfg = small();
    cfg.random_derivations = 16;
    const SuiteReport a = run_suite("metamorphic", cfg);
    const SuiteReport b = run_suite("metamorphic", cfg);
    CHECK(a.cases == 16);
    CHECK(report_lines(a) == report_lines(b));
    CHECK(a.notes == b.notes);
}

TEST_CASE("mutation controls count only failures new to the mutated run") {
    HarnessConfig cfg = small();
    for (const auto& m : mutation_controls()) {
        if (m.suite != "axiom-soundness" && m.suite != "expressiveness") {
            continue;
        }
        const SuiteReport faithful = run_suite(m.suite, control_config(m, cfg));
        const SuiteReport r = run_mutation_control(m, cfg, &faithful);
        CHECK_MESSAGE(r.failures == 1, m.name);
        CHECK(r.stopped);
        for (const auto& id : r.failing_ids) {
            CHECK(std::find(faithful.failing_ids.begin(), faithful.failing_ids.end(), id) ==
                  faithful.failing_ids.end());
        }
    }
}
