#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sepkit/assertion_semantics.hpp"
#include "sepkit/checker.hpp"
#include "sepkit/harness.hpp"
#include "sepkit/program_semantics.hpp"

using namespace sepkit;

namespace {

struct DomainFlags {
    int values = 3;
    std::vector<Value> locations{1, 2};
    std::vector<std::string> program_vars{"x", "y"};
    int model = 1;
};

void add_domain_flags(CLI::App* app, DomainFlags& f) {
    app->add_option("--values", f.values, "number of integer values {0..n-1}")->check(CLI::Range(1, 8));
    app->add_option("--locations", f.locations, "values usable as heap locations")->delimiter(',');
    app->add_option("--vars", f.program_vars, "program variables")->delimiter(',');
    app->add_option("--model", f.model, "memory model: 1 (no deallocation marks) or 2")->check(CLI::IsMember({1, 2}));
}

Model model_of(int m) { return m == 2 ? Model::Two : Model::One; }

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int cmd_check(const DomainFlags& f, const std::string& logic_text, const std::string& path) {
    std::vector<Derivation> ds;
    std::optional<Logic> forced;
    try {
        ds = parse_derivations(read_file(path));
        if (!logic_text.empty()) {
            forced = parse_logic(logic_text, model_of(f.model));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    CheckOptions opts;
    opts.base.num_values = f.values;
    opts.base.locations = f.locations;
    opts.base.program_vars = f.program_vars;
    opts.base.model = model_of(f.model);
    bool all = true;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        Derivation& d = ds[i];
        if (forced) {
            if (d.logic && (d.logic->id != forced->id || d.logic->model != forced->model)) {
                std::cerr << "error: derivation " << i + 1 << " is written in " << to_string(*d.logic)
                          << ", not " << to_string(*forced) << "\n";
                return 2;
            }
            d.logic = forced;
        }
        if (!d.logic) {
            std::cerr << "error: derivation " << i + 1 << " names no logic; pass --logic\n";
            return 2;
        }
        const Verdict v = check_derivation(d, opts);
        std::cout << "derivation " << i + 1 << " (" << to_string(*d.logic) << "): "
                  << (v.accepted ? "accepted" : "rejected") << "\n";
        std::cout << "  conclusion: " << to_string(d.conclusion) << "\n";
        if (!v.accepted) {
            std::string path_text;
            for (const auto& r : v.path) {
                path_text += (path_text.empty() ? "" : " > ") + r;
            }
            std::cout << "  at: " << path_text << "\n  reason: " << v.reason << "\n";
            all = false;
        }
    }
    return all ? 0 : 1;
}

int cmd_oracle(HarnessConfig cfg, const std::string& suite, const std::string& logic_text,
               const std::string& report_path) {
    if (!logic_text.empty()) {
        const std::string t = logic_text;
        const char last = t.back();
        if (last == '1' || last == '2') {
            const Logic l = parse_logic(t, Model::One);
            cfg.logic = l.id;
            cfg.model = l.model;
        } else {
            cfg.logic = parse_logic_id(t);
        }
    }
    std::vector<std::string> names;
    if (suite == "all") {
        names = suite_names();
    } else if (suite == "mutations") {
        // Every mutation control against the suite expected to detect it;
        // the faithful run of each suite is the baseline.
        // The metamorphic suite draws different derivations under a mutation,
        // so it separates known defects by axiom instead of by case id.
        std::map<std::pair<std::string, bool>, SuiteReport> faithful;
        const SuiteReport no_baseline;
        std::vector<SuiteReport> rs;
        bool ok = true;
        for (const auto& m : mutation_controls()) {
            const std::pair<std::string, bool> key{m.suite, m.reduced_domain};
            if (!faithful.count(key) && m.suite != "metamorphic") {
                faithful[key] = run_suite(m.suite, control_config(m, cfg));
            }
            const auto it = faithful.find(key);
            SuiteReport r = run_mutation_control(m, cfg, it == faithful.end() ? &no_baseline : &it->second);
            std::cout << report_lines(r);
            std::cerr << "time suite=" << r.suite << " mutation=" << m.name << " seconds=" << r.seconds << "\n";
            ok = ok && r.as_expected();
            rs.push_back(std::move(r));
        }
        if (!report_path.empty()) {
            std::ofstream(report_path) << report_json(rs, cfg) << "\n";
        }
        return ok ? 0 : 1;
    } else {
        names = {suite};
    }
    if (!cfg.mutation.empty()) {
        proof_mutations(cfg.mutation); // validates the name
    }
    std::vector<SuiteReport> rs;
    bool ok = true;
    for (const auto& n : names) {
        SuiteReport r = run_suite(n, cfg);
        std::cout << report_lines(r);
        for (const auto& note : r.notes) {
            std::cout << "suite=" << r.suite << " note=" << note << "\n";
        }
        std::cerr << "time suite=" << r.suite << " seconds=" << r.seconds << "\n";
        ok = ok && r.as_expected();
        rs.push_back(std::move(r));
    }
    if (!report_path.empty()) {
        std::ofstream(report_path) << report_json(rs, cfg) << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_eval(const DomainFlags& f, const std::vector<std::string>& logical, const std::string& assertion,
             const std::string& run, const std::string& from, const std::string& backward, const std::string& to,
             bool dnf) {
    const int modes = !assertion.empty() + !run.empty() + !backward.empty();
    if (modes != 1) {
        std::cerr << "error: give exactly one of --assert, --run or --backward\n";
        return 2;
    }
    AstPtr a;
    CmdPtr c;
    try {
        if (!assertion.empty()) {
            a = parse_assertion(assertion);
        } else if (!run.empty()) {
            c = parse_command(run);
            a = parse_assertion(from.empty() ? "true" : from);
        } else {
            c = parse_command(backward);
            a = parse_assertion(to.empty() ? "true" : to);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<std::string> extra = logical;
    for (const auto& v : free_vars(*a)) {
        if (DomainConfig::is_logical_name(v) && std::find(extra.begin(), extra.end(), v) == extra.end()) {
            extra.push_back(v);
        }
    }
    const Model model = model_of(f.model);
    const UniversePtr u =
        make_universe(make_config(f.values, f.locations, f.program_vars, extra, model, mentions(*a, Assertion::Kind::Reserved)));
    MemorySet s = eval_assertion(*a, u);
    if (!run.empty()) {
        s = run_forward(*c, s);
    } else if (!backward.empty()) {
        s = run_backward(*c, s);
    }
    if (dnf) {
        if (c) {
            std::cerr << "error: --dnf applies to --assert only\n";
            return 2;
        }
        std::cout << to_string(to_dnf(*a, u)) << "\n";
        return 0;
    }
    std::size_t n = 0;
    s.for_each([&](std::uint64_t st, std::uint32_t h) {
        std::cout << memory_to_string(*u, Memory{u->decode_store(st), u->decode_heap(h)}) << "\n";
        ++n;
    });
    if (s.includes_abort()) {
        std::cout << "abort\n";
    }
    std::cout << "(" << n << " memories)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checker and brute-force oracles for separation-style program logics"};
    app.require_subcommand(1);

    DomainFlags check_flags;
    std::string check_logic;
    std::string check_path;
    CLI::App* check = app.add_subcommand("check", "check derivation trees from a file");
    add_domain_flags(check, check_flags);
    check->add_option("--logic", check_logic, "proof system, e.g. sl+1, isl+2");
    check->add_option("file", check_path, "derivation file")->required();

    HarnessConfig hc;
    DomainFlags oracle_flags;
    std::string suite = "all";
    std::string oracle_logic;
    std::string report_path;
    std::uint64_t seed = 1;
    CLI::App* oracle = app.add_subcommand("oracle", "run brute-force verification suites");
    oracle->add_option("--values", oracle_flags.values, "number of integer values")->check(CLI::Range(1, 8));
    oracle->add_option("--locations", oracle_flags.locations, "heap locations")->delimiter(',');
    oracle->add_option("--vars", oracle_flags.program_vars, "program variables")->delimiter(',');
    oracle->add_option("--suite", suite, "suite name, 'all' or 'mutations'");
    oracle->add_option("--logic", oracle_logic, "restrict to one proof system, e.g. nc+ or nc+2");
    oracle->add_option("--mutate", hc.mutation, "run a deliberately broken variant");
    oracle->add_option("--seed", seed, "random seed (SEPKIT_SEED overrides)");
    oracle->add_option("--derivations", hc.random_derivations, "random derivations for the metamorphic suite");
    oracle->add_option("--fixtures", hc.fixtures_dir, "directory holding the fixture derivations");
    oracle->add_option("--report", report_path, "write a JSON summary here");
    oracle->add_option("--max-failures", hc.retained_failures, "failing cases listed per suite");

    DomainFlags eval_flags;
    std::vector<std::string> eval_logical;
    std::string eval_assert;
    std::string eval_run;
    std::string eval_from;
    std::string eval_backward;
    std::string eval_to;
    bool eval_dnf = false;
    CLI::App* eval = app.add_subcommand("eval", "evaluate an assertion or run a command over one");
    add_domain_flags(eval, eval_flags);
    eval->add_option("--logical", eval_logical, "extra logical variables")->delimiter(',');
    eval->add_option("--assert", eval_assert, "assertion to evaluate");
    eval->add_option("--run", eval_run, "command to run forward");
    eval->add_option("--from", eval_from, "precondition for --run (default true)");
    eval->add_option("--backward", eval_backward, "command to run backward");
    eval->add_option("--to", eval_to, "postcondition for --backward (default true)");
    eval->add_flag("--dnf", eval_dnf, "with --assert: print the disjunctive normal form instead of listing memories");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) {
            return cmd_check(check_flags, check_logic, check_path);
        }
        if (oracle->parsed()) {
            if (const char* env = std::getenv("SEPKIT_SEED")) {
                seed = std::stoull(env);
            }
            hc.seed = seed;
            hc.num_values = oracle_flags.values;
            hc.locations = oracle_flags.locations;
            hc.program_vars = oracle_flags.program_vars;
            return cmd_oracle(hc, suite, oracle_logic, report_path);
        }
        return cmd_eval(eval_flags, eval_logical, eval_assert, eval_run, eval_from, eval_backward, eval_to,
                        eval_dnf);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument&) {
        std::cerr << "error: SEPKIT_SEED must be a number\n";
        return 2;
    }
}
