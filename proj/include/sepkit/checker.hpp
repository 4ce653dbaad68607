#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sepkit/domain.hpp"
#include "sepkit/syntax.hpp"
#include "sepkit/triples.hpp"

namespace sepkit {

// The four proof systems: forward over-approximation (SL+), forward
// under-approximation with ok/er outcomes (ISL+), backward
// under-approximation (SIL+) and backward over-approximation (NC+).
enum class LogicId { SlPlus, IslPlus, SilPlus, NcPlus };

struct Logic {
    LogicId id = LogicId::SlPlus;
    Model model = Model::One;
};

std::string to_string(LogicId id);
std::string to_string(const Logic& l); // e.g. "isl+2"
// Accepts "sl+", "isl+", "sil+", "nc+", optionally followed by 1 or 2.
// Throws ParseError.
LogicId parse_logic_id(const std::string& text);
Logic parse_logic(const std::string& text, Model default_model);
TripleKind kind_of(LogicId id);
// ISL+ tracks ⊠ cells; the other systems do not need them.
bool default_reserved(LogicId id);

// ---------------------------------------------------------------------------
// Logical triples

struct LogicalTriple {
    AstPtr pre;
    CmdPtr cmd;
    AstPtr post;
    Outcome outcome = Outcome::Ok;
};

// "{P} c {Q}", with an optional "[ok]", "[er]" or "[either]" before the
// postcondition.  Throws ParseError.
LogicalTriple parse_triple(const std::string& text);
std::string to_string(const LogicalTriple& t);
bool equal(const LogicalTriple& a, const LogicalTriple& b);

// ---------------------------------------------------------------------------
// Axioms

// Deliberately broken variants of the proof systems; each must be caught by
// the test suites.
struct Mutations {
    bool free_keeps_cell = false;   // Free axioms leave the cell in the post
    bool load_forgets_value = false; // Load axioms drop x = z′ from the post
    bool assign_unsubstituted = false; // SL+/ISL+ Assign posts use e instead of e[x′/x]
    bool frame_skips_compat = false; // Frame ignores its compatibility side condition
    bool cons_flipped = false;      // Cons checks the postcondition in the wrong direction

    bool any() const {
        return free_keeps_cell || load_forgets_value || assign_unsubstituted || frame_skips_compat ||
               cons_flipped;
    }
};

// Values for the metavariables of an axiom schema.  x and y are program
// variables, z is any expression over logical variables and constants, l is
// a logical variable.
struct AxiomInstance {
    std::string x = "x";
    std::string y = "y";
    ExprPtr e;
    BoolPtr b;
    ExprPtr z;
    std::string l = "l'";
};

struct AxiomSchema {
    std::string name;
    LogicId logic;
    std::optional<Model> model; // nullopt: available in both models
    bool needs_reserved = false;
    Command::Kind command;
    Outcome outcome = Outcome::Ok;
    // Builds the instance; `program_vars` is the configured list used for
    // the emp_X macro.
    std::function<LogicalTriple(const AxiomInstance&, const std::vector<std::string>&)> build;
};

std::vector<AxiomSchema> axiom_table(LogicId logic, const Mutations& m = {});
// Schemas usable under the given model / reserved-cell setting.
std::vector<AxiomSchema> available_axioms(LogicId logic, Model model, bool reserved,
                                          const Mutations& m = {});

// The guard as an assertion with an unconstrained heap.
AstPtr bool_to_assertion(const BoolPtr& b);

// ---------------------------------------------------------------------------
// Derivations

struct Derivation {
    std::string rule;
    std::optional<Logic> logic; // inherited from the parent when absent
    LogicalTriple conclusion;
    AstPtr frame;                    // Frame
    std::vector<std::string> exists; // Exists
    std::map<std::string, std::string> subst; // axiom metavariables: "z'" and "l'"
    std::vector<Derivation> premises;
};

// Rule names understood by the checker (structural rules and axioms).
std::vector<std::string> structural_rules(LogicId logic);

// Denotations of assertions keyed by their printed form; only valid for
// one universe.
using AssertionCache = std::map<std::string, MemorySet>;

struct CheckOptions {
    // Values, locations, program variables and default model.  Logical
    // variables are collected from the derivation.
    DomainConfig base = DomainConfig{};
    std::optional<bool> reserved; // default_reserved(logic) when absent
    Mutations mutations;
    // When set, derivations are checked in this universe (which must know
    // every variable they mention) and denotations are memoised in `cache`
    // across calls.
    UniversePtr universe;
    std::shared_ptr<AssertionCache> cache;
};

struct Verdict {
    bool accepted = false;
    std::vector<std::string> path; // rule names from the root to the offending node
    std::string reason;
};

Verdict check_derivation(const Derivation& d, const CheckOptions& opts = {});

// The universe a derivation is checked in.
UniversePtr derivation_universe(const Derivation& d, const CheckOptions& opts);

// Textual format (see docs/derivation_format.md).  Throws ParseError.
std::vector<Derivation> parse_derivations(const std::string& text);
std::string to_sexpr(const Derivation& d, int indent = 0);

} // namespace sepkit
