#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepkit/assertion_semantics.hpp"
#include "sepkit/domain.hpp"
#include "sepkit/program_semantics.hpp"
#include "sepkit/syntax.hpp"

namespace sepkit {

enum class Direction { Forward, Backward };
enum class Sense { Over, Under };

struct TripleKind {
    Direction direction = Direction::Forward;
    Sense sense = Sense::Over;
    bool error_handling = false; // ok/er tagged posts (forward only)

    bool operator==(const TripleKind& o) const = default;
};

// Which outcome an error-handling triple speaks about; `Either` requires the
// postcondition to hold for both.
enum class Outcome { Ok, Er, Either };

std::string to_string(TripleKind k);
std::string to_string(Outcome o);

struct SemTriple {
    TripleKind kind;
    CmdPtr cmd;
    MemorySet pre;
    MemorySet post;
    Outcome outcome = Outcome::Ok;
};

// forward-over: ⟦c⟧P ⊆ Q with no abort; forward-under: Q ⊆ ⟦c⟧P (at the
// tagged outcome when error handling is on); backward-over: ⟦←c⟧Q ⊆ P;
// backward-under: P ⊆ ⟦←c⟧Q.
bool is_valid(const SemTriple& t);

// (∃X.P, c, ∃X.Q).  Throws ConfigError when X mentions a program variable.
SemTriple apply_exists(const SemTriple& t, const std::vector<std::string>& xs);

// (P•R, c, Q•R), or nullopt when the compatibility side condition fails
// (P ⋉ R for forward kinds, Q ⋉ R for backward kinds).  Throws
// NotUniversalFrame when R is not closed under program-variable updates.
std::optional<SemTriple> apply_frame(const SemTriple& t, const MemorySet& r);

// Replaces pre/post when the consequence closure of the kind allows it;
// `cons2` additionally permits the auxiliary rule on the other component.
std::optional<SemTriple> apply_cons(const SemTriple& t, const MemorySet& new_pre,
                                    const MemorySet& new_post, bool cons2 = false);

// Pointwise union.  Throws KindMismatch unless every triple has the same
// kind, outcome and command.
SemTriple apply_disj(const std::vector<SemTriple>& ts);

bool is_universal_frame_set(const MemorySet& r);

// ---------------------------------------------------------------------------
// Normalization: any interleaving of frame / exists / cons steps applied to
// a seed can be rewritten as frame, then exists, then cons.

struct SymbolicTriple {
    std::string name;
    AstPtr pre;
    CmdPtr cmd;
    AstPtr post;
    Outcome outcome = Outcome::Ok;
};

struct NormalizationPools {
    std::vector<AstPtr> frames;
    std::vector<std::vector<std::string>> exists;
    std::vector<AstPtr> cons; // joined (over) or intersected (under) with the relaxed side
    int max_steps = 3;
    // Fresh logical variables used to alpha-rename quantified variables of
    // the seed when a later frame mentions them.
    std::vector<std::string> spares;
    // When false the witness keeps quantified names as they are, which is
    // wrong whenever a later frame mentions them (mutation control).
    bool rename_quantified = true;
};

struct NormalizationReport {
    std::size_t interleavings = 0; // sequences whose steps all applied
    std::size_t rejected = 0;      // sequences cut short by a failing side condition
    std::vector<std::string> failures;
};

NormalizationReport check_normalization(const std::vector<SymbolicTriple>& seeds, TripleKind kind,
                                        const NormalizationPools& pools, const UniversePtr& u);

// Disjunction tracking: ⋃ᵢ ∃X.(Tᵢ • R) equals ∃(X∪{d′}).(⋃ᵢ (Tᵢ ∩ d′=i) • R)
// for an index variable d′ not free in R or the Tᵢ.  Returns whether both
// sides coincide (nullopt when a frame side condition fails on some side).
std::optional<bool> check_disj_tracking(const std::vector<SymbolicTriple>& ts, TripleKind kind,
                                        const AstPtr& frame, const std::vector<std::string>& xs,
                                        const std::string& index_var, const UniversePtr& u);

SemTriple evaluate(const SymbolicTriple& t, TripleKind kind, const UniversePtr& u);

} // namespace sepkit
