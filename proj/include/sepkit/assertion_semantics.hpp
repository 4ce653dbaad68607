#pragma once

#include <string>
#include <vector>

#include "sepkit/domain.hpp"
#include "sepkit/syntax.hpp"

namespace sepkit {

// Exact denotation of an assertion over the memories of `u`.  Every variable
// of `a` (free or bound) must be configured in `u`; otherwise ConfigError.
// Throws ModelMismatch for `x !->` under model 1 and for `x #->` when
// reserved cells are disabled.
MemorySet eval_assertion(const Assertion& a, const UniversePtr& u);

// ---------------------------------------------------------------------------
// Disjunctive normal form
//
// A disjunct is a conjunction of comparisons together with a finite
// separating product of cells.  When `top` is set the heap may contain
// further cells beyond those listed (the product is followed by `∗ true`);
// this is how pure assertions, whose heap is unconstrained, are represented.
// Cell addresses are expressions because eliminating an existential by
// finite expansion may substitute a constant for an address variable.
// Cell addresses must denote pairwise-distinct locations.

struct DnfLiteral {
    ExprPtr lhs;
    CmpOp op;
    ExprPtr rhs;
};

struct DnfCell {
    enum class Kind { Val, Any, Dealloc, Reserved };
    ExprPtr addr;
    Kind kind;
    ExprPtr value; // Val only
};

struct DnfDisjunct {
    std::vector<DnfLiteral> pure;
    std::vector<DnfCell> cells;
    bool top = false;
};

struct DnfAssertion {
    UniversePtr universe; // the expansion of ∃ depends on the value range
    std::vector<DnfDisjunct> disjuncts;
};

// ∃ over any variable is eliminated by expansion over all values of `u`.
DnfAssertion to_dnf(const Assertion& a, const UniversePtr& u);
MemorySet eval_dnf(const DnfAssertion& d);
MemorySet eval_disjunct(const DnfDisjunct& d, const UniversePtr& u);
std::string to_string(const DnfDisjunct& d);
std::string to_string(const DnfAssertion& d);

// ---------------------------------------------------------------------------
// Entailment and frames

bool implies(const Assertion& a, const Assertion& b, const UniversePtr& u);
bool equivalent(const Assertion& a, const Assertion& b, const UniversePtr& u);

// Syntactic criterion: every free variable is logical (primed).
bool is_universal_frame(const Assertion& a);
// Semantic criterion: the denotation is closed under reassignment of every
// program variable.
bool is_universal_frame_semantic(const Assertion& a, const UniversePtr& u);

// ---------------------------------------------------------------------------
// Heap compatibility

// For all (s,h) ∈ P and (s,h′) ∈ Q, h and h′ are disjoint.  Abort is ignored.
bool heap_compat_semantic(const MemorySet& p, const MemorySet& q);

// Computed on the normal forms: for every pair of disjuncts (Pi ∧ Hi) of `a`
// and (Pj ∧ Hj) of `b`, whenever Pi ∧ Pj holds and both products are
// well-defined, the products are separable.  The implication is decided by
// enumerating stores.
bool heap_compat_logical(const Assertion& a, const Assertion& b, const UniversePtr& u);
bool heap_compat_logical(const DnfAssertion& a, const DnfAssertion& b);

} // namespace sepkit
