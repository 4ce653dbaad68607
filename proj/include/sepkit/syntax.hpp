#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sepkit/domain.hpp"

namespace sepkit {

// ---------------------------------------------------------------------------
// Arithmetic expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Var, Add, Sub };
    Kind kind;
    Value value = 0;   // Const (kNull for the null literal)
    std::string name;  // Var
    ExprPtr lhs, rhs;  // Add / Sub
};

ExprPtr e_const(Value v);
ExprPtr e_null();
ExprPtr e_var(const std::string& name);
ExprPtr e_add(ExprPtr a, ExprPtr b);
ExprPtr e_sub(ExprPtr a, ExprPtr b);

enum class CmpOp { Eq, Ne, Lt, Le };

// ---------------------------------------------------------------------------
// Boolean guards

struct BoolExpr;
using BoolPtr = std::shared_ptr<const BoolExpr>;

struct BoolExpr {
    enum class Kind { True, False, Cmp, And, Or, Not };
    Kind kind;
    CmpOp op = CmpOp::Eq;
    ExprPtr lhs, rhs; // Cmp
    BoolPtr a, b;     // And / Or / Not (a only)
};

BoolPtr b_true();
BoolPtr b_false();
BoolPtr b_cmp(ExprPtr l, CmpOp op, ExprPtr r);
BoolPtr b_and(BoolPtr a, BoolPtr b);
BoolPtr b_or(BoolPtr a, BoolPtr b);
BoolPtr b_not(BoolPtr a);

// ---------------------------------------------------------------------------
// Regular commands

struct Command;
using CmdPtr = std::shared_ptr<const Command>;

struct Command {
    enum class Kind { Assume, Error, Assign, Alloc, Free, Load, Store, Seq, Choice, Star };
    Kind kind;
    std::string x, y; // Assign/Alloc/Free: x; Load: x := [y]; Store: [x] := y
    ExprPtr e;        // Assign
    BoolPtr b;        // Assume
    CmdPtr c1, c2;    // Seq / Choice (both), Star (c1)

    bool is_atomic() const { return kind != Kind::Seq && kind != Kind::Choice && kind != Kind::Star; }
};

CmdPtr c_assume(BoolPtr b);
CmdPtr c_skip();
CmdPtr c_error();
CmdPtr c_assign(const std::string& x, ExprPtr e);
CmdPtr c_alloc(const std::string& x);
CmdPtr c_free(const std::string& x);
// Load and store require distinct variables; ConfigError otherwise.
CmdPtr c_load(const std::string& x, const std::string& y);
CmdPtr c_store(const std::string& x, const std::string& y);
CmdPtr c_seq(CmdPtr a, CmdPtr b);
CmdPtr c_choice(CmdPtr a, CmdPtr b);
CmdPtr c_star(CmdPtr a);

int command_depth(const Command& c);

// ---------------------------------------------------------------------------
// Assertions

struct Assertion;
using AstPtr = std::shared_ptr<const Assertion>;

struct Assertion {
    enum class Kind {
        False,
        True,
        Cmp,
        And,
        Or,
        Exists,
        Emp,
        PointsTo,
        NotPointsTo,
        Reserved,
        Sep,
        EmpVars
    };
    Kind kind;
    CmpOp op = CmpOp::Eq;
    ExprPtr lhs, rhs;              // Cmp
    AstPtr a, b;                   // And / Or / Sep (both), Exists (a)
    std::vector<std::string> vars; // Exists / EmpVars
    std::string x;                 // PointsTo / NotPointsTo / Reserved
    ExprPtr value;                 // PointsTo; null pointer means the wildcard `_`

    bool is_pure() const;
};

AstPtr a_false();
AstPtr a_true();
AstPtr a_cmp(ExprPtr l, CmpOp op, ExprPtr r);
AstPtr a_and(AstPtr a, AstPtr b);
AstPtr a_or(AstPtr a, AstPtr b);
AstPtr a_exists(std::vector<std::string> vars, AstPtr a);
AstPtr a_emp();
AstPtr a_points_to(const std::string& x, ExprPtr value); // value == nullptr: x |-> _
AstPtr a_not_points_to(const std::string& x);
AstPtr a_reserved(const std::string& x);
AstPtr a_sep(AstPtr a, AstPtr b);
AstPtr a_emp_vars(std::vector<std::string> vars);
// x ≐ e, i.e. x = e ∧ emp
AstPtr a_eq_emp(ExprPtr l, ExprPtr r);
// Left-nested ∧ / ∨ / ∗ over a list (neutral element for empty lists).
AstPtr a_and_all(const std::vector<AstPtr>& xs);
AstPtr a_or_all(const std::vector<AstPtr>& xs);
AstPtr a_sep_all(const std::vector<AstPtr>& xs);
// Whether a node of the given kind occurs anywhere in the assertion.
bool mentions(const Assertion& a, Assertion::Kind kind);

// ---------------------------------------------------------------------------
// Structural equality and printing.  Printing produces text the parsers read
// back to an equal AST.

bool equal(const Expr& a, const Expr& b);
bool equal(const BoolExpr& a, const BoolExpr& b);
bool equal(const Command& a, const Command& b);
bool equal(const Assertion& a, const Assertion& b);

std::string to_string(const Expr& e);
std::string to_string(const BoolExpr& b);
std::string to_string(const Command& c);
std::string to_string(const Assertion& a);
std::string to_string(CmpOp op);

// ---------------------------------------------------------------------------
// Parsers (throw ParseError).

ExprPtr parse_expr(const std::string& text);
BoolPtr parse_bool(const std::string& text);
CmdPtr parse_command(const std::string& text);
AstPtr parse_assertion(const std::string& text);

// ---------------------------------------------------------------------------
// Variables and substitution

using VarSet = std::set<std::string>;

VarSet free_vars(const Expr& e);
VarSet free_vars(const BoolExpr& b);
VarSet free_vars(const Assertion& a);
// Program variables mentioned by a command.
VarSet command_vars(const Command& c);
// Every variable name occurring in the assertion, bound or free.
VarSet all_vars(const Assertion& a);

// Replaces each emp_vars(X) by (⋀_{x∈X} x = x′) ∧ emp.
AstPtr expand_emp_vars(const AstPtr& a);

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& by);
BoolPtr subst(const BoolPtr& b, const std::string& x, const ExprPtr& by);
// Substitution of `by` for the free occurrences of `x`.  Bound variables are
// not renamed (a fresh name might not exist in the universe), so ConfigError
// is thrown when `by` would be captured; likewise when x is the address of a
// points-to and `by` is not a variable.
AstPtr subst(const AstPtr& a, const std::string& x, const ExprPtr& by);

// Simultaneous renaming of variables (used to instantiate schemas).
AstPtr rename(const AstPtr& a, const std::map<std::string, std::string>& m);

// ---------------------------------------------------------------------------
// Evaluation of expressions over stores

// Wraps modulo n; any arithmetic with null yields null.
Value eval_expr(const Expr& e, const Universe& u, std::uint64_t store);
bool eval_cmp(CmpOp op, Value l, Value r);
bool eval_bool(const BoolExpr& b, const Universe& u, std::uint64_t store);

} // namespace sepkit
