#include "sepkit/syntax.hpp"

#include <algorithm>

namespace sepkit {

// ---------------------------------------------------------------------------
// Constructors

ExprPtr e_const(Value v) { return std::make_shared<const Expr>(Expr{Expr::Kind::Const, v, {}, {}, {}}); }
ExprPtr e_null() { return e_const(kNull); }
ExprPtr e_var(const std::string& name) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::Var, 0, name, {}, {}});
}
ExprPtr e_add(ExprPtr a, ExprPtr b) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::Add, 0, {}, std::move(a), std::move(b)});
}
ExprPtr e_sub(ExprPtr a, ExprPtr b) {
    return std::make_shared<const Expr>(Expr{Expr::Kind::Sub, 0, {}, std::move(a), std::move(b)});
}

namespace {
BoolPtr make_bool(BoolExpr::Kind k, CmpOp op = CmpOp::Eq, ExprPtr l = {}, ExprPtr r = {},
                  BoolPtr a = {}, BoolPtr b = {}) {
    return std::make_shared<const BoolExpr>(
        BoolExpr{k, op, std::move(l), std::move(r), std::move(a), std::move(b)});
}
} // namespace

BoolPtr b_true() { return make_bool(BoolExpr::Kind::True); }
BoolPtr b_false() { return make_bool(BoolExpr::Kind::False); }
BoolPtr b_cmp(ExprPtr l, CmpOp op, ExprPtr r) {
    return make_bool(BoolExpr::Kind::Cmp, op, std::move(l), std::move(r));
}
BoolPtr b_and(BoolPtr a, BoolPtr b) {
    return make_bool(BoolExpr::Kind::And, CmpOp::Eq, {}, {}, std::move(a), std::move(b));
}
BoolPtr b_or(BoolPtr a, BoolPtr b) {
    return make_bool(BoolExpr::Kind::Or, CmpOp::Eq, {}, {}, std::move(a), std::move(b));
}
BoolPtr b_not(BoolPtr a) { return make_bool(BoolExpr::Kind::Not, CmpOp::Eq, {}, {}, std::move(a)); }

namespace {
CmdPtr make_cmd(Command c) { return std::make_shared<const Command>(std::move(c)); }
} // namespace

CmdPtr c_assume(BoolPtr b) {
    Command c{Command::Kind::Assume, {}, {}, {}, std::move(b), {}, {}};
    return make_cmd(std::move(c));
}
CmdPtr c_skip() { return c_assume(b_true()); }
CmdPtr c_error() { return make_cmd(Command{Command::Kind::Error, {}, {}, {}, {}, {}, {}}); }
CmdPtr c_assign(const std::string& x, ExprPtr e) {
    return make_cmd(Command{Command::Kind::Assign, x, {}, std::move(e), {}, {}, {}});
}
CmdPtr c_alloc(const std::string& x) {
    return make_cmd(Command{Command::Kind::Alloc, x, {}, {}, {}, {}, {}});
}
CmdPtr c_free(const std::string& x) {
    return make_cmd(Command{Command::Kind::Free, x, {}, {}, {}, {}, {}});
}
CmdPtr c_load(const std::string& x, const std::string& y) {
    if (x == y) {
        throw ConfigError("load requires distinct variables: " + x + " := [" + y + "]");
    }
    return make_cmd(Command{Command::Kind::Load, x, y, {}, {}, {}, {}});
}
CmdPtr c_store(const std::string& x, const std::string& y) {
    if (x == y) {
        throw ConfigError("store requires distinct variables: [" + x + "] := " + y);
    }
    return make_cmd(Command{Command::Kind::Store, x, y, {}, {}, {}, {}});
}
CmdPtr c_seq(CmdPtr a, CmdPtr b) {
    return make_cmd(Command{Command::Kind::Seq, {}, {}, {}, {}, std::move(a), std::move(b)});
}
CmdPtr c_choice(CmdPtr a, CmdPtr b) {
    return make_cmd(Command{Command::Kind::Choice, {}, {}, {}, {}, std::move(a), std::move(b)});
}
CmdPtr c_star(CmdPtr a) {
    return make_cmd(Command{Command::Kind::Star, {}, {}, {}, {}, std::move(a), {}});
}

int command_depth(const Command& c) {
    switch (c.kind) {
    case Command::Kind::Seq:
    case Command::Kind::Choice:
        return 1 + std::max(command_depth(*c.c1), command_depth(*c.c2));
    case Command::Kind::Star:
        return 1 + command_depth(*c.c1);
    default:
        return 1;
    }
}

namespace {
AstPtr make_ast(Assertion a) { return std::make_shared<const Assertion>(std::move(a)); }
Assertion blank(Assertion::Kind k) {
    Assertion a;
    a.kind = k;
    return a;
}
} // namespace

bool Assertion::is_pure() const {
    switch (kind) {
    case Kind::False:
    case Kind::True:
    case Kind::Cmp:
        return true;
    case Kind::And:
    case Kind::Or:
        return a->is_pure() && b->is_pure();
    case Kind::Exists:
        return a->is_pure();
    default:
        return false;
    }
}

AstPtr a_false() { return make_ast(blank(Assertion::Kind::False)); }
AstPtr a_true() { return make_ast(blank(Assertion::Kind::True)); }
AstPtr a_cmp(ExprPtr l, CmpOp op, ExprPtr r) {
    Assertion a = blank(Assertion::Kind::Cmp);
    a.op = op;
    a.lhs = std::move(l);
    a.rhs = std::move(r);
    return make_ast(std::move(a));
}
AstPtr a_and(AstPtr x, AstPtr y) {
    Assertion a = blank(Assertion::Kind::And);
    a.a = std::move(x);
    a.b = std::move(y);
    return make_ast(std::move(a));
}
AstPtr a_or(AstPtr x, AstPtr y) {
    Assertion a = blank(Assertion::Kind::Or);
    a.a = std::move(x);
    a.b = std::move(y);
    return make_ast(std::move(a));
}
AstPtr a_exists(std::vector<std::string> vars, AstPtr body) {
    Assertion a = blank(Assertion::Kind::Exists);
    a.vars = std::move(vars);
    a.a = std::move(body);
    return make_ast(std::move(a));
}
AstPtr a_emp() { return make_ast(blank(Assertion::Kind::Emp)); }
AstPtr a_points_to(const std::string& x, ExprPtr value) {
    Assertion a = blank(Assertion::Kind::PointsTo);
    a.x = x;
    a.value = std::move(value);
    return make_ast(std::move(a));
}
AstPtr a_not_points_to(const std::string& x) {
    Assertion a = blank(Assertion::Kind::NotPointsTo);
    a.x = x;
    return make_ast(std::move(a));
}
AstPtr a_reserved(const std::string& x) {
    Assertion a = blank(Assertion::Kind::Reserved);
    a.x = x;
    return make_ast(std::move(a));
}
AstPtr a_sep(AstPtr x, AstPtr y) {
    Assertion a = blank(Assertion::Kind::Sep);
    a.a = std::move(x);
    a.b = std::move(y);
    return make_ast(std::move(a));
}
AstPtr a_emp_vars(std::vector<std::string> vars) {
    Assertion a = blank(Assertion::Kind::EmpVars);
    a.vars = std::move(vars);
    return make_ast(std::move(a));
}
AstPtr a_eq_emp(ExprPtr l, ExprPtr r) { return a_and(a_cmp(std::move(l), CmpOp::Eq, std::move(r)), a_emp()); }

AstPtr a_and_all(const std::vector<AstPtr>& xs) {
    if (xs.empty()) {
        return a_true();
    }
    AstPtr r = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        r = a_and(r, xs[i]);
    }
    return r;
}
AstPtr a_or_all(const std::vector<AstPtr>& xs) {
    if (xs.empty()) {
        return a_false();
    }
    AstPtr r = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        r = a_or(r, xs[i]);
    }
    return r;
}
AstPtr a_sep_all(const std::vector<AstPtr>& xs) {
    if (xs.empty()) {
        return a_emp();
    }
    AstPtr r = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) {
        r = a_sep(r, xs[i]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Equality

bool equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case Expr::Kind::Const:
        return a.value == b.value;
    case Expr::Kind::Var:
        return a.name == b.name;
    default:
        return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
}

bool equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False:
        return true;
    case BoolExpr::Kind::Cmp:
        return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case BoolExpr::Kind::Not:
        return equal(*a.a, *b.a);
    default:
        return equal(*a.a, *b.a) && equal(*a.b, *b.b);
    }
}

bool equal(const Command& a, const Command& b) {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
    case Command::Kind::Assume:
        return equal(*a.b, *b.b);
    case Command::Kind::Error:
        return true;
    case Command::Kind::Assign:
        return a.x == b.x && equal(*a.e, *b.e);
    case Command::Kind::Alloc:
    case Command::Kind::Free:
        return a.x == b.x;
    case Command::Kind::Load:
    case Command::Kind::Store:
        return a.x == b.x && a.y == b.y;
    case Command::Kind::Star:
        return equal(*a.c1, *b.c1);
    default:
        return equal(*a.c1, *b.c1) && equal(*a.c2, *b.c2);
    }
}

bool equal(const Assertion& a, const Assertion& b) {
    if (a.kind != b.kind) {
        return false;
    }
    using K = Assertion::Kind;
    switch (a.kind) {
    case K::False:
    case K::True:
    case K::Emp:
        return true;
    case K::Cmp:
        return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    case K::And:
    case K::Or:
    case K::Sep:
        return equal(*a.a, *b.a) && equal(*a.b, *b.b);
    case K::Exists:
        return a.vars == b.vars && equal(*a.a, *b.a);
    case K::EmpVars:
        return a.vars == b.vars;
    case K::PointsTo:
        if (a.x != b.x || static_cast<bool>(a.value) != static_cast<bool>(b.value)) {
            return false;
        }
        return !a.value || equal(*a.value, *b.value);
    case K::NotPointsTo:
    case K::Reserved:
        return a.x == b.x;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq:
        return "=";
    case CmpOp::Ne:
        return "!=";
    case CmpOp::Lt:
        return "<";
    case CmpOp::Le:
        return "<=";
    }
    return "?";
}

namespace {

bool expr_atomic(const Expr& e) { return e.kind == Expr::Kind::Const || e.kind == Expr::Kind::Var; }

std::string expr_paren(const Expr& e) { return expr_atomic(e) ? to_string(e) : "(" + to_string(e) + ")"; }

} // namespace

std::string to_string(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return value_to_string(e.value);
    case Expr::Kind::Var:
        return e.name;
    case Expr::Kind::Add:
        return to_string(*e.lhs) + " + " + expr_paren(*e.rhs);
    case Expr::Kind::Sub:
        return to_string(*e.lhs) + " - " + expr_paren(*e.rhs);
    }
    return "?";
}

namespace {

int bool_prec(const BoolExpr& b) {
    switch (b.kind) {
    case BoolExpr::Kind::Or:
        return 1;
    case BoolExpr::Kind::And:
        return 2;
    default:
        return 3;
    }
}

std::string bool_at(const BoolExpr& b, int prec) {
    const std::string s = to_string(b);
    return bool_prec(b) < prec ? "(" + s + ")" : s;
}

} // namespace

std::string to_string(const BoolExpr& b) {
    switch (b.kind) {
    case BoolExpr::Kind::True:
        return "true";
    case BoolExpr::Kind::False:
        return "false";
    case BoolExpr::Kind::Cmp:
        return to_string(*b.lhs) + " " + to_string(b.op) + " " + to_string(*b.rhs);
    case BoolExpr::Kind::And:
        return bool_at(*b.a, 2) + " && " + bool_at(*b.b, 3);
    case BoolExpr::Kind::Or:
        return bool_at(*b.a, 1) + " || " + bool_at(*b.b, 2);
    case BoolExpr::Kind::Not: {
        const BoolExpr& in = *b.a;
        const bool simple = in.kind == BoolExpr::Kind::True || in.kind == BoolExpr::Kind::False ||
                            in.kind == BoolExpr::Kind::Not;
        return "!" + (simple ? to_string(in) : "(" + to_string(in) + ")");
    }
    }
    return "?";
}

namespace {

int cmd_prec(const Command& c) {
    switch (c.kind) {
    case Command::Kind::Seq:
        return 1;
    case Command::Kind::Choice:
        return 2;
    case Command::Kind::Star:
        return 3;
    default:
        return 4;
    }
}

std::string cmd_at(const Command& c, int prec) {
    const std::string s = to_string(c);
    return cmd_prec(c) < prec ? "(" + s + ")" : s;
}

} // namespace

std::string to_string(const Command& c) {
    switch (c.kind) {
    case Command::Kind::Assume:
        return (c.b->kind == BoolExpr::Kind::Or || c.b->kind == BoolExpr::Kind::And
                    ? "(" + to_string(*c.b) + ")"
                    : to_string(*c.b)) +
               "?";
    case Command::Kind::Error:
        return "error()";
    case Command::Kind::Assign:
        return c.x + " := " + expr_paren(*c.e);
    case Command::Kind::Alloc:
        return c.x + " := alloc()";
    case Command::Kind::Free:
        return "free(" + c.x + ")";
    case Command::Kind::Load:
        return c.x + " := [" + c.y + "]";
    case Command::Kind::Store:
        return "[" + c.x + "] := " + c.y;
    case Command::Kind::Seq:
        return cmd_at(*c.c1, 1) + "; " + cmd_at(*c.c2, 2);
    case Command::Kind::Choice:
        return cmd_at(*c.c1, 2) + " + " + cmd_at(*c.c2, 3);
    case Command::Kind::Star:
        return cmd_at(*c.c1, 4) + "*";
    }
    return "?";
}

namespace {

int ast_prec(const Assertion& a) {
    switch (a.kind) {
    case Assertion::Kind::Or:
        return 1;
    case Assertion::Kind::And:
        return 2;
    case Assertion::Kind::Sep:
        return 3;
    case Assertion::Kind::Cmp:
        return 4;
    case Assertion::Kind::Exists:
        return 0;
    default:
        return 5;
    }
}

std::string ast_at(const Assertion& a, int prec) {
    const std::string s = to_string(a);
    return ast_prec(a) < prec ? "(" + s + ")" : s;
}

std::string join_names(const std::vector<std::string>& xs) {
    std::string r;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r += (i ? ", " : "") + xs[i];
    }
    return r;
}

} // namespace

std::string to_string(const Assertion& a) {
    using K = Assertion::Kind;
    switch (a.kind) {
    case K::False:
        return "false";
    case K::True:
        return "true";
    case K::Emp:
        return "emp";
    case K::Cmp:
        return to_string(*a.lhs) + " " + to_string(a.op) + " " + to_string(*a.rhs);
    case K::And:
        return ast_at(*a.a, 2) + " && " + ast_at(*a.b, 3);
    case K::Or:
        return ast_at(*a.a, 1) + " || " + ast_at(*a.b, 2);
    case K::Sep:
        // Comparisons are wrapped so that `x |-> 1 * (y = 2)` reads back unambiguously.
        return ast_at(*a.a, a.a->kind == K::Cmp ? 5 : 3) + " * " + ast_at(*a.b, 5);
    case K::Exists:
        return "exists " + join_names(a.vars) + " . " + to_string(*a.a);
    case K::EmpVars:
        return "empX{" + join_names(a.vars) + "}";
    case K::PointsTo:
        return a.x + " |-> " + (a.value ? expr_paren(*a.value) : "_");
    case K::NotPointsTo:
        return a.x + " !->";
    case K::Reserved:
        return a.x + " #->";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Free variables

namespace {

void collect(const Expr& e, VarSet& out) {
    switch (e.kind) {
    case Expr::Kind::Const:
        return;
    case Expr::Kind::Var:
        out.insert(e.name);
        return;
    default:
        collect(*e.lhs, out);
        collect(*e.rhs, out);
    }
}

void collect(const BoolExpr& b, VarSet& out) {
    switch (b.kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False:
        return;
    case BoolExpr::Kind::Cmp:
        collect(*b.lhs, out);
        collect(*b.rhs, out);
        return;
    case BoolExpr::Kind::Not:
        collect(*b.a, out);
        return;
    default:
        collect(*b.a, out);
        collect(*b.b, out);
    }
}

void collect(const Assertion& a, VarSet& out, bool include_bound) {
    using K = Assertion::Kind;
    switch (a.kind) {
    case K::False:
    case K::True:
    case K::Emp:
        return;
    case K::Cmp:
        collect(*a.lhs, out);
        collect(*a.rhs, out);
        return;
    case K::And:
    case K::Or:
    case K::Sep:
        collect(*a.a, out, include_bound);
        collect(*a.b, out, include_bound);
        return;
    case K::Exists: {
        VarSet inner;
        collect(*a.a, inner, include_bound);
        for (const auto& v : a.vars) {
            if (include_bound) {
                inner.insert(v);
            } else {
                inner.erase(v);
            }
        }
        out.insert(inner.begin(), inner.end());
        return;
    }
    case K::EmpVars:
        for (const auto& v : a.vars) {
            out.insert(v);
            out.insert(DomainConfig::mirror(v));
        }
        return;
    case K::PointsTo:
        out.insert(a.x);
        if (a.value) {
            collect(*a.value, out);
        }
        return;
    case K::NotPointsTo:
    case K::Reserved:
        out.insert(a.x);
        return;
    }
}

void collect_cmd(const Command& c, VarSet& out) {
    switch (c.kind) {
    case Command::Kind::Assume:
        collect(*c.b, out);
        return;
    case Command::Kind::Error:
        return;
    case Command::Kind::Assign:
        out.insert(c.x);
        collect(*c.e, out);
        return;
    case Command::Kind::Alloc:
    case Command::Kind::Free:
        out.insert(c.x);
        return;
    case Command::Kind::Load:
    case Command::Kind::Store:
        out.insert(c.x);
        out.insert(c.y);
        return;
    case Command::Kind::Star:
        collect_cmd(*c.c1, out);
        return;
    default:
        collect_cmd(*c.c1, out);
        collect_cmd(*c.c2, out);
    }
}

} // namespace

VarSet free_vars(const Expr& e) {
    VarSet s;
    collect(e, s);
    return s;
}
VarSet free_vars(const BoolExpr& b) {
    VarSet s;
    collect(b, s);
    return s;
}
VarSet free_vars(const Assertion& a) {
    VarSet s;
    collect(a, s, false);
    return s;
}
bool mentions(const Assertion& a, Assertion::Kind kind) {
    if (a.kind == kind) {
        return true;
    }
    return (a.a && mentions(*a.a, kind)) || (a.b && mentions(*a.b, kind));
}

VarSet all_vars(const Assertion& a) {
    VarSet s;
    collect(a, s, true);
    return s;
}
VarSet command_vars(const Command& c) {
    VarSet s;
    collect_cmd(c, s);
    return s;
}

// ---------------------------------------------------------------------------
// emp_X expansion and substitution

AstPtr expand_emp_vars(const AstPtr& a) {
    using K = Assertion::Kind;
    switch (a->kind) {
    case K::EmpVars: {
        std::vector<AstPtr> eqs;
        for (const auto& v : a->vars) {
            eqs.push_back(a_cmp(e_var(v), CmpOp::Eq, e_var(DomainConfig::mirror(v))));
        }
        if (eqs.empty()) {
            return a_emp();
        }
        return a_and(a_and_all(eqs), a_emp());
    }
    case K::And:
        return a_and(expand_emp_vars(a->a), expand_emp_vars(a->b));
    case K::Or:
        return a_or(expand_emp_vars(a->a), expand_emp_vars(a->b));
    case K::Sep:
        return a_sep(expand_emp_vars(a->a), expand_emp_vars(a->b));
    case K::Exists:
        return a_exists(a->vars, expand_emp_vars(a->a));
    default:
        return a;
    }
}

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& by) {
    switch (e->kind) {
    case Expr::Kind::Const:
        return e;
    case Expr::Kind::Var:
        return e->name == x ? by : e;
    case Expr::Kind::Add:
        return e_add(subst(e->lhs, x, by), subst(e->rhs, x, by));
    case Expr::Kind::Sub:
        return e_sub(subst(e->lhs, x, by), subst(e->rhs, x, by));
    }
    return e;
}

BoolPtr subst(const BoolPtr& b, const std::string& x, const ExprPtr& by) {
    switch (b->kind) {
    case BoolExpr::Kind::True:
    case BoolExpr::Kind::False:
        return b;
    case BoolExpr::Kind::Cmp:
        return b_cmp(subst(b->lhs, x, by), b->op, subst(b->rhs, x, by));
    case BoolExpr::Kind::And:
        return b_and(subst(b->a, x, by), subst(b->b, x, by));
    case BoolExpr::Kind::Or:
        return b_or(subst(b->a, x, by), subst(b->b, x, by));
    case BoolExpr::Kind::Not:
        return b_not(subst(b->a, x, by));
    }
    return b;
}

namespace {

std::string subst_address(const std::string& addr, const std::string& x, const ExprPtr& by) {
    if (addr != x) {
        return addr;
    }
    if (by->kind != Expr::Kind::Var) {
        throw ConfigError("cannot substitute " + to_string(*by) + " for the address " + x);
    }
    return by->name;
}

} // namespace

AstPtr subst(const AstPtr& a, const std::string& x, const ExprPtr& by) {
    using K = Assertion::Kind;
    switch (a->kind) {
    case K::False:
    case K::True:
    case K::Emp:
        return a;
    case K::Cmp:
        return a_cmp(subst(a->lhs, x, by), a->op, subst(a->rhs, x, by));
    case K::And:
        return a_and(subst(a->a, x, by), subst(a->b, x, by));
    case K::Or:
        return a_or(subst(a->a, x, by), subst(a->b, x, by));
    case K::Sep:
        return a_sep(subst(a->a, x, by), subst(a->b, x, by));
    case K::Exists: {
        if (std::find(a->vars.begin(), a->vars.end(), x) != a->vars.end()) {
            return a;
        }
        const VarSet fv = free_vars(*by);
        for (const auto& v : a->vars) {
            if (fv.count(v) != 0) {
                throw ConfigError("substitution would capture bound variable " + v);
            }
        }
        return a_exists(a->vars, subst(a->a, x, by));
    }
    case K::EmpVars: {
        const VarSet fv = free_vars(*a);
        if (fv.count(x) == 0) {
            return a;
        }
        return subst(expand_emp_vars(a), x, by);
    }
    case K::PointsTo:
        return a_points_to(subst_address(a->x, x, by), a->value ? subst(a->value, x, by) : nullptr);
    case K::NotPointsTo:
        return a_not_points_to(subst_address(a->x, x, by));
    case K::Reserved:
        return a_reserved(subst_address(a->x, x, by));
    }
    return a;
}

namespace {

std::string ren(const std::string& v, const std::map<std::string, std::string>& m) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
}

ExprPtr rename_expr(const ExprPtr& e, const std::map<std::string, std::string>& m) {
    switch (e->kind) {
    case Expr::Kind::Const:
        return e;
    case Expr::Kind::Var:
        return e_var(ren(e->name, m));
    case Expr::Kind::Add:
        return e_add(rename_expr(e->lhs, m), rename_expr(e->rhs, m));
    case Expr::Kind::Sub:
        return e_sub(rename_expr(e->lhs, m), rename_expr(e->rhs, m));
    }
    return e;
}

} // namespace

AstPtr rename(const AstPtr& a, const std::map<std::string, std::string>& m) {
    using K = Assertion::Kind;
    switch (a->kind) {
    case K::False:
    case K::True:
    case K::Emp:
        return a;
    case K::Cmp:
        return a_cmp(rename_expr(a->lhs, m), a->op, rename_expr(a->rhs, m));
    case K::And:
        return a_and(rename(a->a, m), rename(a->b, m));
    case K::Or:
        return a_or(rename(a->a, m), rename(a->b, m));
    case K::Sep:
        return a_sep(rename(a->a, m), rename(a->b, m));
    case K::Exists: {
        auto inner = m;
        for (const auto& v : a->vars) {
            inner.erase(v);
        }
        return a_exists(a->vars, rename(a->a, inner));
    }
    case K::EmpVars: {
        // Renaming a program variable must keep the mirror convention, so
        // emp_X is expanded before any of its variables is renamed.
        for (const auto& v : a->vars) {
            if (m.count(v) || m.count(DomainConfig::mirror(v))) {
                return rename(expand_emp_vars(a), m);
            }
        }
        return a;
    }
    case K::PointsTo:
        return a_points_to(ren(a->x, m), a->value ? rename_expr(a->value, m) : nullptr);
    case K::NotPointsTo:
        return a_not_points_to(ren(a->x, m));
    case K::Reserved:
        return a_reserved(ren(a->x, m));
    }
    return a;
}

// ---------------------------------------------------------------------------
// Evaluation

Value eval_expr(const Expr& e, const Universe& u, std::uint64_t store) {
    switch (e.kind) {
    case Expr::Kind::Const:
        if (!u.valid_value(e.value)) {
            throw ConfigError("constant " + value_to_string(e.value) + " is outside the value range");
        }
        return e.value;
    case Expr::Kind::Var:
        return u.get(store, u.require_var(e.name));
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
        const Value l = eval_expr(*e.lhs, u, store);
        const Value r = eval_expr(*e.rhs, u, store);
        if (l == kNull || r == kNull) {
            return kNull;
        }
        const int n = u.config().num_values;
        const int raw = e.kind == Expr::Kind::Add ? l + r : l - r;
        return ((raw % n) + n) % n;
    }
    }
    return kNull;
}

bool eval_cmp(CmpOp op, Value l, Value r) {
    switch (op) {
    case CmpOp::Eq:
        return l == r;
    case CmpOp::Ne:
        return l != r;
    case CmpOp::Lt:
        return l != kNull && r != kNull && l < r;
    case CmpOp::Le:
        return l != kNull && r != kNull && l <= r;
    }
    return false;
}

bool eval_bool(const BoolExpr& b, const Universe& u, std::uint64_t store) {
    switch (b.kind) {
    case BoolExpr::Kind::True:
        return true;
    case BoolExpr::Kind::False:
        return false;
    case BoolExpr::Kind::Cmp:
        return eval_cmp(b.op, eval_expr(*b.lhs, u, store), eval_expr(*b.rhs, u, store));
    case BoolExpr::Kind::And:
        return eval_bool(*b.a, u, store) && eval_bool(*b.b, u, store);
    case BoolExpr::Kind::Or:
        return eval_bool(*b.a, u, store) || eval_bool(*b.b, u, store);
    case BoolExpr::Kind::Not:
        return !eval_bool(*b.a, u, store);
    }
    return false;
}

} // namespace sepkit
