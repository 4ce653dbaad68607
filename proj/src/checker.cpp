#include "sepkit/checker.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "sepkit/assertion_semantics.hpp"

namespace sepkit {

std::string to_string(LogicId id) {
    switch (id) {
    case LogicId::SlPlus:
        return "sl+";
    case LogicId::IslPlus:
        return "isl+";
    case LogicId::SilPlus:
        return "sil+";
    case LogicId::NcPlus:
        return "nc+";
    }
    return "?";
}

std::string to_string(const Logic& l) {
    return to_string(l.id) + (l.model == Model::One ? "1" : "2");
}

LogicId parse_logic_id(const std::string& text) {
    for (LogicId id : {LogicId::SlPlus, LogicId::IslPlus, LogicId::SilPlus, LogicId::NcPlus}) {
        if (text == to_string(id)) {
            return id;
        }
    }
    throw ParseError("unknown logic '" + text + "'", 0);
}

Logic parse_logic(const std::string& text, Model default_model) {
    if (!text.empty() && (text.back() == '1' || text.back() == '2')) {
        return {parse_logic_id(text.substr(0, text.size() - 1)),
                text.back() == '1' ? Model::One : Model::Two};
    }
    return {parse_logic_id(text), default_model};
}

TripleKind kind_of(LogicId id) {
    switch (id) {
    case LogicId::SlPlus:
        return {Direction::Forward, Sense::Over, false};
    case LogicId::IslPlus:
        return {Direction::Forward, Sense::Under, true};
    case LogicId::SilPlus:
        return {Direction::Backward, Sense::Under, false};
    case LogicId::NcPlus:
        return {Direction::Backward, Sense::Over, false};
    }
    return {};
}

bool default_reserved(LogicId id) { return id == LogicId::IslPlus; }

// ---------------------------------------------------------------------------
// Logical triples

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return s.substr(a, b - a);
}

} // namespace

LogicalTriple parse_triple(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty() || s.front() != '{') {
        throw ParseError("triple must start with '{'", 0);
    }
    int depth = 0;
    std::size_t pre_end = std::string::npos;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '{') {
            ++depth;
        } else if (s[i] == '}' && --depth == 0) {
            pre_end = i;
            break;
        }
    }
    if (pre_end == std::string::npos) {
        throw ParseError("unbalanced '{' in precondition", 0);
    }
    if (s.back() != '}') {
        throw ParseError("triple must end with '}'", s.size());
    }
    depth = 0;
    std::size_t post_begin = std::string::npos;
    for (std::size_t i = s.size(); i-- > pre_end + 1;) {
        if (s[i] == '}') {
            ++depth;
        } else if (s[i] == '{' && --depth == 0) {
            post_begin = i;
            break;
        }
    }
    if (post_begin == std::string::npos) {
        throw ParseError("missing postcondition", pre_end + 1);
    }
    std::string middle = trim(s.substr(pre_end + 1, post_begin - pre_end - 1));
    Outcome outcome = Outcome::Ok;
    // A trailing "[tag]" is an outcome unless it is the address of a load
    // such as "x := [y]".
    if (!middle.empty() && middle.back() == ']') {
        const std::size_t open = middle.rfind('[');
        if (open == std::string::npos) {
            throw ParseError("unbalanced ']' before postcondition", post_begin);
        }
        const std::string tag = trim(middle.substr(open + 1, middle.size() - open - 2));
        const std::string before = trim(middle.substr(0, open));
        const bool load = before.size() >= 2 && before.compare(before.size() - 2, 2, ":=") == 0;
        if (!load) {
            if (tag == "ok") {
                outcome = Outcome::Ok;
            } else if (tag == "er") {
                outcome = Outcome::Er;
            } else if (tag == "either") {
                outcome = Outcome::Either;
            } else {
                throw ParseError("unknown outcome tag '" + tag + "'", pre_end + 1 + open);
            }
            middle = before;
        }
    }
    if (middle.empty()) {
        throw ParseError("missing command", pre_end + 1);
    }
    LogicalTriple t;
    try {
        t.pre = parse_assertion(s.substr(1, pre_end - 1));
    } catch (const ParseError& e) {
        throw ParseError(std::string("precondition: ") + e.what(), 1);
    }
    try {
        t.cmd = parse_command(middle);
    } catch (const ParseError& e) {
        throw ParseError(std::string("command: ") + e.what(), pre_end + 1);
    }
    try {
        t.post = parse_assertion(s.substr(post_begin + 1, s.size() - post_begin - 2));
    } catch (const ParseError& e) {
        throw ParseError(std::string("postcondition: ") + e.what(), post_begin + 1);
    }
    t.outcome = outcome;
    return t;
}

std::string to_string(const LogicalTriple& t) {
    std::string tag;
    if (t.outcome == Outcome::Er) {
        tag = "[er]";
    } else if (t.outcome == Outcome::Either) {
        tag = "[either]";
    }
    return "{" + to_string(*t.pre) + "} " + to_string(*t.cmd) + " " + tag + "{" + to_string(*t.post) +
           "}";
}

bool equal(const LogicalTriple& a, const LogicalTriple& b) {
    return a.outcome == b.outcome && equal(*a.pre, *b.pre) && equal(*a.cmd, *b.cmd) &&
           equal(*a.post, *b.post);
}

// ---------------------------------------------------------------------------
// Axioms

AstPtr bool_to_assertion(const BoolPtr& b) {
    using K = BoolExpr::Kind;
    switch (b->kind) {
    case K::True:
        return a_true();
    case K::False:
        return a_false();
    case K::Cmp:
        return a_cmp(b->lhs, b->op, b->rhs);
    case K::And:
        return a_and(bool_to_assertion(b->a), bool_to_assertion(b->b));
    case K::Or:
        return a_or(bool_to_assertion(b->a), bool_to_assertion(b->b));
    case K::Not:
        break;
    }
    const BoolExpr& n = *b->a;
    switch (n.kind) {
    case K::True:
        return a_false();
    case K::False:
        return a_true();
    case K::Not:
        return bool_to_assertion(n.a);
    case K::And:
        return a_or(bool_to_assertion(b_not(n.a)), bool_to_assertion(b_not(n.b)));
    case K::Or:
        return a_and(bool_to_assertion(b_not(n.a)), bool_to_assertion(b_not(n.b)));
    case K::Cmp:
        break;
    }
    // Equality is structural on null, so ≠ is its exact negation; the
    // orderings are false on null, so their negation must admit it.
    auto is_null = [](const ExprPtr& e) { return a_cmp(e, CmpOp::Eq, e_null()); };
    switch (n.op) {
    case CmpOp::Eq:
        return a_cmp(n.lhs, CmpOp::Ne, n.rhs);
    case CmpOp::Ne:
        return a_cmp(n.lhs, CmpOp::Eq, n.rhs);
    case CmpOp::Lt:
        return a_or(a_or(a_cmp(n.rhs, CmpOp::Le, n.lhs), is_null(n.lhs)), is_null(n.rhs));
    case CmpOp::Le:
        return a_or(a_or(a_cmp(n.rhs, CmpOp::Lt, n.lhs), is_null(n.lhs)), is_null(n.rhs));
    }
    return a_false();
}

namespace {

using Build = std::function<LogicalTriple(const AxiomInstance&, const std::vector<std::string>&)>;

AstPtr emp_all(const std::vector<std::string>& pv) { return a_emp_vars(pv); }

AstPtr emp_without(const std::vector<std::string>& pv, const std::string& x) {
    std::vector<std::string> rest;
    for (const auto& v : pv) {
        if (v != x) {
            rest.push_back(v);
        }
    }
    return a_emp_vars(rest);
}

ExprPtr var(const std::string& x) { return e_var(x); }
ExprPtr mirror(const std::string& x) { return e_var(DomainConfig::mirror(x)); }
ExprPtr zval(const AxiomInstance& i) { return i.z ? i.z : e_var("z'"); }
AstPtr eq(ExprPtr a, ExprPtr b) { return a_cmp(std::move(a), CmpOp::Eq, std::move(b)); }

LogicalTriple triple(AstPtr p, CmdPtr c, AstPtr q, Outcome o = Outcome::Ok) {
    return LogicalTriple{std::move(p), std::move(c), std::move(q), o};
}

void add(std::vector<AxiomSchema>& t, std::string name, LogicId logic, std::optional<Model> model,
         Command::Kind cmd, Outcome outcome, Build build, bool needs_reserved = false) {
    t.push_back(AxiomSchema{std::move(name), logic, model, needs_reserved, cmd, outcome, std::move(build)});
}

// Free is shared by every system; the mutation keeps the freed cell.
void add_free_axioms(std::vector<AxiomSchema>& t, LogicId logic, const Mutations& m) {
    using K = Command::Kind;
    add(t, "Free1", logic, Model::One, K::Free, Outcome::Ok, [m](const AxiomInstance& i, const auto& pv) {
        const AstPtr pre = a_sep(emp_all(pv), a_points_to(i.x, zval(i)));
        return triple(pre, c_free(i.x), m.free_keeps_cell ? pre : emp_all(pv));
    });
    add(t, "Free2", logic, Model::Two, K::Free, Outcome::Ok, [m](const AxiomInstance& i, const auto& pv) {
        const AstPtr pre = a_sep(emp_all(pv), a_points_to(i.x, zval(i)));
        return triple(pre, c_free(i.x), m.free_keeps_cell ? pre : a_sep(emp_all(pv), a_not_points_to(i.x)));
    });
}

void add_store_axiom(std::vector<AxiomSchema>& t, LogicId logic) {
    add(t, "Store", logic, std::nullopt, Command::Kind::Store, Outcome::Ok,
        [](const AxiomInstance& i, const auto& pv) {
            return triple(a_sep(emp_all(pv), a_points_to(i.x, zval(i))), c_store(i.x, i.y),
                          a_sep(emp_all(pv), a_points_to(i.x, var(i.y))));
        });
}

// Forward ok axioms, shared by SL+ and ISL+.
void add_forward_axioms(std::vector<AxiomSchema>& t, LogicId logic, const Mutations& m) {
    using K = Command::Kind;
    add(t, "Alloc", logic, std::nullopt, K::Alloc, Outcome::Ok, [](const AxiomInstance& i, const auto& pv) {
        return triple(emp_all(pv), c_alloc(i.x), a_sep(emp_without(pv, i.x), a_points_to(i.x, zval(i))));
    });
    add(t, "Alloc2", logic, Model::Two, K::Alloc, Outcome::Ok, [](const AxiomInstance& i, const auto& pv) {
        return triple(a_sep(emp_all(pv), a_not_points_to(i.l)), c_alloc(i.x),
                      a_and(a_sep(emp_without(pv, i.x), a_points_to(i.l, zval(i))), eq(var(i.x), var(i.l))));
    });
    add_free_axioms(t, logic, m);
    add(t, "Assign", logic, std::nullopt, K::Assign, Outcome::Ok, [m](const AxiomInstance& i, const auto& pv) {
        const ExprPtr rhs = m.assign_unsubstituted ? i.e : subst(i.e, i.x, mirror(i.x));
        return triple(a_and(emp_without(pv, i.x), eq(var(i.x), mirror(i.x))), c_assign(i.x, i.e),
                      a_and(emp_without(pv, i.x), eq(var(i.x), rhs)));
    });
    add(t, "Assume", logic, std::nullopt, K::Assume, Outcome::Ok, [](const AxiomInstance& i, const auto& pv) {
        return triple(emp_all(pv), c_assume(i.b), a_and(emp_all(pv), bool_to_assertion(i.b)));
    });
    add(t, "Load", logic, std::nullopt, K::Load, Outcome::Ok, [m](const AxiomInstance& i, const auto& pv) {
        const AstPtr post = a_sep(emp_without(pv, i.x), a_points_to(i.y, zval(i)));
        return triple(a_sep(emp_all(pv), a_points_to(i.y, zval(i))), c_load(i.x, i.y),
                      m.load_forgets_value ? post : a_and(post, eq(var(i.x), zval(i))));
    });
    add_store_axiom(t, logic);
}

void add_error_axioms(std::vector<AxiomSchema>& t) {
    using K = Command::Kind;
    const LogicId L = LogicId::IslPlus;
    add(t, "Error", L, std::nullopt, K::Error, Outcome::Er, [](const AxiomInstance&, const auto& pv) {
        return triple(emp_all(pv), c_error(), emp_all(pv), Outcome::Er);
    });
    struct Faulting {
        std::string stem;
        K kind;
    };
    for (const Faulting& f : {Faulting{"Free", K::Free}, Faulting{"Load", K::Load}, Faulting{"Store", K::Store}}) {
        auto cmd = [kind = f.kind](const AxiomInstance& i) {
            return kind == K::Free ? c_free(i.x) : kind == K::Load ? c_load(i.x, i.y) : c_store(i.x, i.y);
        };
        // The dereferenced variable: y for a load, x otherwise.
        auto target = [kind = f.kind](const AxiomInstance& i) { return kind == K::Load ? i.y : i.x; };
        auto same = [](AstPtr p, CmdPtr c) { return triple(p, std::move(c), p, Outcome::Er); };
        add(t, f.stem + "Er1", L, std::nullopt, f.kind, Outcome::Er, [=](const AxiomInstance& i, const auto& pv) {
            return same(a_sep(emp_all(pv), a_eq_emp(var(target(i)), e_null())), cmd(i));
        });
        add(t, f.stem + "Er2", L, std::nullopt, f.kind, Outcome::Er,
            [=](const AxiomInstance& i, const auto& pv) {
                return same(a_sep(emp_all(pv), a_reserved(target(i))), cmd(i));
            },
            true);
        add(t, f.stem + "Er3", L, Model::Two, f.kind, Outcome::Er, [=](const AxiomInstance& i, const auto& pv) {
            return same(a_sep(emp_all(pv), a_not_points_to(target(i))), cmd(i));
        });
    }
}

// Backward axioms, shared by SIL+ and NC+.
void add_backward_axioms(std::vector<AxiomSchema>& t, LogicId logic, const Mutations& m) {
    using K = Command::Kind;
    auto fresh_cell_post = [](const AxiomInstance& i, const std::vector<std::string>& pv) {
        return a_sep(a_and(emp_without(pv, i.x), eq(var(i.x), mirror(i.x))), a_points_to(i.x, zval(i)));
    };
    add(t, "Alloc", logic, std::nullopt, K::Alloc, Outcome::Ok, [=](const AxiomInstance& i, const auto& pv) {
        return triple(a_and(emp_without(pv, i.x), eq(mirror(i.x), var(i.l))), c_alloc(i.x),
                      fresh_cell_post(i, pv));
    });
    add(t, "Alloc2", logic, Model::Two, K::Alloc, Outcome::Ok, [=](const AxiomInstance& i, const auto& pv) {
        return triple(a_sep(a_and(emp_without(pv, i.x), eq(mirror(i.x), var(i.l))), a_not_points_to(i.l)),
                      c_alloc(i.x), fresh_cell_post(i, pv));
    });
    add_free_axioms(t, logic, m);
    add(t, "Assign", logic, std::nullopt, K::Assign, Outcome::Ok, [](const AxiomInstance& i, const auto& pv) {
        return triple(a_and(emp_without(pv, i.x), eq(mirror(i.x), i.e)), c_assign(i.x, i.e),
                      a_and(emp_without(pv, i.x), eq(var(i.x), mirror(i.x))));
    });
    add(t, "Assume", logic, std::nullopt, K::Assume, Outcome::Ok, [](const AxiomInstance& i, const auto& pv) {
        return triple(a_and(emp_all(pv), bool_to_assertion(i.b)), c_assume(i.b), emp_all(pv));
    });
    add(t, "Load", logic, std::nullopt, K::Load, Outcome::Ok, [m](const AxiomInstance& i, const auto& pv) {
        const AstPtr pure = m.load_forgets_value ? emp_without(pv, i.x)
                                                 : a_and(emp_without(pv, i.x), eq(mirror(i.x), zval(i)));
        return triple(a_sep(pure, a_points_to(i.y, zval(i))), c_load(i.x, i.y),
                      a_sep(a_and(emp_without(pv, i.x), eq(var(i.x), mirror(i.x))), a_points_to(i.y, zval(i))));
    });
    add_store_axiom(t, logic);
}

} // namespace

std::vector<AxiomSchema> axiom_table(LogicId logic, const Mutations& m) {
    std::vector<AxiomSchema> t;
    switch (logic) {
    case LogicId::SlPlus:
        add_forward_axioms(t, logic, m);
        break;
    case LogicId::IslPlus:
        add_forward_axioms(t, logic, m);
        add_error_axioms(t);
        break;
    case LogicId::SilPlus:
    case LogicId::NcPlus:
        add_backward_axioms(t, logic, m);
        break;
    }
    return t;
}

std::vector<AxiomSchema> available_axioms(LogicId logic, Model model, bool reserved, const Mutations& m) {
    std::vector<AxiomSchema> out;
    for (auto& s : axiom_table(logic, m)) {
        if ((s.model && *s.model != model) || (s.needs_reserved && !reserved)) {
            continue;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> structural_rules(LogicId logic) {
    switch (logic) {
    case LogicId::SlPlus:
    case LogicId::NcPlus:
        return {"Frame", "Exists", "Cons", "Seq", "Choice", "Disj", "Empty", "Iterate"};
    case LogicId::IslPlus:
        return {"Frame", "Exists", "Cons", "Seq", "SeqEr", "Choice", "Disj", "Empty", "Iterate", "IterateZero",
                "Iter"};
    case LogicId::SilPlus:
        return {"Frame", "Exists", "Cons", "Seq", "Choice", "Disj", "Empty", "Iterate", "IterateZero", "Iter"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Checking

namespace {

std::string canonical_rule(const std::string& name) { return name == "Free" ? "Free1" : name; }

// Metavariable values of an axiom application, read off the command and the
// explicit substitution.
AxiomInstance instance_for(const Derivation& d) {
    AxiomInstance i;
    const Command& c = *d.conclusion.cmd;
    i.x = c.x.empty() ? i.x : c.x;
    i.y = c.y.empty() ? i.y : c.y;
    i.e = c.e;
    i.b = c.b;
    for (const auto& [k, v] : d.subst) {
        if (k == "z'") {
            i.z = parse_expr(v);
            for (const auto& name : free_vars(*i.z)) {
                if (!DomainConfig::is_logical_name(name)) {
                    throw ConfigError("z' must be instantiated over logical variables, got " + v);
                }
            }
        } else if (k == "l'") {
            if (!DomainConfig::is_logical_name(v)) {
                throw ConfigError("l' must be instantiated by a logical variable, got " + v);
            }
            i.l = v;
        } else if (k == "x" || k == "y" || k == "e" || k == "b") {
            // Determined by the command; a stated value must agree with it.
            const bool agrees = k == "x"   ? v == c.x
                                : k == "y" ? v == c.y
                                : k == "e" ? c.e && equal(*parse_expr(v), *c.e)
                                           : c.b && equal(*parse_bool(v), *c.b);
            if (!agrees) {
                throw ConfigError("metavariable " + k + " = " + v + " does not match the command " + to_string(c));
            }
        } else {
            throw ConfigError("unknown metavariable '" + k + "'");
        }
    }
    return i;
}

const AxiomSchema* find_schema(const std::vector<AxiomSchema>& table, const std::string& rule) {
    const std::string name = canonical_rule(rule);
    for (const auto& s : table) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

void collect(const AstPtr& a, VarSet& out) {
    if (a) {
        const VarSet vs = all_vars(*a);
        out.insert(vs.begin(), vs.end());
    }
}

void collect_vars(const Derivation& d, LogicId logic, const std::vector<std::string>& pv, VarSet& out) {
    collect(d.conclusion.pre, out);
    collect(d.conclusion.post, out);
    collect(d.frame, out);
    out.insert(d.exists.begin(), d.exists.end());
    if (const AxiomSchema* s = find_schema(axiom_table(logic), d.rule)) {
        try {
            const LogicalTriple inst = s->build(instance_for(d), pv);
            collect(inst.pre, out);
            collect(inst.post, out);
        } catch (const Error&) {
            // Reported when the node is checked.
        }
    }
    for (const auto& p : d.premises) {
        collect_vars(p, p.logic ? p.logic->id : logic, pv, out);
    }
}

class Checker {
  public:
    Checker(Logic logic, UniversePtr u, const CheckOptions& opts, bool reserved)
        : logic_(logic), u_(std::move(u)), opts_(opts),
          axioms_(available_axioms(logic.id, logic.model, reserved, opts.mutations)),
          all_axioms_(axiom_table(logic.id, opts.mutations)),
          cache_(opts.cache ? opts.cache : std::make_shared<AssertionCache>()) {}

    Verdict run(const Derivation& d) {
        Verdict v;
        v.accepted = visit(d, v.path, v.reason);
        if (v.accepted) {
            v.path.clear();
        }
        return v;
    }

  private:
    bool visit(const Derivation& d, std::vector<std::string>& path, std::string& reason) {
        path.push_back(d.rule);
        if (d.logic && (d.logic->id != logic_.id || d.logic->model != logic_.model)) {
            reason = "node is in " + to_string(*d.logic) + " but the derivation is in " + to_string(logic_);
            return false;
        }
        for (const auto& p : d.premises) {
            if (!visit(p, path, reason)) {
                return false;
            }
        }
        try {
            reason = check_node(d);
        } catch (const Error& e) {
            reason = e.what();
        }
        if (!reason.empty()) {
            return false;
        }
        path.pop_back();
        return true;
    }

    const MemorySet& sem(const AstPtr& a) {
        const std::string key = to_string(*a);
        auto it = cache_->find(key);
        if (it == cache_->end()) {
            it = cache_->emplace(key, eval_assertion(*a, u_)).first;
        }
        return it->second;
    }
    bool same(const AstPtr& a, const AstPtr& b) { return equal(*a, *b) || sem(a) == sem(b); }
    bool entails(const AstPtr& a, const AstPtr& b) { return sem(a).subset_of(sem(b)); }

    static std::string show(const AstPtr& a) { return to_string(*a); }

    std::string expect_same(const AstPtr& got, const AstPtr& want, const std::string& what) {
        return same(got, want) ? "" : what + " " + show(got) + " differs from " + show(want);
    }

    std::string check_node(const Derivation& d) {
        const LogicalTriple& c = d.conclusion;
        for (const auto& v : command_vars(*c.cmd)) {
            if (!u_->config().is_program_var(v)) {
                throw ConfigError("unknown program variable '" + v + "'");
            }
        }
        if (logic_.id != LogicId::IslPlus && c.outcome != Outcome::Ok) {
            return "outcome tags are only meaningful in isl+";
        }
        if (find_schema(all_axioms_, d.rule)) {
            return check_axiom(d);
        }
        const auto rules = structural_rules(logic_.id);
        if (std::find(rules.begin(), rules.end(), d.rule) == rules.end()) {
            throw UnknownRule("unknown rule '" + d.rule + "' for " + to_string(logic_.id));
        }
        return check_structural(d);
    }

    std::string check_axiom(const Derivation& d) {
        if (!d.premises.empty()) {
            return "axioms take no premises";
        }
        const AxiomSchema* s = find_schema(axioms_, d.rule);
        if (!s) {
            return "axiom " + canonical_rule(d.rule) + " is not available in " + to_string(logic_);
        }
        const LogicalTriple& c = d.conclusion;
        if (c.cmd->kind != s->command) {
            return "axiom " + s->name + " does not apply to " + to_string(*c.cmd);
        }
        const LogicalTriple inst = s->build(instance_for(d), u_->config().program_vars);
        if (!equal(*inst.cmd, *c.cmd)) {
            return "command differs from the axiom instance " + to_string(inst);
        }
        if (inst.outcome != c.outcome) {
            return "outcome differs from the axiom instance " + to_string(inst);
        }
        if (!same(c.pre, inst.pre) || !same(c.post, inst.post)) {
            return "conclusion is not the axiom instance " + to_string(inst);
        }
        return "";
    }

    std::string premises(const Derivation& d, std::size_t n) {
        if (d.premises.size() != n) {
            return d.rule + " expects " + std::to_string(n) + " premise(s), got " +
                   std::to_string(d.premises.size());
        }
        return "";
    }

    std::string same_outcome(const LogicalTriple& c, const LogicalTriple& p) {
        return c.outcome == p.outcome ? "" : "outcome of the conclusion differs from the premise";
    }

    std::string check_structural(const Derivation& d) {
        const LogicalTriple& c = d.conclusion;
        const LogicId L = logic_.id;
        const bool forward_frame = L == LogicId::SlPlus || L == LogicId::IslPlus;
        std::string r;

        if (d.rule == "Frame") {
            if (!(r = premises(d, 1)).empty()) {
                return r;
            }
            const LogicalTriple& p = d.premises[0].conclusion;
            if (!d.frame) {
                return "Frame needs a :frame assertion";
            }
            if (!is_universal_frame(*d.frame)) {
                return "frame " + show(d.frame) + " mentions program variables";
            }
            if (!opts_.mutations.frame_skips_compat) {
                const AstPtr& side = forward_frame ? p.pre : p.post;
                if (!heap_compat_logical(*side, *d.frame, u_)) {
                    return std::string("frame ") + show(d.frame) + " is not heap-compatible with the " +
                           (forward_frame ? "precondition " : "postcondition ") + show(side);
                }
            }
            if (!equal(*c.cmd, *p.cmd)) {
                return "Frame changes the command";
            }
            if (!(r = same_outcome(c, p)).empty()) {
                return r;
            }
            if (!(r = expect_same(c.pre, a_sep(p.pre, d.frame), "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, a_sep(p.post, d.frame), "postcondition");
        }

        if (d.rule == "Exists") {
            if (!(r = premises(d, 1)).empty()) {
                return r;
            }
            const LogicalTriple& p = d.premises[0].conclusion;
            for (const auto& x : d.exists) {
                if (!DomainConfig::is_logical_name(x)) {
                    return "Exists may only quantify logical variables, got " + x;
                }
            }
            if (!equal(*c.cmd, *p.cmd)) {
                return "Exists changes the command";
            }
            if (!(r = same_outcome(c, p)).empty()) {
                return r;
            }
            const AstPtr pre = d.exists.empty() ? p.pre : a_exists(d.exists, p.pre);
            const AstPtr post = d.exists.empty() ? p.post : a_exists(d.exists, p.post);
            if (!(r = expect_same(c.pre, pre, "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, post, "postcondition");
        }

        if (d.rule == "Cons") {
            if (!(r = premises(d, 1)).empty()) {
                return r;
            }
            const LogicalTriple& p = d.premises[0].conclusion;
            if (!equal(*c.cmd, *p.cmd)) {
                return "Cons changes the command";
            }
            if (!(r = same_outcome(c, p)).empty()) {
                return r;
            }
            // Over-approximating forward and under-approximating backward
            // systems strengthen the pre and weaken the post; the other two
            // go the opposite way.
            const bool strengthen_pre = L == LogicId::SlPlus || L == LogicId::SilPlus;
            bool post_ok = strengthen_pre ? entails(p.post, c.post) : entails(c.post, p.post);
            if (opts_.mutations.cons_flipped) {
                post_ok = strengthen_pre ? entails(c.post, p.post) : entails(p.post, c.post);
            }
            const bool pre_ok = strengthen_pre ? entails(c.pre, p.pre) : entails(p.pre, c.pre);
            if (!pre_ok) {
                return "precondition " + show(c.pre) + (strengthen_pre ? " does not entail " : " is not entailed by ") +
                       show(p.pre);
            }
            if (!post_ok) {
                return "postcondition " + show(c.post) +
                       (strengthen_pre ? " is not entailed by " : " does not entail ") + show(p.post);
            }
            return "";
        }

        if (d.rule == "Seq") {
            if (!(r = premises(d, 2)).empty()) {
                return r;
            }
            const LogicalTriple& p1 = d.premises[0].conclusion;
            const LogicalTriple& p2 = d.premises[1].conclusion;
            if (c.cmd->kind != Command::Kind::Seq || !equal(*c.cmd->c1, *p1.cmd) || !equal(*c.cmd->c2, *p2.cmd)) {
                return "command is not the sequence of the premises' commands";
            }
            if (L == LogicId::IslPlus && p1.outcome != Outcome::Ok) {
                return "first premise of Seq must be an ok triple";
            }
            if (!(r = same_outcome(c, p2)).empty()) {
                return r;
            }
            if (!(r = expect_same(p2.pre, p1.post, "middle assertion")).empty()) {
                return r;
            }
            if (!(r = expect_same(c.pre, p1.pre, "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, p2.post, "postcondition");
        }

        if (d.rule == "SeqEr") {
            if (!(r = premises(d, 1)).empty()) {
                return r;
            }
            const LogicalTriple& p = d.premises[0].conclusion;
            if (c.cmd->kind != Command::Kind::Seq || !equal(*c.cmd->c1, *p.cmd)) {
                return "command must start with the premise's command";
            }
            if (p.outcome != Outcome::Er || c.outcome != Outcome::Er) {
                return "SeqEr needs er triples";
            }
            if (!(r = expect_same(c.pre, p.pre, "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, p.post, "postcondition");
        }

        if (d.rule == "Choice") {
            if (!(r = premises(d, 2)).empty()) {
                return r;
            }
            const LogicalTriple& p1 = d.premises[0].conclusion;
            const LogicalTriple& p2 = d.premises[1].conclusion;
            if (c.cmd->kind != Command::Kind::Choice || !equal(*c.cmd->c1, *p1.cmd) ||
                !equal(*c.cmd->c2, *p2.cmd)) {
                return "command is not the choice of the premises' commands";
            }
            if (!(r = same_outcome(c, p1)).empty() || !(r = same_outcome(c, p2)).empty()) {
                return r;
            }
            const AstPtr pre =
                L == LogicId::SilPlus ? a_or(p1.pre, p2.pre) : nullptr;
            const AstPtr post = L == LogicId::IslPlus ? a_or(p1.post, p2.post) : nullptr;
            if (pre) {
                if (!(r = expect_same(c.pre, pre, "precondition")).empty()) {
                    return r;
                }
            } else if (!(r = expect_same(p1.pre, c.pre, "first premise precondition")).empty() ||
                       !(r = expect_same(p2.pre, c.pre, "second premise precondition")).empty()) {
                return r;
            }
            if (post) {
                return expect_same(c.post, post, "postcondition");
            }
            if (!(r = expect_same(p1.post, c.post, "first premise postcondition")).empty()) {
                return r;
            }
            return expect_same(p2.post, c.post, "second premise postcondition");
        }

        if (d.rule == "Disj") {
            if (d.premises.empty()) {
                return "Disj needs at least one premise";
            }
            std::vector<AstPtr> pres;
            std::vector<AstPtr> posts;
            for (const auto& pd : d.premises) {
                const LogicalTriple& p = pd.conclusion;
                if (!equal(*c.cmd, *p.cmd)) {
                    return "Disj premises must share the command";
                }
                if (!(r = same_outcome(c, p)).empty()) {
                    return r;
                }
                pres.push_back(p.pre);
                posts.push_back(p.post);
            }
            if (!(r = expect_same(c.pre, a_or_all(pres), "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, a_or_all(posts), "postcondition");
        }

        if (d.rule == "Empty") {
            if (!(r = premises(d, 0)).empty()) {
                return r;
            }
            const bool on_pre = L == LogicId::SlPlus || L == LogicId::SilPlus;
            const AstPtr& side = on_pre ? c.pre : c.post;
            return sem(side).no_memories() ? ""
                                          : std::string(on_pre ? "precondition" : "postcondition") +
                                                " of Empty must be unsatisfiable";
        }

        if (d.rule == "Iterate") {
            if (!(r = premises(d, 1)).empty()) {
                return r;
            }
            const LogicalTriple& p = d.premises[0].conclusion;
            if (c.cmd->kind != Command::Kind::Star) {
                return "Iterate concludes about a starred command";
            }
            if (!(r = same_outcome(c, p)).empty()) {
                return r;
            }
            if (L == LogicId::SlPlus || L == LogicId::NcPlus) {
                if (!equal(*c.cmd->c1, *p.cmd)) {
                    return "premise must be about the loop body";
                }
                if (!(r = expect_same(p.post, p.pre, "premise postcondition")).empty() ||
                    !(r = expect_same(c.pre, p.pre, "precondition")).empty()) {
                    return r;
                }
                return expect_same(c.post, p.pre, "postcondition");
            }
            if (p.cmd->kind != Command::Kind::Seq || !equal(*p.cmd->c1, *c.cmd) ||
                !equal(*p.cmd->c2, *c.cmd->c1)) {
                return "premise must be about r*;r";
            }
            if (!(r = expect_same(c.pre, p.pre, "precondition")).empty()) {
                return r;
            }
            return expect_same(c.post, p.post, "postcondition");
        }

        if (d.rule == "IterateZero") {
            if (!(r = premises(d, 0)).empty()) {
                return r;
            }
            if (c.cmd->kind != Command::Kind::Star) {
                return "IterateZero concludes about a starred command";
            }
            if (c.outcome != Outcome::Ok) {
                return "IterateZero only yields ok triples";
            }
            return expect_same(c.post, c.pre, "postcondition");
        }

        if (d.rule == "Iter") {
            if (d.premises.empty()) {
                return "Iter needs at least one premise";
            }
            if (c.cmd->kind != Command::Kind::Star) {
                return "Iter concludes about a starred command";
            }
            std::vector<AstPtr> all;
            for (std::size_t i = 0; i < d.premises.size(); ++i) {
                const LogicalTriple& p = d.premises[i].conclusion;
                if (!equal(*p.cmd, *c.cmd->c1)) {
                    return "premise must be about the loop body";
                }
                if (p.outcome != Outcome::Ok || c.outcome != Outcome::Ok) {
                    return "Iter only combines ok triples";
                }
                if (L == LogicId::IslPlus) {
                    // P0 r P1, P1 r P2, ... chain forwards.
                    if (i == 0) {
                        all.push_back(p.pre);
                    } else if (!(r = expect_same(p.pre, d.premises[i - 1].conclusion.post, "chained assertion"))
                                    .empty()) {
                        return r;
                    }
                    all.push_back(p.post);
                } else {
                    // Q1 r Q0, Q2 r Q1, ... chain backwards.
                    if (i == 0) {
                        all.push_back(p.post);
                    } else if (!(r = expect_same(p.post, d.premises[i - 1].conclusion.pre, "chained assertion"))
                                    .empty()) {
                        return r;
                    }
                    all.push_back(p.pre);
                }
            }
            if (L == LogicId::IslPlus) {
                if (!(r = expect_same(c.pre, all.front(), "precondition")).empty()) {
                    return r;
                }
                return expect_same(c.post, a_or_all(all), "postcondition");
            }
            if (!(r = expect_same(c.post, all.front(), "postcondition")).empty()) {
                return r;
            }
            return expect_same(c.pre, a_or_all(all), "precondition");
        }

        throw UnknownRule("unknown rule '" + d.rule + "'");
    }

    Logic logic_;
    UniversePtr u_;
    const CheckOptions& opts_;
    std::vector<AxiomSchema> axioms_;
    std::vector<AxiomSchema> all_axioms_;
    std::shared_ptr<AssertionCache> cache_;
};

Logic root_logic(const Derivation& d, const CheckOptions& opts) {
    return d.logic ? *d.logic : Logic{LogicId::SlPlus, opts.base.model};
}

} // namespace

UniversePtr derivation_universe(const Derivation& d, const CheckOptions& opts) {
    if (opts.universe) {
        return opts.universe;
    }
    const Logic logic = root_logic(d, opts);
    VarSet vars;
    collect_vars(d, logic.id, opts.base.program_vars, vars);
    std::vector<std::string> extra;
    for (const auto& v : vars) {
        if (DomainConfig::is_logical_name(v)) {
            extra.push_back(v);
        }
    }
    for (const auto& v : opts.base.logical_vars) {
        if (vars.count(v)) {
            extra.push_back(v);
        }
    }
    const bool reserved = opts.reserved.value_or(default_reserved(logic.id));
    return make_universe(make_config(opts.base.num_values, opts.base.locations, opts.base.program_vars, extra,
                                     logic.model, reserved));
}

Verdict check_derivation(const Derivation& d, const CheckOptions& opts) {
    const Logic logic = root_logic(d, opts);
    const bool reserved = opts.reserved.value_or(default_reserved(logic.id));
    UniversePtr u;
    try {
        u = derivation_universe(d, opts);
    } catch (const Error& e) {
        return Verdict{false, {d.rule}, e.what()};
    }
    Checker checker(logic, u, opts, reserved);
    return checker.run(d);
}

// ---------------------------------------------------------------------------
// Derivation files

namespace {

struct SExpr {
    enum class Kind { Symbol, String, List } kind;
    std::string text;
    std::vector<SExpr> items;
    std::size_t pos = 0;
};

class SReader {
  public:
    explicit SReader(const std::string& s) : s_(s) {}

    bool at_end() {
        skip();
        return i_ >= s_.size();
    }

    SExpr read() {
        skip();
        if (i_ >= s_.size()) {
            throw ParseError("unexpected end of input", i_);
        }
        SExpr e;
        e.pos = i_;
        const char ch = s_[i_];
        if (ch == '(') {
            ++i_;
            e.kind = SExpr::Kind::List;
            for (;;) {
                skip();
                if (i_ >= s_.size()) {
                    throw ParseError("unclosed '('", e.pos);
                }
                if (s_[i_] == ')') {
                    ++i_;
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (ch == ')') {
            throw ParseError("unexpected ')'", i_);
        }
        if (ch == '"') {
            ++i_;
            e.kind = SExpr::Kind::String;
            for (;;) {
                if (i_ >= s_.size()) {
                    throw ParseError("unterminated string", e.pos);
                }
                char c = s_[i_++];
                if (c == '"') {
                    return e;
                }
                if (c == '\\') {
                    if (i_ >= s_.size()) {
                        throw ParseError("unterminated string", e.pos);
                    }
                    c = s_[i_++];
                }
                e.text += c;
            }
        }
        e.kind = SExpr::Kind::Symbol;
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' &&
               s_[i_] != ')' && s_[i_] != '"' && s_[i_] != ';') {
            e.text += s_[i_++];
        }
        return e;
    }

  private:
    void skip() {
        while (i_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
                ++i_;
            } else if (s_[i_] == ';') {
                while (i_ < s_.size() && s_[i_] != '\n') {
                    ++i_;
                }
            } else {
                break;
            }
        }
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

std::string atom(const SExpr& e, const char* what) {
    if (e.kind == SExpr::Kind::List) {
        throw ParseError(std::string("expected ") + what, e.pos);
    }
    return e.text;
}

// Re-raises errors from the embedded parsers at the position of the string.
template <typename F>
auto embedded(const SExpr& e, F&& f) {
    try {
        return f(atom(e, "a string"));
    } catch (const ParseError& err) {
        throw ParseError(err.what(), e.pos + 1 + err.position());
    }
}

std::vector<std::string> split_names(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(cur);
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

Derivation to_derivation(const SExpr& e) {
    if (e.kind != SExpr::Kind::List || e.items.size() < 2 || e.items[0].kind != SExpr::Kind::Symbol ||
        e.items[0].text != "rule") {
        throw ParseError("expected (rule NAME ...)", e.pos);
    }
    Derivation d;
    d.rule = atom(e.items[1], "a rule name");
    bool has_conclusion = false;
    for (std::size_t i = 2; i < e.items.size(); ++i) {
        const SExpr& it = e.items[i];
        if (it.kind == SExpr::Kind::List) {
            d.premises.push_back(to_derivation(it));
            continue;
        }
        if (it.kind != SExpr::Kind::Symbol || it.text.empty() || it.text[0] != ':') {
            throw ParseError("expected a :keyword or a premise", it.pos);
        }
        if (i + 1 >= e.items.size()) {
            throw ParseError("missing value for " + it.text, it.pos);
        }
        const SExpr& val = e.items[++i];
        if (it.text == ":logic") {
            const std::string s = atom(val, "a logic");
            if (s.empty() || (s.back() != '1' && s.back() != '2')) {
                throw ParseError("logic must name the model, e.g. sl+1", val.pos);
            }
            try {
                d.logic = parse_logic(s, Model::One);
            } catch (const ParseError&) {
                throw ParseError("unknown logic '" + s + "'", val.pos);
            }
        } else if (it.text == ":conclusion") {
            d.conclusion = embedded(val, [](const std::string& s) { return parse_triple(s); });
            has_conclusion = true;
        } else if (it.text == ":frame") {
            d.frame = embedded(val, [](const std::string& s) { return parse_assertion(s); });
        } else if (it.text == ":exists") {
            d.exists = split_names(atom(val, "variable names"));
        } else if (it.text == ":subst") {
            if (val.kind != SExpr::Kind::List) {
                throw ParseError("expected a list of (name . \"value\") pairs", val.pos);
            }
            for (const SExpr& pair : val.items) {
                const bool dotted = pair.kind == SExpr::Kind::List && pair.items.size() == 3 &&
                                    pair.items[1].kind == SExpr::Kind::Symbol && pair.items[1].text == ".";
                const bool plain = pair.kind == SExpr::Kind::List && pair.items.size() == 2;
                if (!dotted && !plain) {
                    throw ParseError("expected (name . \"value\")", pair.pos);
                }
                d.subst[atom(pair.items[0], "a name")] = atom(pair.items.back(), "a value");
            }
        } else {
            throw ParseError("unknown keyword " + it.text, it.pos);
        }
    }
    if (!has_conclusion) {
        throw ParseError("rule " + d.rule + " lacks a :conclusion", e.pos);
    }
    return d;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

std::vector<Derivation> parse_derivations(const std::string& text) {
    SReader reader(text);
    std::vector<Derivation> out;
    while (!reader.at_end()) {
        out.push_back(to_derivation(reader.read()));
    }
    return out;
}

std::string to_sexpr(const Derivation& d, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    std::ostringstream os;
    os << pad << "(rule " << d.rule;
    if (d.logic) {
        os << " :logic " << to_string(*d.logic);
    }
    os << "\n" << pad << "  :conclusion " << quote(to_string(d.conclusion));
    if (d.frame) {
        os << "\n" << pad << "  :frame " << quote(to_string(*d.frame));
    }
    if (!d.exists.empty()) {
        std::string names;
        for (const auto& x : d.exists) {
            names += (names.empty() ? "" : ", ") + x;
        }
        os << "\n" << pad << "  :exists " << quote(names);
    }
    if (!d.subst.empty()) {
        os << "\n" << pad << "  :subst (";
        bool first = true;
        for (const auto& [k, v] : d.subst) {
            os << (first ? "" : " ") << "(" << k << " . " << quote(v) << ")";
            first = false;
        }
        os << ")";
    }
    for (const auto& p : d.premises) {
        os << "\n" << to_sexpr(p, indent + 2);
    }
    os << ")";
    return os.str();
}

} // namespace sepkit
