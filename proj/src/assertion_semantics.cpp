#include "sepkit/assertion_semantics.hpp"

#include <algorithm>
#include <set>

namespace sepkit {

namespace {

void require_vars(const Assertion& a, const Universe& u) {
    for (const auto& v : all_vars(a)) {
        u.require_var(v);
    }
}

void check_cell_kind(const Universe& u, DnfCell::Kind k) {
    if (k == DnfCell::Kind::Dealloc && u.dealloc_state() < 0) {
        throw ModelMismatch("a deallocated cell (!->) is not expressible under model 1");
    }
    if (k == DnfCell::Kind::Reserved && u.reserved_state() < 0) {
        throw ModelMismatch("a reserved cell (#->) requires reserved cells to be enabled");
    }
}

// Singleton-cell assertion at the address held by variable `x`.
MemorySet eval_cell(const Universe& u, const UniversePtr& up, const std::string& x,
                    const std::function<void(std::uint64_t, int, MemorySet&)>& emit) {
    MemorySet r(up);
    const int xi = u.require_var(x);
    for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
        const int loc = u.location_index(u.get(st, xi));
        if (loc >= 0) {
            emit(st, loc, r);
        }
    }
    return r;
}

MemorySet eval_rec(const Assertion& a, const UniversePtr& up) {
    const Universe& u = *up;
    using K = Assertion::Kind;
    switch (a.kind) {
    case K::False:
        return MemorySet(up);
    case K::True:
        return MemorySet::all(up);
    case K::Cmp: {
        MemorySet r(up);
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            if (eval_cmp(a.op, eval_expr(*a.lhs, u, st), eval_expr(*a.rhs, u, st))) {
                r.fill_block(st);
            }
        }
        return r;
    }
    case K::And:
        return eval_rec(*a.a, up) & eval_rec(*a.b, up);
    case K::Or:
        return eval_rec(*a.a, up) | eval_rec(*a.b, up);
    case K::Sep:
        return set_join(eval_rec(*a.a, up), eval_rec(*a.b, up));
    case K::Exists:
        return exists_lift(a.vars, eval_rec(*a.a, up));
    case K::Emp: {
        MemorySet r(up);
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            r.set(st, 0);
        }
        return r;
    }
    case K::EmpVars:
        return eval_rec(*expand_emp_vars(std::make_shared<const Assertion>(a)), up);
    case K::PointsTo:
        return eval_cell(u, up, a.x, [&](std::uint64_t st, int loc, MemorySet& r) {
            if (a.value) {
                const Value v = eval_expr(*a.value, u, st);
                r.set(st, u.single_cell_heap(loc, u.state_of_value(v)));
                return;
            }
            for (Value v : u.all_values()) {
                r.set(st, u.single_cell_heap(loc, u.state_of_value(v)));
            }
        });
    case K::NotPointsTo:
        check_cell_kind(u, DnfCell::Kind::Dealloc);
        return eval_cell(u, up, a.x, [&](std::uint64_t st, int loc, MemorySet& r) {
            r.set(st, u.single_cell_heap(loc, u.dealloc_state()));
        });
    case K::Reserved:
        check_cell_kind(u, DnfCell::Kind::Reserved);
        return eval_cell(u, up, a.x, [&](std::uint64_t st, int loc, MemorySet& r) {
            r.set(st, u.single_cell_heap(loc, u.reserved_state()));
        });
    }
    return MemorySet(up);
}

} // namespace

MemorySet eval_assertion(const Assertion& a, const UniversePtr& u) {
    require_vars(a, *u);
    return eval_rec(a, u);
}

// ---------------------------------------------------------------------------
// DNF construction

namespace {

bool is_closed(const Expr& e) { return free_vars(e).empty(); }

// Simplifies a disjunct whose literals or addresses became closed after
// substitution.  Returns false when the disjunct is unsatisfiable.
bool simplify(DnfDisjunct& d, const Universe& u) {
    std::vector<DnfLiteral> kept;
    for (auto& lit : d.pure) {
        if (is_closed(*lit.lhs) && is_closed(*lit.rhs)) {
            if (!eval_cmp(lit.op, eval_expr(*lit.lhs, u, 0), eval_expr(*lit.rhs, u, 0))) {
                return false;
            }
            continue;
        }
        kept.push_back(lit);
    }
    d.pure = std::move(kept);
    std::set<Value> const_addrs;
    for (const auto& c : d.cells) {
        if (is_closed(*c.addr)) {
            const Value a = eval_expr(*c.addr, u, 0);
            if (u.location_index(a) < 0 || !const_addrs.insert(a).second) {
                return false;
            }
        }
    }
    return true;
}

DnfDisjunct subst_disjunct(const DnfDisjunct& d, const std::string& x, const ExprPtr& by) {
    DnfDisjunct r;
    r.top = d.top;
    for (const auto& lit : d.pure) {
        r.pure.push_back({subst(lit.lhs, x, by), lit.op, subst(lit.rhs, x, by)});
    }
    for (const auto& c : d.cells) {
        r.cells.push_back({subst(c.addr, x, by), c.kind, c.value ? subst(c.value, x, by) : nullptr});
    }
    return r;
}

bool merge_content(const DnfCell& a, const DnfCell& b, DnfCell& out, std::vector<DnfLiteral>& lits) {
    using CK = DnfCell::Kind;
    out = a;
    if (a.kind == CK::Any) {
        out.kind = b.kind;
        out.value = b.value;
        return b.kind == CK::Val || b.kind == CK::Any;
    }
    if (a.kind == CK::Val) {
        if (b.kind == CK::Any) {
            return true;
        }
        if (b.kind == CK::Val) {
            lits.push_back({a.value, CmpOp::Eq, b.value});
            return true;
        }
        return false;
    }
    return a.kind == b.kind;
}

// Every way a heap can satisfy both disjuncts: each cell of one side is
// either identified with a cell of the other side or, when the other side
// admits extra cells, left unmatched.
void conjoin(const DnfDisjunct& d1, const DnfDisjunct& d2, std::vector<DnfDisjunct>& out) {
    const std::size_t n1 = d1.cells.size();
    const std::size_t n2 = d2.cells.size();
    std::vector<int> match(n1, -1);
    std::vector<bool> used(n2, false);
    std::function<void(std::size_t)> go = [&](std::size_t i) {
        if (i == n1) {
            if (!d1.top) {
                for (std::size_t j = 0; j < n2; ++j) {
                    if (!used[j]) {
                        return;
                    }
                }
            }
            DnfDisjunct r;
            r.top = d1.top && d2.top;
            r.pure = d1.pure;
            r.pure.insert(r.pure.end(), d2.pure.begin(), d2.pure.end());
            for (std::size_t k = 0; k < n1; ++k) {
                if (match[k] < 0) {
                    r.cells.push_back(d1.cells[k]);
                    continue;
                }
                const DnfCell& c2 = d2.cells[static_cast<std::size_t>(match[k])];
                DnfCell merged;
                if (!merge_content(d1.cells[k], c2, merged, r.pure)) {
                    return;
                }
                r.pure.push_back({d1.cells[k].addr, CmpOp::Eq, c2.addr});
                r.cells.push_back(merged);
            }
            for (std::size_t j = 0; j < n2; ++j) {
                if (!used[j]) {
                    r.cells.push_back(d2.cells[j]);
                }
            }
            out.push_back(std::move(r));
            return;
        }
        if (d2.top) {
            go(i + 1);
        }
        for (std::size_t j = 0; j < n2; ++j) {
            if (!used[j]) {
                used[j] = true;
                match[i] = static_cast<int>(j);
                go(i + 1);
                match[i] = -1;
                used[j] = false;
            }
        }
    };
    go(0);
}

std::vector<DnfDisjunct> finish(std::vector<DnfDisjunct> ds, const Universe& u) {
    std::vector<DnfDisjunct> r;
    std::set<std::string> seen;
    for (auto& d : ds) {
        if (simplify(d, u) && seen.insert(to_string(d)).second) {
            r.push_back(std::move(d));
        }
    }
    return r;
}

std::vector<DnfDisjunct> dnf_rec(const Assertion& a, const Universe& u) {
    using K = Assertion::Kind;
    using CK = DnfCell::Kind;
    switch (a.kind) {
    case K::False:
        return {};
    case K::True:
        return {DnfDisjunct{{}, {}, true}};
    case K::Cmp:
        return finish({DnfDisjunct{{{a.lhs, a.op, a.rhs}}, {}, true}}, u);
    case K::Emp:
        return {DnfDisjunct{{}, {}, false}};
    case K::EmpVars:
        return dnf_rec(*expand_emp_vars(std::make_shared<const Assertion>(a)), u);
    case K::PointsTo:
        return {DnfDisjunct{{}, {{e_var(a.x), a.value ? CK::Val : CK::Any, a.value}}, false}};
    case K::NotPointsTo:
        check_cell_kind(u, CK::Dealloc);
        return {DnfDisjunct{{}, {{e_var(a.x), CK::Dealloc, nullptr}}, false}};
    case K::Reserved:
        check_cell_kind(u, CK::Reserved);
        return {DnfDisjunct{{}, {{e_var(a.x), CK::Reserved, nullptr}}, false}};
    case K::Or: {
        auto l = dnf_rec(*a.a, u);
        auto r = dnf_rec(*a.b, u);
        l.insert(l.end(), r.begin(), r.end());
        return finish(std::move(l), u);
    }
    case K::Sep: {
        const auto l = dnf_rec(*a.a, u);
        const auto r = dnf_rec(*a.b, u);
        std::vector<DnfDisjunct> out;
        for (const auto& d1 : l) {
            for (const auto& d2 : r) {
                DnfDisjunct d;
                d.top = d1.top || d2.top;
                d.pure = d1.pure;
                d.pure.insert(d.pure.end(), d2.pure.begin(), d2.pure.end());
                d.cells = d1.cells;
                d.cells.insert(d.cells.end(), d2.cells.begin(), d2.cells.end());
                out.push_back(std::move(d));
            }
        }
        return finish(std::move(out), u);
    }
    case K::And: {
        const auto l = dnf_rec(*a.a, u);
        const auto r = dnf_rec(*a.b, u);
        std::vector<DnfDisjunct> out;
        for (const auto& d1 : l) {
            for (const auto& d2 : r) {
                conjoin(d1, d2, out);
            }
        }
        return finish(std::move(out), u);
    }
    case K::Exists: {
        std::vector<DnfDisjunct> cur = dnf_rec(*a.a, u);
        for (const auto& x : a.vars) {
            std::vector<DnfDisjunct> next;
            for (const auto& d : cur) {
                for (Value v : u.all_values()) {
                    next.push_back(subst_disjunct(d, x, e_const(v)));
                }
            }
            cur = finish(std::move(next), u);
        }
        return cur;
    }
    }
    return {};
}

// Location indices of the cell addresses at `st`, or false when some
// address is not a location or two addresses coincide.
bool cell_locations(const DnfDisjunct& d, const Universe& u, std::uint64_t st, std::vector<int>& locs) {
    locs.clear();
    std::uint32_t seen = 0;
    for (const auto& c : d.cells) {
        const int loc = u.location_index(eval_expr(*c.addr, u, st));
        if (loc < 0 || (seen >> loc) & 1U) {
            return false;
        }
        seen |= 1U << loc;
        locs.push_back(loc);
    }
    return true;
}

bool pure_holds(const DnfDisjunct& d, const Universe& u, std::uint64_t st) {
    for (const auto& lit : d.pure) {
        if (!eval_cmp(lit.op, eval_expr(*lit.lhs, u, st), eval_expr(*lit.rhs, u, st))) {
            return false;
        }
    }
    return true;
}

} // namespace

DnfAssertion to_dnf(const Assertion& a, const UniversePtr& u) {
    require_vars(a, *u);
    return DnfAssertion{u, dnf_rec(a, *u)};
}

MemorySet eval_disjunct(const DnfDisjunct& d, const UniversePtr& up) {
    const Universe& u = *up;
    for (const auto& c : d.cells) {
        check_cell_kind(u, c.kind);
    }
    MemorySet r(up);
    std::vector<int> locs;
    for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
        if (!pure_holds(d, u, st) || !cell_locations(d, u, st, locs)) {
            continue;
        }
        std::uint32_t mask = 0;
        std::vector<int> want(locs.size(), -1); // required cell state, -1 for any value
        for (std::size_t k = 0; k < locs.size(); ++k) {
            mask |= 1U << locs[k];
            const DnfCell& c = d.cells[k];
            switch (c.kind) {
            case DnfCell::Kind::Val:
                want[k] = u.state_of_value(eval_expr(*c.value, u, st));
                break;
            case DnfCell::Kind::Any:
                break;
            case DnfCell::Kind::Dealloc:
                want[k] = u.dealloc_state();
                break;
            case DnfCell::Kind::Reserved:
                want[k] = u.reserved_state();
                break;
            }
        }
        for (std::uint32_t h = 0; h < u.num_heaps(); ++h) {
            const std::uint32_t dom = u.heap_domain(h);
            if ((dom & mask) != mask || (!d.top && dom != mask)) {
                continue;
            }
            bool ok = true;
            for (std::size_t k = 0; k < locs.size() && ok; ++k) {
                const int s = u.cell_state(h, locs[k]);
                ok = want[k] < 0 ? (s >= 1 && s <= u.base()) : s == want[k];
            }
            if (ok) {
                r.set(st, h);
            }
        }
    }
    return r;
}

MemorySet eval_dnf(const DnfAssertion& d) {
    MemorySet r(d.universe);
    for (const auto& dj : d.disjuncts) {
        r |= eval_disjunct(dj, d.universe);
    }
    return r;
}

std::string to_string(const DnfDisjunct& d) {
    std::string s;
    for (const auto& lit : d.pure) {
        s += to_string(*lit.lhs) + " " + to_string(lit.op) + " " + to_string(*lit.rhs) + " && ";
    }
    std::string heap;
    for (const auto& c : d.cells) {
        if (!heap.empty()) {
            heap += " * ";
        }
        const std::string addr = to_string(*c.addr);
        switch (c.kind) {
        case DnfCell::Kind::Val:
            heap += addr + " |-> " + to_string(*c.value);
            break;
        case DnfCell::Kind::Any:
            heap += addr + " |-> _";
            break;
        case DnfCell::Kind::Dealloc:
            heap += addr + " !->";
            break;
        case DnfCell::Kind::Reserved:
            heap += addr + " #->";
            break;
        }
    }
    if (heap.empty()) {
        heap = d.top ? "true" : "emp";
    } else if (d.top) {
        heap += " * true";
    }
    return s + "(" + heap + ")";
}

std::string to_string(const DnfAssertion& d) {
    if (d.disjuncts.empty()) {
        return "false";
    }
    std::string s;
    for (std::size_t i = 0; i < d.disjuncts.size(); ++i) {
        s += (i ? " || " : "") + to_string(d.disjuncts[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Entailment and frames

bool implies(const Assertion& a, const Assertion& b, const UniversePtr& u) {
    return eval_assertion(a, u).subset_of(eval_assertion(b, u));
}

bool equivalent(const Assertion& a, const Assertion& b, const UniversePtr& u) {
    return eval_assertion(a, u) == eval_assertion(b, u);
}

bool is_universal_frame(const Assertion& a) {
    for (const auto& v : free_vars(a)) {
        if (!DomainConfig::is_logical_name(v)) {
            return false;
        }
    }
    return true;
}

bool is_universal_frame_semantic(const Assertion& a, const UniversePtr& u) {
    const MemorySet r = eval_assertion(a, u);
    return exists_lift(u->config().program_vars, r) == r;
}

// ---------------------------------------------------------------------------
// Heap compatibility

bool heap_compat_semantic(const MemorySet& p, const MemorySet& q) {
    const Universe& u = *p.universe();
    for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
        if (p.block_empty(st) || q.block_empty(st)) {
            continue;
        }
        std::uint32_t dp = 0;
        std::uint32_t dq = 0;
        for (std::uint32_t h = 0; h < u.num_heaps(); ++h) {
            if (p.test(st, h)) {
                dp |= u.heap_domain(h);
            }
            if (q.test(st, h)) {
                dq |= u.heap_domain(h);
            }
        }
        if (dp & dq) {
            return false;
        }
    }
    return true;
}

bool heap_compat_logical(const DnfAssertion& a, const DnfAssertion& b) {
    const Universe& u = *a.universe;
    std::vector<int> li;
    std::vector<int> lj;
    for (const auto& di : a.disjuncts) {
        for (const auto& dj : b.disjuncts) {
            for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
                if (!pure_holds(di, u, st) || !pure_holds(dj, u, st) || !cell_locations(di, u, st, li) ||
                    !cell_locations(dj, u, st, lj)) {
                    continue;
                }
                bool separable;
                if (di.top && dj.top) {
                    separable = u.num_locations() == 0;
                } else if (di.top) {
                    separable = dj.cells.empty();
                } else if (dj.top) {
                    separable = di.cells.empty();
                } else {
                    separable = std::none_of(li.begin(), li.end(), [&](int l) {
                        return std::find(lj.begin(), lj.end(), l) != lj.end();
                    });
                }
                if (!separable) {
                    return false;
                }
            }
        }
    }
    return true;
}

bool heap_compat_logical(const Assertion& a, const Assertion& b, const UniversePtr& u) {
    return heap_compat_logical(to_dnf(a, u), to_dnf(b, u));
}

} // namespace sepkit
