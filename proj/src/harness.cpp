#include "sepkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sepkit/assertion_semantics.hpp"
#include "sepkit/program_semantics.hpp"
#include "sepkit/triples.hpp"

namespace sepkit {

namespace {

class Timer {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Thrown by fail() to end a suite early; carries the partial report.
struct Stopped {
    SuiteReport report;
};

void fail(SuiteReport& r, std::string id, std::string detail) {
    if (r.baseline_ids.count(id) > 0) {
        ++r.baseline;
        return;
    }
    r.failing_ids.push_back(id);
    ++r.failures;
    if (r.failed.size() < r.retained) {
        r.failed.push_back({std::move(id), std::move(detail)});
    }
    if (r.stop_at_first) {
        r.stopped = true;
        throw Stopped{r};
    }
}

SuiteReport start(const std::string& suite, const HarnessConfig& cfg) {
    SuiteReport r;
    r.suite = suite;
    r.mutation = cfg.mutation;
    r.retained = cfg.retained_failures;
    r.stop_at_first = cfg.stop_at_first_failure;
    r.baseline_ids = cfg.baseline_failures;
    return r;
}

std::vector<Logic> logics(const HarnessConfig& cfg) {
    std::vector<Logic> out;
    for (LogicId id : {LogicId::SlPlus, LogicId::IslPlus, LogicId::SilPlus, LogicId::NcPlus}) {
        if (cfg.logic && *cfg.logic != id) {
            continue;
        }
        for (Model m : {Model::One, Model::Two}) {
            if (!cfg.model || *cfg.model == m) {
                out.push_back({id, m});
            }
        }
    }
    return out;
}

std::vector<Model> models(const HarnessConfig& cfg) {
    if (cfg.model) {
        return {*cfg.model};
    }
    return {Model::One, Model::Two};
}

std::string model_tag(Model m) { return m == Model::One ? "m1" : "m2"; }

UniversePtr universe_with(const HarnessConfig& cfg, const std::vector<std::string>& logical, Model model,
                          bool reserved) {
    return make_universe(make_config(cfg.num_values, cfg.locations, cfg.program_vars, logical, model, reserved));
}

// The two program variables most pools are phrased over.
std::pair<std::string, std::string> two_vars(const HarnessConfig& cfg) {
    if (cfg.program_vars.empty()) {
        throw ConfigError("at least one program variable is required");
    }
    const std::string a = cfg.program_vars[0];
    return {a, cfg.program_vars.size() > 1 ? cfg.program_vars[1] : a};
}

// Replaces the placeholders X and Y by the configured program variables.
std::string instantiate_text(std::string t, const HarnessConfig& cfg) {
    const auto [a, b] = two_vars(cfg);
    std::string out;
    for (char c : t) {
        if (c == 'X') {
            out += a;
        } else if (c == 'Y') {
            out += b;
        } else {
            out += c;
        }
    }
    return out;
}

std::vector<ExprPtr> expr_pool(const HarnessConfig& cfg) {
    std::vector<ExprPtr> out;
    const std::string one = cfg.num_values > 1 ? "1" : "0";
    for (const char* t : {"0", "null", "X", "Y", "X + 1", "X + Y", "Y - 1"}) {
        out.push_back(parse_expr(instantiate_text(t, cfg)));
    }
    out.push_back(parse_expr(one));
    return out;
}

std::vector<BoolPtr> bool_pool(const HarnessConfig& cfg) {
    std::vector<BoolPtr> out;
    const std::string one = cfg.num_values > 1 ? "1" : "0";
    for (std::string t : {"true", "false", "X = Y", "X != Y", "X < Y", "X <= ONE", "!(X < Y)", "X = null",
                          "X = 0 && Y = ONE", "X = ONE || Y = null", "!(X = Y && Y = 0)"}) {
        const std::size_t p = t.find("ONE");
        if (p != std::string::npos) {
            t.replace(p, 3, one);
        }
        out.push_back(parse_bool(instantiate_text(t, cfg)));
    }
    return out;
}

// Every instantiation of the program-level metavariables of a schema.
std::vector<AxiomInstance> instances(const AxiomSchema& s, const HarnessConfig& cfg,
                                     const std::vector<ExprPtr>& exprs, const std::vector<BoolPtr>& bools) {
    using K = Command::Kind;
    std::vector<AxiomInstance> out;
    const auto& pv = cfg.program_vars;
    switch (s.command) {
    case K::Error:
        out.emplace_back();
        break;
    case K::Assume:
        for (const auto& b : bools) {
            AxiomInstance i;
            i.b = b;
            out.push_back(i);
        }
        break;
    case K::Assign:
        for (const auto& x : pv) {
            for (const auto& e : exprs) {
                AxiomInstance i;
                i.x = x;
                i.e = e;
                out.push_back(i);
            }
        }
        break;
    case K::Alloc:
    case K::Free:
        for (const auto& x : pv) {
            AxiomInstance i;
            i.x = x;
            out.push_back(i);
        }
        break;
    case K::Load:
    case K::Store:
        for (const auto& x : pv) {
            for (const auto& y : pv) {
                if (x != y) {
                    AxiomInstance i;
                    i.x = x;
                    i.y = y;
                    out.push_back(i);
                }
            }
        }
        break;
    default:
        break;
    }
    return out;
}

std::string first_member(const MemorySet& s) {
    std::string out;
    const Universe& u = *s.universe();
    bool found = false;
    s.for_each([&](std::uint64_t st, std::uint32_t h) {
        if (!found) {
            out = memory_to_string(u, Memory{u.decode_store(st), u.decode_heap(h)});
            found = true;
        }
    });
    return out;
}

// A memory witnessing why the triple is invalid.
std::string counterexample(const SemTriple& t) {
    const MemorySet pre = t.pre.without_abort();
    const MemorySet post = t.post.without_abort();
    if (t.kind.direction == Direction::Backward) {
        const MemorySet back = run_backward(*t.cmd, post);
        if (t.kind.sense == Sense::Over) {
            return "reaches the post from " + first_member(back - pre) + " outside the pre";
        }
        return "pre state " + first_member(pre - back) + " cannot reach the post";
    }
    if (t.kind.error_handling) {
        const TaggedMemorySet r = run_forward(*t.cmd, TaggedMemorySet(pre, MemorySet(pre.universe())));
        const MemorySet& reached = t.outcome == Outcome::Er ? r.er : r.ok;
        if (t.kind.sense == Sense::Under) {
            const MemorySet miss = post - reached;
            if (miss.no_memories() && t.outcome == Outcome::Either) {
                return "post state " + first_member(post - r.er) + " is not an er result";
            }
            return "post state " + first_member(miss) + " is not a " + to_string(t.outcome) + " result";
        }
        return "result " + first_member(reached - post) + " escapes the post";
    }
    const MemorySet r = run_forward(*t.cmd, pre);
    if (t.kind.sense == Sense::Over) {
        if (r.includes_abort()) {
            std::string from;
            pre.for_each([&](std::uint64_t st, std::uint32_t h) {
                if (!from.empty()) {
                    return;
                }
                MemorySet one(pre.universe());
                one.set(st, h);
                if (run_forward(*t.cmd, one).includes_abort()) {
                    from = first_member(one);
                }
            });
            return "aborts from " + from;
        }
        return "result " + first_member(r - post) + " escapes the post";
    }
    return "post state " + first_member(post - r.without_abort()) + " is unreachable";
}

std::vector<AstPtr> parse_all(const std::vector<std::string>& texts, const HarnessConfig& cfg) {
    std::vector<AstPtr> out;
    for (const auto& t : texts) {
        out.push_back(parse_assertion(instantiate_text(t, cfg)));
    }
    return out;
}

std::vector<AstPtr> for_model(const std::vector<AstPtr>& xs, Model m, bool reserved) {
    std::vector<AstPtr> out;
    for (const auto& a : xs) {
        if ((m == Model::One && mentions(*a, Assertion::Kind::NotPointsTo)) ||
            (!reserved && mentions(*a, Assertion::Kind::Reserved))) {
            continue;
        }
        out.push_back(a);
    }
    return out;
}

std::vector<CmdPtr> atomic_pool(const HarnessConfig& cfg) {
    std::vector<CmdPtr> out;
    const auto [a, b] = two_vars(cfg);
    std::vector<std::string> texts{"X := alloc()", "free(X)", "X := Y + 1", "X := null", "(X = Y)?",
                                   "(X < Y)?",     "error()"};
    if (a != b) {
        for (const char* t : {"Y := alloc()", "free(Y)", "X := [Y]", "Y := [X]", "[X] := Y", "[Y] := X", "Y := 1"}) {
            texts.push_back(t);
        }
    }
    for (const auto& t : texts) {
        out.push_back(parse_command(instantiate_text(t, cfg)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random derivations

struct Generated {
    Derivation d;
    int depth = 0;
};

class DerivationGenerator {
  public:
    DerivationGenerator(const HarnessConfig& cfg, Logic logic, std::uint64_t seed, const Mutations& m)
        : cfg_(cfg), logic_(logic), rng_(seed) {
        const bool reserved = default_reserved(logic.id);
        std::vector<std::string> logical;
        for (const auto& v : cfg.program_vars) {
            logical.push_back(DomainConfig::mirror(v));
        }
        for (const char* v : {"z'", "w'", "l'", "k1'"}) {
            logical.emplace_back(v);
        }
        universe_ = universe_with(cfg, logical, logic.model, reserved);
        opts_.base = universe_->config();
        opts_.reserved = reserved;
        opts_.mutations = m;
        opts_.universe = universe_;
        opts_.cache = std::make_shared<AssertionCache>();
        axioms_ = available_axioms(logic.id, logic.model, reserved, m);
        exprs_ = expr_pool(cfg);
        bools_ = bool_pool(cfg);
        const auto [a, b] = two_vars(cfg);
        std::vector<std::string> frames{"w' |-> 1", "k1' |-> _", "z' = 1 && emp", "w' = 0 && emp",
                                        DomainConfig::mirror(a) + " |-> _",
                                        DomainConfig::mirror(a) + " != " + DomainConfig::mirror(b) + " && emp"};
        if (logic.model == Model::Two) {
            frames.emplace_back("w' !->");
        }
        for (const auto& f : frames) {
            frames_.push_back(parse_assertion(f));
        }
        for (const char* t : {"X = Y", "z' = 0", "X = 1", "X' = 1"}) {
            pure_.push_back(parse_assertion(instantiate_text(t, cfg)));
        }
        for (const char* t : {"emp", "X |-> _", "true", "false"}) {
            spatial_.push_back(parse_assertion(instantiate_text(t, cfg)));
        }
    }

    const UniversePtr& universe() const { return universe_; }
    const CheckOptions& options() const { return opts_; }
    std::size_t attempts() const { return attempts_; }
    std::size_t rejected() const { return rejected_; }

    // The next accepted derivation produced by a structural rule.
    std::optional<Derivation> next(std::size_t max_attempts) {
        if (pool_.empty()) {
            seed_pool();
        }
        for (std::size_t i = 0; i < max_attempts; ++i) {
            std::optional<Derivation> cand = propose();
            if (!cand) {
                continue;
            }
            ++attempts_;
            cand->logic = logic_;
            const Verdict v = check_derivation(*cand, opts_);
            if (!v.accepted) {
                ++rejected_;
                continue;
            }
            const int depth = depth_of(*cand);
            if (depth <= 4) {
                pool_.push_back({*cand, depth});
            }
            return cand;
        }
        return std::nullopt;
    }

  private:
    static int depth_of(const Derivation& d) {
        int m = 0;
        for (const auto& p : d.premises) {
            m = std::max(m, depth_of(p));
        }
        return 1 + m;
    }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng_)];
    }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    void seed_pool() {
        for (const auto& s : axioms_) {
            for (const auto& base : instances(s, cfg_, exprs_, bools_)) {
                for (int variant = 0; variant < 2; ++variant) {
                    AxiomInstance inst = base;
                    Derivation d;
                    d.rule = s.name;
                    if (variant == 1) {
                        const std::string z = pick(std::vector<std::string>{"w'", "0", "1"});
                        const std::string l = "k1'";
                        inst.z = parse_expr(z);
                        inst.l = l;
                        d.subst["z'"] = z;
                        d.subst["l'"] = l;
                    }
                    d.conclusion = s.build(inst, cfg_.program_vars);
                    d.logic = logic_;
                    if (check_derivation(d, opts_).accepted) {
                        pool_.push_back({d, 1});
                    }
                }
            }
        }
    }

    const Derivation& any() { return pick(pool_).d; }

    Derivation wrap(const std::string& rule, LogicalTriple c, std::vector<Derivation> premises) {
        Derivation d;
        d.rule = rule;
        d.conclusion = std::move(c);
        for (auto& p : premises) {
            p.logic.reset();
        }
        d.premises = std::move(premises);
        return d;
    }

    AstPtr perturb(const AstPtr& a) {
        switch (std::uniform_int_distribution<int>(0, 3)(rng_)) {
        case 0:
            return a_or(a, pick(spatial_));
        case 1:
            return a_and(a, pick(pure_));
        case 2:
            return a_or(a, a_sep(pick(spatial_), pick(frames_)));
        default:
            return a;
        }
    }

    Derivation cons(const Derivation& p, AstPtr pre, AstPtr post) {
        LogicalTriple c = p.conclusion;
        c.pre = std::move(pre);
        c.post = std::move(post);
        return wrap("Cons", c, {p});
    }

    bool over_pre_weakens() const { return logic_.id == LogicId::IslPlus || logic_.id == LogicId::NcPlus; }

    std::optional<Derivation> propose() {
        const LogicId L = logic_.id;
        const bool under_iter = L == LogicId::IslPlus || L == LogicId::SilPlus;
        const int op = std::uniform_int_distribution<int>(0, 9)(rng_);
        switch (op) {
        case 0:
        case 1: { // Frame
            const Derivation& p = any();
            const AstPtr r = pick(frames_);
            LogicalTriple c = p.conclusion;
            c.pre = a_sep(c.pre, r);
            c.post = a_sep(c.post, r);
            Derivation d = wrap("Frame", c, {p});
            d.frame = r;
            return d;
        }
        case 2: { // Exists
            const Derivation& p = any();
            VarSet fv = free_vars(*p.conclusion.pre);
            const VarSet fq = free_vars(*p.conclusion.post);
            fv.insert(fq.begin(), fq.end());
            std::vector<std::string> logical;
            for (const auto& v : fv) {
                if (DomainConfig::is_logical_name(v) && coin()) {
                    logical.push_back(v);
                }
            }
            if (logical.empty()) {
                return std::nullopt;
            }
            LogicalTriple c = p.conclusion;
            c.pre = a_exists(logical, c.pre);
            c.post = a_exists(logical, c.post);
            Derivation d = wrap("Exists", c, {p});
            d.exists = logical;
            return d;
        }
        case 3: { // Cons, proposing both directions
            const Derivation& p = any();
            return cons(p, perturb(p.conclusion.pre), perturb(p.conclusion.post));
        }
        case 4: { // Seq, bridging the middle assertion with Cons when needed
            const Derivation& p1 = any();
            if (p1.conclusion.outcome != Outcome::Ok) {
                return std::nullopt;
            }
            const MemorySet& mid = sem(p1.conclusion.post);
            std::vector<const Derivation*> fits;
            for (const auto& g : pool_) {
                const MemorySet& pre = sem(g.d.conclusion.pre);
                const bool ok = over_pre_weakens() ? pre.subset_of(mid) : mid.subset_of(pre);
                if (ok && g.depth <= 3) {
                    fits.push_back(&g.d);
                }
            }
            if (fits.empty()) {
                return std::nullopt;
            }
            Derivation p2 = *pick(fits);
            if (!(sem(p2.conclusion.pre) == mid)) {
                p2 = cons(p2, p1.conclusion.post, p2.conclusion.post);
            }
            LogicalTriple c{p1.conclusion.pre, c_seq(p1.conclusion.cmd, p2.conclusion.cmd), p2.conclusion.post,
                            p2.conclusion.outcome};
            return wrap("Seq", c, {p1, p2});
        }
        case 5: { // Choice, with Cons making the shared side common
            Derivation p1 = any();
            Derivation p2 = any();
            if (p1.conclusion.outcome != p2.conclusion.outcome) {
                return std::nullopt;
            }
            const LogicalTriple& a = p1.conclusion;
            const LogicalTriple& b = p2.conclusion;
            AstPtr pre;
            AstPtr post;
            switch (L) {
            case LogicId::SlPlus:
                pre = a_and(a.pre, b.pre);
                post = a_or(a.post, b.post);
                p1 = cons(p1, pre, post);
                p2 = cons(p2, pre, post);
                break;
            case LogicId::NcPlus:
                pre = a_or(a.pre, b.pre);
                post = a_and(a.post, b.post);
                p1 = cons(p1, pre, post);
                p2 = cons(p2, pre, post);
                break;
            case LogicId::IslPlus:
                pre = a_or(a.pre, b.pre);
                post = a_or(a.post, b.post);
                p1 = cons(p1, pre, a.post);
                p2 = cons(p2, pre, b.post);
                break;
            case LogicId::SilPlus:
                pre = a_or(a.pre, b.pre);
                post = a_or(a.post, b.post);
                p1 = cons(p1, a.pre, post);
                p2 = cons(p2, b.pre, post);
                break;
            }
            LogicalTriple c{pre, c_choice(a.cmd, b.cmd), post, a.outcome};
            return wrap("Choice", c, {p1, p2});
        }
        case 6: { // Disj over two triples about the same command
            const Derivation& p1 = any();
            std::vector<const Derivation*> same;
            for (const auto& g : pool_) {
                if (equal(*g.d.conclusion.cmd, *p1.conclusion.cmd) && g.d.conclusion.outcome == p1.conclusion.outcome &&
                    g.depth <= 3) {
                    same.push_back(&g.d);
                }
            }
            const Derivation& p2 = *pick(same);
            LogicalTriple c{a_or(p1.conclusion.pre, p2.conclusion.pre), p1.conclusion.cmd,
                            a_or(p1.conclusion.post, p2.conclusion.post), p1.conclusion.outcome};
            return wrap("Disj", c, {p1, p2});
        }
        case 7: { // loops
            const Derivation& p = any();
            const LogicalTriple& t = p.conclusion;
            if (t.outcome != Outcome::Ok) {
                return std::nullopt;
            }
            if (!under_iter) {
                // An invariant: weaken/strengthen so that pre and post agree.
                const AstPtr inv = L == LogicId::SlPlus ? t.pre : t.post;
                Derivation body = cons(p, inv, inv);
                return wrap("Iterate", LogicalTriple{inv, c_star(t.cmd), inv, Outcome::Ok}, {body});
            }
            if (coin()) {
                const CmdPtr star = c_star(t.cmd);
                const AstPtr anchor = L == LogicId::IslPlus ? t.pre : t.pre;
                Derivation zero = wrap("IterateZero", LogicalTriple{anchor, star, anchor, Outcome::Ok}, {});
                Derivation seq = wrap("Seq", LogicalTriple{t.pre, c_seq(star, t.cmd), t.post, t.outcome}, {zero, p});
                return wrap("Iterate", LogicalTriple{t.pre, star, t.post, t.outcome}, {seq});
            }
            if (L == LogicId::IslPlus) {
                return wrap("Iter", LogicalTriple{t.pre, c_star(t.cmd), a_or(t.pre, t.post), Outcome::Ok}, {p});
            }
            return wrap("Iter", LogicalTriple{a_or(t.post, t.pre), c_star(t.cmd), t.post, Outcome::Ok}, {p});
        }
        case 8: { // Empty
            const Derivation& p = any();
            LogicalTriple c = p.conclusion;
            if (L == LogicId::SlPlus || L == LogicId::SilPlus) {
                c.pre = a_false();
            } else {
                c.post = a_false();
            }
            return wrap("Empty", c, {});
        }
        default: { // SeqEr, or another frame elsewhere
            const Derivation& p = any();
            if (L != LogicId::IslPlus || p.conclusion.outcome != Outcome::Er) {
                return std::nullopt;
            }
            const Derivation& q = any();
            LogicalTriple c = p.conclusion;
            c.cmd = c_seq(p.conclusion.cmd, q.conclusion.cmd);
            return wrap("SeqEr", c, {p});
        }
        }
    }

    const MemorySet& sem(const AstPtr& a) {
        auto& cache = *opts_.cache;
        const std::string key = to_string(*a);
        auto it = cache.find(key);
        if (it == cache.end()) {
            it = cache.emplace(key, eval_assertion(*a, universe_)).first;
        }
        return it->second;
    }

    const HarnessConfig& cfg_;
    Logic logic_;
    std::mt19937_64 rng_;
    UniversePtr universe_;
    CheckOptions opts_;
    std::vector<AxiomSchema> axioms_;
    std::vector<ExprPtr> exprs_;
    std::vector<BoolPtr> bools_;
    std::vector<AstPtr> frames_;
    std::vector<AstPtr> pure_;
    std::vector<AstPtr> spatial_;
    std::vector<Generated> pool_;
    std::size_t attempts_ = 0;
    std::size_t rejected_ = 0;
};

void axioms_used(const Derivation& d, std::set<std::string>& out) {
    if (d.premises.empty() && d.rule != "Empty" && d.rule != "IterateZero") {
        out.insert(d.rule);
    }
    for (const auto& p : d.premises) {
        axioms_used(p, out);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Mutation controls

std::vector<MutationControl> mutation_controls() {
    return {
        {"free-post", "axiom-soundness", "Free axioms keep the freed cell in the postcondition"},
        {"load-forget", "axiom-soundness", "Load axioms forget the loaded value"},
        {"assign-nosubst", "axiom-soundness", "forward Assign posts use e instead of e[x'/x]"},
        {"frame-nocompat", "expressiveness", "Frame skips its heap-compatibility side condition"},
        {"cons-flip", "metamorphic", "Cons checks the postcondition entailment backwards"},
        {"preservation-ungated", "preservation", "frames are applied without the compatibility precondition"},
        {"adjunction-star-once", "backward-adjunction", "the backward star unrolls the loop at most once"},
        {"normalization-no-rename", "normalization", "witnesses keep quantified names instead of renaming",
         true},
    };
}

std::vector<std::string> mutation_names() {
    std::vector<std::string> out;
    for (const auto& m : mutation_controls()) {
        out.push_back(m.name);
    }
    return out;
}

Mutations proof_mutations(const std::string& name) {
    Mutations m;
    if (name.empty()) {
        return m;
    }
    const auto names = mutation_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        throw ConfigError("unknown mutation '" + name + "'");
    }
    m.free_keeps_cell = name == "free-post";
    m.load_forgets_value = name == "load-forget";
    m.assign_unsubstituted = name == "assign-nosubst";
    m.frame_skips_compat = name == "frame-nocompat";
    m.cons_flipped = name == "cons-flip";
    return m;
}

// ---------------------------------------------------------------------------
// Suites

// Calls back with every axiom instance whose triple is invalid.
template <typename F>
void for_each_unsound_axiom(const HarnessConfig& cfg, const Mutations& m, std::size_t& cases, F&& on_invalid) {
    const auto exprs = expr_pool(cfg);
    const auto bools = bool_pool(cfg);
    for (const Logic& L : logics(cfg)) {
        const bool reserved = default_reserved(L.id);
        std::vector<std::string> logical;
        for (const auto& v : cfg.program_vars) {
            logical.push_back(DomainConfig::mirror(v));
        }
        logical.emplace_back("z'");
        logical.emplace_back("l'");
        const UniversePtr u = universe_with(cfg, logical, L.model, reserved);
        for (const auto& s : available_axioms(L.id, L.model, reserved, m)) {
            for (const auto& inst : instances(s, cfg, exprs, bools)) {
                const LogicalTriple t = s.build(inst, cfg.program_vars);
                const SemTriple st{kind_of(L.id), t.cmd, eval_assertion(*t.pre, u), eval_assertion(*t.post, u),
                                   t.outcome};
                ++cases;
                if (!is_valid(st)) {
                    on_invalid(L, s.name, t, st);
                }
            }
        }
    }
}

SuiteReport suite_axiom_soundness(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("axiom-soundness", cfg);
    for_each_unsound_axiom(
        cfg, proof_mutations(cfg.mutation), rep.cases,
        [&](const Logic& L, const std::string& name, const LogicalTriple& t, const SemTriple& st) {
            fail(rep, to_string(L) + "/" + name + "/" + to_string(*t.cmd), to_string(t) + ": " + counterexample(st));
        });
    rep.seconds = timer.seconds();
    return rep;
}

SuiteReport suite_preservation(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("preservation", cfg);
    const bool gated = cfg.mutation != "preservation-ungated";
    const auto assertions = parse_all({"emp", "X |-> 1", "X |-> _", "Y |-> X", "X |-> _ * Y |-> _", "X = Y && emp",
                                       "X = 1 && Y |-> 0", "X |-> z'", "emp || X |-> 1", "X = null && emp", "true",
                                       "X !->", "X !-> * Y |-> _"},
                                      cfg);
    const auto frames = parse_all({"emp", "w' |-> 1", "w' |-> _", "z' = 1 && emp", "w' |-> z' * k1' |-> _",
                                   "w' = 1 && w' |-> 0 || emp", "true", "w' = 1 && true", "w' !->"},
                                  cfg);
    const auto cmds = atomic_pool(cfg);
    for (Model model : models(cfg)) {
        const UniversePtr u = universe_with(cfg, {"w'", "z'", "k1'"}, model, false);
        std::vector<std::pair<std::string, MemorySet>> as;
        for (const auto& a : for_model(assertions, model, false)) {
            as.emplace_back(to_string(*a), eval_assertion(*a, u));
        }
        std::vector<std::pair<std::string, MemorySet>> rs;
        for (const auto& r : for_model(frames, model, false)) {
            rs.emplace_back(to_string(*r), eval_assertion(*r, u));
        }
        for (const auto& c : cmds) {
            const std::string cs = to_string(*c);
            for (const auto& [ps, p] : as) {
                const MemorySet fwd = run_forward(*c, p);
                const MemorySet back = run_backward(*c, p);
                for (const auto& [rstr, r] : rs) {
                    const std::string id = model_tag(model) + "/" + cs + "/" + ps + "/" + rstr;
                    // Forward: ⟦c⟧(P•R) = ⟦c⟧P • R when P ⋉ R and ⟦c⟧P does not abort.
                    if (fwd.includes_abort() || (gated && !heap_compat_semantic(p, r))) {
                        ++rep.skipped;
                    } else {
                        ++rep.cases;
                        const MemorySet lhs = run_forward(*c, set_join(p, r));
                        const MemorySet rhs = set_join(fwd, r);
                        if (!(lhs == rhs)) {
                            fail(rep, "forward/" + id,
                                 lhs.includes_abort() ? "framed run aborts"
                                 : (lhs - rhs).no_memories()
                                     ? "framed run misses " + first_member(rhs - lhs)
                                     : "framed run reaches " + first_member(lhs - rhs));
                        }
                    }
                    // Backward: ⟦←c⟧(Q•R) = ⟦←c⟧Q • R when Q ⋉ R.
                    if (gated && !heap_compat_semantic(p, r)) {
                        ++rep.skipped;
                    } else {
                        ++rep.cases;
                        const MemorySet lhs = run_backward(*c, set_join(p, r));
                        const MemorySet rhs = set_join(back, r);
                        if (!(lhs == rhs)) {
                            fail(rep, "backward/" + id,
                                 (lhs - rhs).no_memories() ? "framed pre misses " + first_member(rhs - lhs)
                                                           : "framed pre has extra " + first_member(lhs - rhs));
                        }
                    }
                }
            }
        }
    }
    rep.seconds = timer.seconds();
    return rep;
}

namespace {

// Pre/postconditions that appear in the proof systems and the worked
// derivations, plus assorted shapes exercising each compatibility case.
std::vector<AstPtr> compat_corpus(const HarnessConfig& cfg, Model model) {
    std::vector<AstPtr> out;
    std::set<std::string> seen;
    auto add = [&](const AstPtr& a) {
        if (seen.insert(to_string(*a)).second) {
            out.push_back(a);
        }
    };
    const bool reserved = true;
    for (LogicId id : {LogicId::SlPlus, LogicId::IslPlus, LogicId::SilPlus, LogicId::NcPlus}) {
        for (const auto& s : available_axioms(id, model, reserved)) {
            AxiomInstance inst;
            inst.x = two_vars(cfg).first;
            inst.y = two_vars(cfg).second;
            if (inst.x == inst.y && (s.command == Command::Kind::Load || s.command == Command::Kind::Store)) {
                continue;
            }
            inst.e = parse_expr(instantiate_text("X + 1", cfg));
            inst.b = parse_bool(instantiate_text("X = Y", cfg));
            const LogicalTriple t = s.build(inst, cfg.program_vars);
            add(t.pre);
            add(t.post);
        }
    }
    const auto extra = parse_all(
        {"X |-> _", "X |-> _ * X |-> _", "emp", "X |-> _ * Y |-> v'", "Y |-> v'", "Y !-> * X |-> _", "X' |-> _",
         "X' != Y' && emp", "z' = v' && emp * X' |-> _", "false", "true", "X = Y", "X |-> 1 || emp",
         "X |-> _ * true", "exists v'. Y |-> v'", "X = null && emp", "X |-> Y && Y |-> X", "X |-> 1 * Y |-> 1",
         "w' |-> 0", "w' = 1 && true", "w' |-> _ || X = 0", "X #->", "emp || X' |-> 0", "X |-> X",
         "exists z'. X |-> z' * z' |-> _", "X !-> || Y !->"},
        cfg);
    for (const auto& a : extra) {
        add(a);
    }
    return for_model(out, model, reserved);
}

} // namespace

SuiteReport suite_compat_equiv(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("compat-equiv", cfg);
    std::size_t compatible = 0;
    std::size_t incompatible = 0;
    for (Model model : models(cfg)) {
        const auto corpus = compat_corpus(cfg, model);
        // Each pair is decided in the smallest universe containing its
        // variables, which keeps the semantic side exhaustive yet cheap.
        std::map<std::string, UniversePtr> universes;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            for (std::size_t j = i; j < corpus.size(); ++j) {
                VarSet vs = all_vars(*corpus[i]);
                const VarSet vb = all_vars(*corpus[j]);
                vs.insert(vb.begin(), vb.end());
                std::vector<std::string> logical;
                std::string key;
                for (const auto& v : vs) {
                    if (DomainConfig::is_logical_name(v)) {
                        logical.push_back(v);
                        key += v + ",";
                    }
                }
                auto& u = universes[key];
                if (!u) {
                    u = universe_with(cfg, logical, model, true);
                }
                const bool logical_side = heap_compat_logical(*corpus[i], *corpus[j], u);
                const bool semantic_side =
                    heap_compat_semantic(eval_assertion(*corpus[i], u), eval_assertion(*corpus[j], u));
                ++rep.cases;
                ++(semantic_side ? compatible : incompatible);
                if (logical_side != semantic_side) {
                    fail(rep, model_tag(model) + "/" + to_string(*corpus[i]) + " ~ " + to_string(*corpus[j]),
                         std::string("logical says ") + (logical_side ? "compatible" : "incompatible"));
                }
            }
        }
    }
    rep.notes.push_back("unordered pairs drawn from the proof-system and worked-example assertions");
    rep.notes.push_back("compatible pairs: " + std::to_string(compatible) +
                        ", incompatible pairs: " + std::to_string(incompatible));
    rep.seconds = timer.seconds();
    return rep;
}

SuiteReport suite_normalization(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("normalization", cfg);
    const auto [a, b] = two_vars(cfg);
    NormalizationPools pools;
    pools.frames = parse_all({"X' = 0 && emp", "w' |-> 1", "z' = 1 && emp"}, cfg);
    pools.exists = {{DomainConfig::mirror(a)}, {"z'"}};
    pools.cons = parse_all({"X = 0", "z' = 0 && emp"}, cfg);
    pools.max_steps = 3;
    // Three steps rename at most two quantified variables.
    pools.spares = {"k1'", "k2'"};
    pools.rename_quantified = cfg.mutation != "normalization-no-rename";

    const std::vector<ExprPtr> exprs{parse_expr("0"), parse_expr(instantiate_text("X + 1", cfg))};
    const std::vector<BoolPtr> bools{parse_bool(instantiate_text("X = Y", cfg)), parse_bool("true")};

    // Logical variables mentioned by the pools; each seed group gets the
    // smallest universe holding these plus its own variables.
    VarSet pool_vars(pools.spares.begin(), pools.spares.end());
    for (const auto& r : pools.frames) {
        const VarSet vs = all_vars(*r);
        pool_vars.insert(vs.begin(), vs.end());
    }
    for (const auto& c : pools.cons) {
        const VarSet vs = all_vars(*c);
        pool_vars.insert(vs.begin(), vs.end());
    }
    for (const auto& xs : pools.exists) {
        pool_vars.insert(xs.begin(), xs.end());
    }
    auto logical_of = [&](const std::vector<SymbolicTriple>& ts, VarSet base) {
        for (const auto& t : ts) {
            for (const auto& side : {t.pre, t.post}) {
                const VarSet vs = all_vars(*side);
                base.insert(vs.begin(), vs.end());
            }
        }
        std::vector<std::string> out;
        for (const auto& v : base) {
            if (DomainConfig::is_logical_name(v)) {
                out.push_back(v);
            }
        }
        return out;
    };

    for (const Logic& L : logics(cfg)) {
        const bool reserved = default_reserved(L.id);
        std::map<std::vector<std::string>, std::vector<SymbolicTriple>> groups;
        std::vector<SymbolicTriple> seeds;
        for (const auto& s : available_axioms(L.id, L.model, reserved)) {
            for (const auto& inst : instances(s, cfg, exprs, bools)) {
                const LogicalTriple t = s.build(inst, cfg.program_vars);
                const SymbolicTriple seed{to_string(L) + "/" + s.name + "/" + to_string(*t.cmd), t.pre, t.cmd,
                                          t.post, t.outcome};
                seeds.push_back(seed);
                groups[logical_of({seed}, pool_vars)].push_back(seed);
            }
        }
        for (const auto& [logical, group] : groups) {
            const UniversePtr u = universe_with(cfg, logical, L.model, reserved);
            const NormalizationReport nr = check_normalization(group, kind_of(L.id), pools, u);
            rep.cases += nr.interleavings;
            rep.skipped += nr.rejected;
            for (const auto& f : nr.failures) {
                fail(rep, to_string(L) + "/normal-form", f);
            }
        }

        // Disjunction tracking over pairs of seeds about the same command
        // (the second one instantiated with z' := 0 when no partner exists).
        std::map<std::string, std::vector<SymbolicTriple>> by_cmd;
        for (const auto& s : seeds) {
            by_cmd[to_string(*s.cmd) + "/" + to_string(s.outcome)].push_back(s);
        }
        std::vector<AstPtr> frames = pools.frames;
        frames.push_back(a_emp());
        std::vector<std::vector<std::string>> quantifiers = pools.exists;
        quantifiers.emplace_back();
        for (auto& [key, group] : by_cmd) {
            std::vector<SymbolicTriple> pair(group.begin(), group.begin() + std::min<std::size_t>(group.size(), 2));
            if (pair.size() == 1) {
                SymbolicTriple z0 = pair[0];
                z0.name += "[z'=0]";
                z0.pre = subst(z0.pre, "z'", e_const(0));
                z0.post = subst(z0.post, "z'", e_const(0));
                pair.push_back(z0);
            }
            VarSet base = pool_vars;
            base.insert("d'");
            const UniversePtr u = universe_with(cfg, logical_of(pair, base), L.model, reserved);
            for (const auto& r : frames) {
                for (const auto& xs : quantifiers) {
                    const auto same = check_disj_tracking(pair, kind_of(L.id), r, xs, "d'", u);
                    if (!same) {
                        ++rep.skipped;
                        continue;
                    }
                    ++rep.cases;
                    if (!*same) {
                        std::string q;
                        for (const auto& x : xs) {
                            q += x;
                        }
                        fail(rep, to_string(L) + "/disj-tracking/" + key,
                             "frame " + to_string(*r) + ", exists {" + q + "}: sides differ");
                    }
                }
            }
        }
    }
    rep.seconds = timer.seconds();
    return rep;
}

namespace {

struct FixtureExpectation {
    std::string file;
    bool accepted;
    std::string reason; // required substring of the rejection reason
    bool must_be_invalid = false; // the rejected conclusion is semantically invalid
};

const std::vector<FixtureExpectation>& fixture_expectations() {
    static const std::vector<FixtureExpectation> xs{
        {"sl_more_expressive.drv", true, ""},
        {"isl_more_expressive.drv", true, ""},
        {"wrong_frame.drv", false, "heap-compatible", true},
        {"isl_classical_frame.drv", false, "heap-compatible"},
    };
    return xs;
}

} // namespace

SuiteReport suite_expressiveness(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("expressiveness", cfg);
    CheckOptions opts;
    opts.base.num_values = cfg.num_values;
    opts.base.locations = cfg.locations;
    opts.base.program_vars = cfg.program_vars;
    opts.mutations = proof_mutations(cfg.mutation);
    for (const auto& fx : fixture_expectations()) {
        const std::string path = cfg.fixtures_dir + "/" + fx.file;
        std::ifstream in(path);
        if (!in) {
            fail(rep, fx.file, "cannot open " + path);
            continue;
        }
        std::stringstream buf;
        buf << in.rdbuf();
        std::vector<Derivation> ds;
        try {
            ds = parse_derivations(buf.str());
        } catch (const ParseError& e) {
            fail(rep, fx.file, std::string("parse error: ") + e.what());
            continue;
        }
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const Derivation& d = ds[i];
            const std::string id = fx.file + "#" + std::to_string(i + 1);
            ++rep.cases;
            const Verdict v = check_derivation(d, opts);
            if (v.accepted != fx.accepted) {
                fail(rep, id, v.accepted ? "accepted but must be rejected" : "rejected: " + v.reason);
                continue;
            }
            if (!v.accepted && v.reason.find(fx.reason) == std::string::npos) {
                fail(rep, id, "rejected for the wrong reason: " + v.reason);
                continue;
            }
            // Accepted roots must be semantically valid; a rejected
            // conclusion is reported with its validity.
            const UniversePtr u = derivation_universe(d, opts);
            const LogicalTriple& t = d.conclusion;
            const SemTriple st{kind_of(d.logic->id), t.cmd, eval_assertion(*t.pre, u), eval_assertion(*t.post, u),
                               t.outcome};
            const bool valid = is_valid(st);
            if (v.accepted && !valid) {
                fail(rep, id, "accepted root is invalid: " + counterexample(st));
            } else if (!v.accepted) {
                if (fx.must_be_invalid && valid) {
                    fail(rep, id, "rejected conclusion is valid, but the fixture expects an unsound triple");
                }
                rep.notes.push_back(id + " rejected (" + v.reason + "); conclusion is semantically " +
                                    (valid ? "valid" : "invalid: " + counterexample(st)));
            }
        }
    }
    rep.seconds = timer.seconds();
    return rep;
}

std::vector<Derivation> random_accepted_derivations(const HarnessConfig& cfg, int count) {
    std::vector<Derivation> out;
    const auto ls = logics(cfg);
    const Mutations m = proof_mutations(cfg.mutation);
    const std::size_t per = (static_cast<std::size_t>(count) + ls.size() - 1) / ls.size();
    std::uint64_t k = 0;
    for (const Logic& L : ls) {
        DerivationGenerator g(cfg, L, cfg.seed * 1000003ULL + k++, m);
        for (std::size_t i = 0; i < per && static_cast<int>(out.size()) < count; ++i) {
            auto d = g.next(400);
            if (!d) {
                break;
            }
            out.push_back(*d);
        }
    }
    return out;
}

SuiteReport suite_metamorphic(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("metamorphic", cfg);
    const auto ls = logics(cfg);
    const Mutations m = proof_mutations(cfg.mutation);
    const std::size_t per = (static_cast<std::size_t>(cfg.random_derivations) + ls.size() - 1) / ls.size();
    std::uint64_t k = 0;
    std::map<std::string, std::size_t> invalid_by_axiom_set;
    // Invalid roots are attributed to axioms that have invalid instances.
    // Under a mutation, roots explained by a faithfully unsound axiom are
    // baseline: the mutation is detected only by the others.
    std::set<std::string> unsound;
    std::size_t axiom_cases = 0;
    for_each_unsound_axiom(cfg, cfg.mutation.empty() ? m : Mutations{}, axiom_cases, [&](const Logic& L, const std::string& name, const LogicalTriple&, const SemTriple&) {
        unsound.insert(to_string(L) + "/" + name);
    });
    std::size_t unexplained = 0;
    for (const Logic& L : ls) {
        DerivationGenerator g(cfg, L, cfg.seed * 1000003ULL + k++, m);
        std::size_t produced = 0;
        for (; produced < per && static_cast<int>(rep.cases) < cfg.random_derivations; ++produced) {
            auto d = g.next(400);
            if (!d) {
                break;
            }
            ++rep.cases;
            const LogicalTriple& t = d->conclusion;
            const UniversePtr& u = g.universe();
            const SemTriple st{kind_of(L.id), t.cmd, eval_assertion(*t.pre, u), eval_assertion(*t.post, u),
                               t.outcome};
            if (!is_valid(st)) {
                std::set<std::string> used;
                axioms_used(*d, used);
                std::string names;
                for (const auto& n : used) {
                    names += (names.empty() ? "" : ",") + n;
                }
                ++invalid_by_axiom_set[to_string(L) + " uses {" + names + "}"];
                const bool explained = std::any_of(used.begin(), used.end(), [&](const std::string& n) {
                    return unsound.count(to_string(L) + "/" + n) > 0;
                });
                if (!explained) {
                    ++unexplained;
                } else if (!cfg.mutation.empty()) {
                    ++rep.baseline;
                    continue;
                }
                fail(rep, to_string(L) + "#" + std::to_string(produced + 1),
                     to_string(t) + " (" + d->rule + ", axioms " + names + "): " + counterexample(st));
            }
        }
        rep.notes.push_back(to_string(L) + ": " + std::to_string(produced) + " accepted of " +
                            std::to_string(g.attempts()) + " proposals");
    }
    for (const auto& [k2, n] : invalid_by_axiom_set) {
        rep.notes.push_back("invalid roots, " + k2 + ": " + std::to_string(n));
    }
    rep.notes.push_back("invalid roots using no axiom with invalid instances: " + std::to_string(unexplained));
    if (static_cast<int>(rep.cases) < cfg.random_derivations) {
        fail(rep, "generator", "only " + std::to_string(rep.cases) + " derivations were generated");
    }
    rep.seconds = timer.seconds();
    return rep;
}

namespace {

// Explicit successor relation over the memories of a universe, composed
// relationally; the independent oracle for the backward semantics.
class Relation {
  public:
    explicit Relation(std::size_t n) : n_(n), words_((n + 63) / 64), rows_(n * words_, 0) {}

    static Relation of_atomic(const Command& c, const Universe& u) {
        Relation r(u.num_memories());
        for (std::uint64_t st = 0; st < u.num_stores(); ++st) {
            for (std::uint32_t h = 0; h < u.num_heaps(); ++h) {
                const std::size_t from = st * u.num_heaps() + h;
                step_atomic(c, u, st, h, [&](std::uint64_t s2, std::uint32_t h2) {
                    r.set(from, s2 * u.num_heaps() + h2);
                });
            }
        }
        return r;
    }

    static Relation identity(std::size_t n) {
        Relation r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r.set(i, i);
        }
        return r;
    }

    void set(std::size_t a, std::size_t b) { rows_[a * words_ + b / 64] |= std::uint64_t{1} << (b % 64); }
    bool test(std::size_t a, std::size_t b) const { return (rows_[a * words_ + b / 64] >> (b % 64)) & 1U; }

    Relation compose(const Relation& o) const {
        Relation r(n_);
        for (std::size_t a = 0; a < n_; ++a) {
            std::uint64_t* dst = &r.rows_[a * words_];
            for (std::size_t w = 0; w < words_; ++w) {
                std::uint64_t bits = rows_[a * words_ + w];
                while (bits) {
                    const std::size_t b = w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
                    bits &= bits - 1;
                    const std::uint64_t* src = &o.rows_[b * words_];
                    for (std::size_t k = 0; k < words_; ++k) {
                        dst[k] |= src[k];
                    }
                }
            }
        }
        return r;
    }

    Relation unite(const Relation& o) const {
        Relation r = *this;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            r.rows_[i] |= o.rows_[i];
        }
        return r;
    }

    // Reflexive-transitive closure by repeated squaring.
    Relation star() const {
        Relation acc = identity(n_).unite(*this);
        for (;;) {
            Relation next = acc.compose(acc);
            if (next.rows_ == acc.rows_) {
                return acc;
            }
            acc = std::move(next);
        }
    }

    // {a | some (a, b) in the relation has b in target}, enumerating the
    // pairs row by row (sparse rows through their successor lists).
    std::vector<std::uint64_t> preimage(const std::vector<std::uint64_t>& target) const {
        index();
        std::vector<std::uint64_t> out(words_, 0);
        for (std::size_t a = 0; a < n_; ++a) {
            bool hit = false;
            if (dense_[a]) {
                hit = row_hits(a, target);
            } else {
                for (std::uint32_t i = offsets_[a]; i < offsets_[a + 1] && !hit; ++i) {
                    hit = (target[succ_[i] / 64] >> (succ_[i] % 64)) & 1U;
                }
            }
            if (hit) {
                out[a / 64] |= std::uint64_t{1} << (a % 64);
            }
        }
        return out;
    }

    bool row_hits(std::size_t a, const std::vector<std::uint64_t>& target) const {
        for (std::size_t w = 0; w < words_; ++w) {
            if (rows_[a * words_ + w] & target[w]) {
                return true;
            }
        }
        return false;
    }

    std::size_t size() const { return n_; }
    std::size_t words() const { return words_; }

  private:
    static constexpr std::size_t kSparseRow = 32;

    // Successor lists for rows with few successors, built once.
    void index() const {
        if (!offsets_.empty()) {
            return;
        }
        offsets_.assign(n_ + 1, 0);
        dense_.assign(n_, false);
        for (std::size_t a = 0; a < n_; ++a) {
            std::size_t count = 0;
            for (std::size_t w = 0; w < words_; ++w) {
                count += static_cast<std::size_t>(__builtin_popcountll(rows_[a * words_ + w]));
            }
            dense_[a] = count > kSparseRow;
            if (!dense_[a]) {
                for (std::size_t w = 0; w < words_; ++w) {
                    std::uint64_t bits = rows_[a * words_ + w];
                    while (bits) {
                        succ_.push_back(static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(bits)));
                        bits &= bits - 1;
                    }
                }
            }
            offsets_[a + 1] = static_cast<std::uint32_t>(succ_.size());
        }
    }

    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> rows_;
    mutable std::vector<std::uint32_t> offsets_;
    mutable std::vector<std::uint32_t> succ_;
    mutable std::vector<bool> dense_;
};

CmdPtr unroll_once(const CmdPtr& c) {
    switch (c->kind) {
    case Command::Kind::Seq:
        return c_seq(unroll_once(c->c1), unroll_once(c->c2));
    case Command::Kind::Choice:
        return c_choice(unroll_once(c->c1), unroll_once(c->c2));
    case Command::Kind::Star:
        return c_choice(c_skip(), unroll_once(c->c1));
    default:
        return c;
    }
}

} // namespace

SuiteReport suite_backward_adjunction(const HarnessConfig& cfg) {
    Timer timer;
    SuiteReport rep = start("backward-adjunction", cfg);
    const bool star_once = cfg.mutation == "adjunction-star-once";
    const auto [a, b] = two_vars(cfg);
    std::vector<std::string> atom_texts{"X := alloc()", "free(X)", "(X = Y)?"};
    if (a != b) {
        atom_texts.insert(atom_texts.begin() + 2, {"Y := [X]", "[X] := Y"});
    }
    std::vector<CmdPtr> atoms;
    for (const auto& t : atom_texts) {
        atoms.push_back(parse_command(instantiate_text(t, cfg)));
    }
    const auto qtexts = parse_all({"emp", "X |-> Y", "X = Y && true", "X |-> _ * Y |-> _", "X = null && true"}, cfg);

    for (Model model : models(cfg)) {
        const UniversePtr u = universe_with(cfg, {}, model, false);
        std::vector<MemorySet> qs;
        std::vector<std::vector<std::uint64_t>> qbits;
        for (const auto& q : qtexts) {
            qs.push_back(eval_assertion(*q, u));
            std::vector<std::uint64_t> bits((u->num_memories() + 63) / 64, 0);
            qs.back().for_each([&](std::uint64_t st, std::uint32_t h) {
                const std::size_t i = st * u->num_heaps() + h;
                bits[i / 64] |= std::uint64_t{1} << (i % 64);
            });
            qbits.push_back(std::move(bits));
        }

        // Commands of depth ≤ 3 with their relations, built level by level.
        std::vector<std::pair<CmdPtr, Relation>> level1;
        for (const auto& c : atoms) {
            level1.emplace_back(c, Relation::of_atomic(*c, *u));
        }
        std::vector<std::pair<CmdPtr, Relation>> upto2 = level1;
        for (const auto& [c1, r1] : level1) {
            upto2.emplace_back(c_star(c1), r1.star());
            for (const auto& [c2, r2] : level1) {
                upto2.emplace_back(c_seq(c1, c2), r1.compose(r2));
                upto2.emplace_back(c_choice(c1, c2), r1.unite(r2));
            }
        }

        // Memories with a successor in each target, per command of depth ≤ 2.
        using Bits = std::vector<std::uint64_t>;
        std::vector<std::vector<Bits>> hits;
        for (const auto& [c, r] : upto2) {
            std::vector<Bits> per_q;
            for (const auto& qb : qbits) {
                per_q.push_back(r.preimage(qb));
            }
            hits.push_back(std::move(per_q));
        }

        auto check = [&](const CmdPtr& c, std::size_t qi, const Bits& oracle_bits) {
            const CmdPtr run = star_once ? unroll_once(c) : c;
            ++rep.cases;
            const MemorySet back = run_backward(*run, qs[qi]);
            for (std::uint64_t st = 0; st < u->num_stores(); ++st) {
                for (std::uint32_t h = 0; h < u->num_heaps(); ++h) {
                    const std::size_t i = st * u->num_heaps() + h;
                    const bool oracle = (oracle_bits[i / 64] >> (i % 64)) & 1U;
                    if (oracle != back.test(st, h)) {
                        std::string where = memory_to_string(*u, Memory{u->decode_store(st), u->decode_heap(h)});
                        where += oracle ? " reaches the target but is missing" : " is spurious";
                        fail(rep, model_tag(model) + "/" + to_string(*c) + "/" + to_string(*qtexts[qi]), where);
                        return;
                    }
                }
            }
        };

        for (std::size_t i = 0; i < upto2.size(); ++i) {
            for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                check(upto2[i].first, qi, hits[i][qi]);
            }
        }
        // Depth 3: the outermost operator is enumerated over the pairs of
        // its depth-≤2 operands.
        for (std::size_t i = 0; i < upto2.size(); ++i) {
            const auto& [c1, r1] = upto2[i];
            if (command_depth(*c1) == 2) {
                const Relation closure = r1.star();
                for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                    check(c_star(c1), qi, closure.preimage(qbits[qi]));
                }
            }
            for (std::size_t j = 0; j < upto2.size(); ++j) {
                const CmdPtr& c2 = upto2[j].first;
                if (std::max(command_depth(*c1), command_depth(*c2)) != 2) {
                    continue;
                }
                for (std::size_t qi = 0; qi < qs.size(); ++qi) {
                    check(c_seq(c1, c2), qi, r1.preimage(hits[j][qi]));
                    Bits either = hits[i][qi];
                    for (std::size_t w = 0; w < either.size(); ++w) {
                        either[w] |= hits[j][qi][w];
                    }
                    check(c_choice(c1, c2), qi, either);
                }
            }
        }
    }
    rep.notes.push_back("oracle: explicit successor relations, composed pairwise");
    rep.seconds = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Dispatch and reporting

std::vector<std::string> suite_names() {
    return {"axiom-soundness", "preservation", "compat-equiv", "normalization",
            "expressiveness",  "metamorphic",  "backward-adjunction"};
}

namespace {

SuiteReport run_suite_to_end(const std::string& name, const HarnessConfig& cfg) {
    if (name == "axiom-soundness") {
        return suite_axiom_soundness(cfg);
    }
    if (name == "preservation") {
        return suite_preservation(cfg);
    }
    if (name == "compat-equiv") {
        return suite_compat_equiv(cfg);
    }
    if (name == "normalization") {
        return suite_normalization(cfg);
    }
    if (name == "expressiveness") {
        return suite_expressiveness(cfg);
    }
    if (name == "metamorphic") {
        return suite_metamorphic(cfg);
    }
    if (name == "backward-adjunction") {
        return suite_backward_adjunction(cfg);
    }
    throw ConfigError("unknown suite '" + name + "'");
}

} // namespace

SuiteReport run_suite(const std::string& name, const HarnessConfig& cfg) {
    Timer timer;
    try {
        return run_suite_to_end(name, cfg);
    } catch (Stopped& s) {
        s.report.seconds = timer.seconds();
        s.report.notes.push_back("stopped at the first failure");
        return std::move(s.report);
    }
}

HarnessConfig control_config(const MutationControl& m, const HarnessConfig& cfg) {
    HarnessConfig out = cfg;
    out.mutation.clear();
    if (m.reduced_domain) {
        out.num_values = 2;
        out.locations = {1};
    }
    return out;
}

SuiteReport run_mutation_control(const MutationControl& m, const HarnessConfig& cfg,
                                 const SuiteReport* faithful) {
    HarnessConfig plain = control_config(m, cfg);
    plain.stop_at_first_failure = false;
    SuiteReport own;
    if (faithful == nullptr) {
        own = run_suite(m.suite, plain);
        faithful = &own;
    }
    HarnessConfig mc = plain;
    mc.mutation = m.name;
    mc.stop_at_first_failure = true;
    mc.baseline_failures.insert(faithful->failing_ids.begin(), faithful->failing_ids.end());
    return run_suite(m.suite, mc);
}

std::string report_lines(const SuiteReport& r) {
    std::ostringstream os;
    const std::string mut = r.mutation.empty() ? "" : " mutation=" + r.mutation;
    for (const auto& f : r.failed) {
        os << "suite=" << r.suite << mut << " case=" << f.id << " status=fail detail=" << f.detail << "\n";
    }
    if (r.failures > r.failed.size()) {
        os << "suite=" << r.suite << mut << " case=... status=fail detail=" << (r.failures - r.failed.size())
           << " further failures omitted\n";
    }
    os << "suite=" << r.suite << mut << " case=* status=" << (r.failures == 0 ? "pass" : "fail")
       << " cases=" << r.cases << " skipped=" << r.skipped << " failures=" << r.failures
       << (r.mutation.empty() ? "" : " baseline=" + std::to_string(r.baseline))
       << " expected=" << (r.as_expected() ? "yes" : "no") << "\n";
    return os.str();
}

std::string report_json(const std::vector<SuiteReport>& rs, const HarnessConfig& cfg) {
    nlohmann::ordered_json j;
    j["config"] = {{"values", cfg.num_values},
                   {"locations", cfg.locations},
                   {"program_vars", cfg.program_vars},
                   {"seed", cfg.seed},
                   {"random_derivations", cfg.random_derivations},
                   {"mutation", cfg.mutation}};
    nlohmann::ordered_json suites = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& r : rs) {
        nlohmann::ordered_json s;
        s["suite"] = r.suite;
        s["mutation"] = r.mutation;
        s["cases"] = r.cases;
        s["skipped"] = r.skipped;
        s["failures"] = r.failures;
        if (!r.mutation.empty()) {
            s["baseline"] = r.baseline;
        }
        s["seconds"] = r.seconds;
        s["as_expected"] = r.as_expected();
        nlohmann::ordered_json failed = nlohmann::ordered_json::array();
        for (const auto& f : r.failed) {
            failed.push_back({{"case", f.id}, {"detail", f.detail}});
        }
        s["failed"] = failed;
        s["notes"] = r.notes;
        suites.push_back(s);
        all = all && r.as_expected();
    }
    j["suites"] = suites;
    j["all_as_expected"] = all;
    return j.dump(2);
}

} // namespace sepkit
