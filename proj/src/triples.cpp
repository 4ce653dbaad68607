#include "sepkit/triples.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace sepkit {

std::string to_string(TripleKind k) {
    std::string s = k.direction == Direction::Forward ? "forward" : "backward";
    s += k.sense == Sense::Over ? "-over" : "-under";
    if (k.error_handling) {
        s += "+er";
    }
    return s;
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::Ok:
        return "ok";
    case Outcome::Er:
        return "er";
    case Outcome::Either:
        return "either";
    }
    return "?";
}

bool is_valid(const SemTriple& t) {
    const MemorySet pre = t.pre.without_abort();
    const MemorySet post = t.post.without_abort();
    if (t.kind.direction == Direction::Backward) {
        const MemorySet back = run_backward(*t.cmd, post);
        return t.kind.sense == Sense::Over ? back.subset_of(pre) : pre.subset_of(back);
    }
    if (t.kind.error_handling) {
        const TaggedMemorySet r = run_forward(*t.cmd, TaggedMemorySet(pre, MemorySet(pre.universe())));
        auto holds = [&](const MemorySet& reached) {
            return t.kind.sense == Sense::Over ? reached.subset_of(post) : post.subset_of(reached);
        };
        switch (t.outcome) {
        case Outcome::Ok:
            return holds(r.ok);
        case Outcome::Er:
            return holds(r.er);
        case Outcome::Either:
            return holds(r.ok) && holds(r.er);
        }
    }
    const MemorySet r = run_forward(*t.cmd, pre);
    if (t.kind.sense == Sense::Over) {
        return !r.includes_abort() && r.subset_of(post);
    }
    return post.subset_of(r.without_abort());
}

SemTriple apply_exists(const SemTriple& t, const std::vector<std::string>& xs) {
    const Universe& u = *t.pre.universe();
    for (const auto& x : xs) {
        if (u.config().is_program_var(x)) {
            throw ConfigError("cannot quantify the program variable " + x);
        }
    }
    SemTriple r = t;
    r.pre = exists_lift(xs, t.pre);
    r.post = exists_lift(xs, t.post);
    return r;
}

bool is_universal_frame_set(const MemorySet& r) {
    const MemorySet m = r.without_abort();
    return exists_lift(m.universe()->config().program_vars, m) == m;
}

std::optional<SemTriple> apply_frame(const SemTriple& t, const MemorySet& r) {
    if (!is_universal_frame_set(r)) {
        throw NotUniversalFrame("frame constrains program variables");
    }
    const MemorySet& side = t.kind.direction == Direction::Forward ? t.pre : t.post;
    if (!heap_compat_semantic(side, r)) {
        return std::nullopt;
    }
    SemTriple out = t;
    out.pre = set_join(t.pre.without_abort(), r);
    out.post = set_join(t.post.without_abort(), r);
    return out;
}

std::optional<SemTriple> apply_cons(const SemTriple& t, const MemorySet& new_pre,
                                    const MemorySet& new_post, bool cons2) {
    const bool over = t.kind.sense == Sense::Over;
    bool ok = false;
    if (t.kind.direction == Direction::Forward) {
        const bool post_ok = over ? t.post.subset_of(new_post) : new_post.subset_of(t.post);
        const bool pre_ok = cons2 ? (over ? new_pre.subset_of(t.pre) : t.pre.subset_of(new_pre))
                                  : new_pre == t.pre;
        ok = post_ok && pre_ok;
    } else {
        const bool pre_ok = over ? t.pre.subset_of(new_pre) : new_pre.subset_of(t.pre);
        const bool post_ok = cons2 ? (over ? new_post.subset_of(t.post) : t.post.subset_of(new_post))
                                   : new_post == t.post;
        ok = pre_ok && post_ok;
    }
    if (!ok) {
        return std::nullopt;
    }
    SemTriple r = t;
    r.pre = new_pre;
    r.post = new_post;
    return r;
}

SemTriple apply_disj(const std::vector<SemTriple>& ts) {
    if (ts.empty()) {
        throw KindMismatch("disjunction of no triples");
    }
    SemTriple r = ts.front();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const SemTriple& t = ts[i];
        if (!(t.kind == r.kind) || t.outcome != r.outcome || !equal(*t.cmd, *r.cmd)) {
            throw KindMismatch("disjunction over different kinds, outcomes or commands");
        }
        r.pre |= t.pre;
        r.post |= t.post;
    }
    return r;
}

SemTriple evaluate(const SymbolicTriple& t, TripleKind kind, const UniversePtr& u) {
    return SemTriple{kind, t.cmd, eval_assertion(*t.pre, u), eval_assertion(*t.post, u), t.outcome};
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

class EvalCache {
  public:
    explicit EvalCache(UniversePtr u) : u_(std::move(u)) {}
    const MemorySet& get(const AstPtr& a) {
        const std::string key = to_string(*a);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, eval_assertion(*a, u_)).first;
        }
        return it->second;
    }

  private:
    UniversePtr u_;
    std::map<std::string, MemorySet> cache_;
};

// The normal-form witness built alongside an interleaving: the seed with its
// quantified variables alpha-renamed, the frames applied so far (renamed
// consistently), and the accumulated quantifier prefix.
struct Witness {
    SymbolicTriple seed;
    std::vector<AstPtr> frames;
    std::vector<std::string> quantified;
};

bool mentions(const Witness& w, const std::string& x) {
    auto in = [&](const AstPtr& a) { return free_vars(*a).count(x) > 0; };
    if (in(w.seed.pre) || in(w.seed.post)) {
        return true;
    }
    return std::any_of(w.frames.begin(), w.frames.end(), in);
}

void collect_vars(const AstPtr& a, VarSet& out) {
    const VarSet vs = all_vars(*a);
    out.insert(vs.begin(), vs.end());
}

} // namespace

NormalizationReport check_normalization(const std::vector<SymbolicTriple>& seeds, TripleKind kind,
                                        const NormalizationPools& pools, const UniversePtr& u) {
    NormalizationReport report;
    EvalCache cache(u);
    const bool forward = kind.direction == Direction::Forward;
    const bool over = kind.sense == Sense::Over;

    VarSet reserved_names;
    for (const auto& r : pools.frames) {
        collect_vars(r, reserved_names);
    }
    for (const auto& c : pools.cons) {
        collect_vars(c, reserved_names);
    }
    for (const auto& xs : pools.exists) {
        reserved_names.insert(xs.begin(), xs.end());
    }

    std::vector<std::string> trail;

    auto verify = [&](const SemTriple& t, const Witness& w) {
        const SemTriple s{kind, w.seed.cmd, cache.get(w.seed.pre), cache.get(w.seed.post), w.seed.outcome};
        const MemorySet& r = cache.get(a_sep_all(w.frames));
        std::string why;
        auto framed = apply_frame(s, r);
        if (!framed) {
            why = "witness frame violates compatibility";
        } else {
            const SemTriple e = apply_exists(*framed, w.quantified);
            if (!apply_cons(e, t.pre, t.post)) {
                why = "no consequence step reaches the triple";
            }
        }
        if (!why.empty()) {
            std::string steps;
            for (const auto& st : trail) {
                steps += (steps.empty() ? "" : ", ") + st;
            }
            report.failures.push_back(w.seed.name + " [" + steps + "]: " + why);
        }
    };

    std::function<void(const SemTriple&, const Witness&, int)> explore =
        [&](const SemTriple& t, const Witness& w, int depth) {
            if (depth > 0) {
                ++report.interleavings;
                verify(t, w);
            }
            if (depth == pools.max_steps) {
                return;
            }
            for (const auto& r : pools.frames) {
                trail.push_back("frame " + to_string(*r));
                auto next = apply_frame(t, cache.get(r));
                if (!next) {
                    ++report.rejected;
                } else {
                    Witness w2 = w;
                    w2.frames.push_back(r);
                    explore(*next, w2, depth + 1);
                }
                trail.pop_back();
            }
            for (const auto& xs : pools.exists) {
                std::string label = "exists";
                for (const auto& x : xs) {
                    label += " " + x;
                }
                trail.push_back(label);
                Witness w2 = w;
                bool renamed_ok = true;
                for (const auto& x : xs) {
                    if (!mentions(w2, x)) {
                        continue;
                    }
                    if (!pools.rename_quantified) {
                        w2.quantified.push_back(x);
                        continue;
                    }
                    VarSet used = reserved_names;
                    collect_vars(w2.seed.pre, used);
                    collect_vars(w2.seed.post, used);
                    for (const auto& f : w2.frames) {
                        collect_vars(f, used);
                    }
                    used.insert(w2.quantified.begin(), w2.quantified.end());
                    auto fresh = std::find_if(pools.spares.begin(), pools.spares.end(),
                                              [&](const std::string& v) { return !used.count(v); });
                    if (fresh == pools.spares.end()) {
                        renamed_ok = false;
                        break;
                    }
                    const std::map<std::string, std::string> m{{x, *fresh}};
                    w2.seed.pre = rename(w2.seed.pre, m);
                    w2.seed.post = rename(w2.seed.post, m);
                    for (auto& f : w2.frames) {
                        f = rename(f, m);
                    }
                    w2.quantified.push_back(*fresh);
                }
                if (!renamed_ok) {
                    report.failures.push_back(w.seed.name + ": ran out of spare logical variables");
                } else {
                    explore(apply_exists(t, xs), w2, depth + 1);
                }
                trail.pop_back();
            }
            for (const auto& c : pools.cons) {
                trail.push_back("cons " + to_string(*c));
                const MemorySet& cs = cache.get(c);
                MemorySet pre = t.pre;
                MemorySet post = t.post;
                MemorySet& side = forward ? post : pre;
                if (over) {
                    side |= cs;
                } else {
                    side &= cs;
                }
                auto next = apply_cons(t, pre, post);
                if (!next) {
                    ++report.rejected;
                } else {
                    explore(*next, w, depth + 1);
                }
                trail.pop_back();
            }
        };

    for (const auto& seed : seeds) {
        const SemTriple s{kind, seed.cmd, cache.get(seed.pre), cache.get(seed.post), seed.outcome};
        explore(s, Witness{seed, {}, {}}, 0);
    }
    return report;
}

std::optional<bool> check_disj_tracking(const std::vector<SymbolicTriple>& ts, TripleKind kind,
                                        const AstPtr& frame, const std::vector<std::string>& xs,
                                        const std::string& index_var, const UniversePtr& u) {
    if (ts.empty() || static_cast<int>(ts.size()) > u->config().num_values) {
        throw ConfigError("disjunction tracking needs between 1 and n triples");
    }
    if (free_vars(*frame).count(index_var)) {
        throw ConfigError("index variable occurs in the frame");
    }
    const MemorySet r = eval_assertion(*frame, u);

    std::vector<SemTriple> lhs_parts;
    SemTriple indexed{kind, ts.front().cmd, MemorySet(u), MemorySet(u), ts.front().outcome};
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const SymbolicTriple& t = ts[i];
        if (free_vars(*t.pre).count(index_var) || free_vars(*t.post).count(index_var)) {
            throw ConfigError("index variable occurs in a triple");
        }
        const SemTriple s = evaluate(t, kind, u);
        auto framed = apply_frame(s, r);
        if (!framed) {
            return std::nullopt;
        }
        lhs_parts.push_back(apply_exists(*framed, xs));

        const MemorySet tag =
            eval_assertion(*a_cmp(e_var(index_var), CmpOp::Eq, e_const(static_cast<Value>(i))), u);
        indexed.pre |= s.pre & tag;
        indexed.post |= s.post & tag;
    }
    const SemTriple lhs = apply_disj(lhs_parts);

    auto framed = apply_frame(indexed, r);
    if (!framed) {
        return std::nullopt;
    }
    std::vector<std::string> xs2 = xs;
    xs2.push_back(index_var);
    const SemTriple rhs = apply_exists(*framed, xs2);
    return lhs.pre == rhs.pre && lhs.post == rhs.post;
}

} // namespace sepkit
