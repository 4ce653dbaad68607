#include <doctest.h>

#include "sepkit/triples.hpp"

using namespace sepkit;

namespace {

const TripleKind kSl{Direction::Forward, Sense::Over, false};
const TripleKind kIsl{Direction::Forward, Sense::Under, true};
const TripleKind kSil{Direction::Backward, Sense::Under, false};
const TripleKind kNc{Direction::Backward, Sense::Over, false};

UniversePtr universe() { return make_universe(make_config(3, {1, 2}, {"x", "y"}, {"z'"}, Model::One, false)); }

SemTriple triple(TripleKind k, const char* pre, const char* cmd, const char* post, const UniversePtr& u,
                 Outcome o = Outcome::Ok) {
    return SemTriple{k, parse_command(cmd), eval_assertion(*parse_assertion(pre), u),
                     eval_assertion(*parse_assertion(post), u), o};
}

} // namespace

TEST_CASE("validity per kind") {
    const UniversePtr u = universe();
    CHECK(is_valid(triple(kSl, "x |-> _", "free(x)", "emp", u)));
    CHECK_FALSE(is_valid(triple(kSl, "emp", "free(x)", "emp", u))); // aborts
    CHECK_FALSE(is_valid(triple(kSl, "x |-> _", "free(x)", "emp && x = 1", u)));

    CHECK(is_valid(triple(kIsl, "x |-> _", "free(x)", "emp && x = 1", u)));
    CHECK_FALSE(is_valid(triple(kIsl, "x |-> _", "free(x)", "x |-> _", u)));
    CHECK(is_valid(triple(kIsl, "emp", "free(x)", "emp", u, Outcome::Er)));
    CHECK_FALSE(is_valid(triple(kIsl, "emp", "free(x)", "emp", u, Outcome::Ok)));

    CHECK(is_valid(triple(kNc, "x |-> _", "free(x)", "emp", u)));
    CHECK_FALSE(is_valid(triple(kNc, "x |-> _ && x = 1", "free(x)", "emp", u)));
    CHECK(is_valid(triple(kSil, "x |-> _ && x = 1", "free(x)", "emp", u)));
    CHECK_FALSE(is_valid(triple(kSil, "emp", "free(x)", "emp", u)));
}

TEST_CASE("frame: side condition and result") {
    const UniversePtr u = universe();
    const SemTriple t = triple(kSl, "x |-> _ && x = 1", "free(x)", "emp && x = 1", u);
    const MemorySet clash = eval_assertion(*parse_assertion("x' |-> _"), u);
    CHECK_FALSE(apply_frame(t, clash).has_value());
    const MemorySet r = eval_assertion(*parse_assertion("x' |-> _ && x' = 2"), u);
    const auto framed = apply_frame(t, r);
    REQUIRE(framed.has_value());
    CHECK(framed->pre == eval_assertion(*parse_assertion("x |-> _ * x' |-> _ && x = 1 && x' = 2"), u));
    CHECK(is_valid(*framed));
    CHECK_THROWS_AS(apply_frame(t, eval_assertion(*parse_assertion("y |-> _"), u)), NotUniversalFrame);

    // Backward kinds check the postcondition instead.
    const SemTriple nc = triple(kNc, "x |-> _", "free(x)", "emp", u);
    CHECK(apply_frame(nc, clash).has_value());
}

TEST_CASE("exists and disjunction") {
    const UniversePtr u = universe();
    const SemTriple t = triple(kSl, "x |-> z'", "free(x)", "emp", u);
    const SemTriple e = apply_exists(t, {"z'"});
    CHECK(e.pre == eval_assertion(*parse_assertion("x |-> _"), u));
    CHECK_THROWS_AS(apply_exists(t, {"x"}), ConfigError);

    const SemTriple other = triple(kSl, "emp", "x := 1", "emp", u);
    CHECK_THROWS_AS(apply_disj({t, other}), KindMismatch);
    const SemTriple both = apply_disj({t, triple(kSl, "emp", "free(x)", "true", u)});
    CHECK(both.pre == eval_assertion(*parse_assertion("x |-> z' || emp"), u));
}

TEST_CASE("consequence directions") {
    const UniversePtr u = universe();
    const auto set = [&](const char* a) { return eval_assertion(*parse_assertion(a), u); };
    const SemTriple sl = triple(kSl, "x |-> _", "free(x)", "emp", u);
    CHECK(apply_cons(sl, sl.pre, set("true")).has_value());
    CHECK_FALSE(apply_cons(sl, sl.pre, set("false")).has_value());
    CHECK(apply_cons(sl, set("x |-> 1"), sl.post, true).has_value());
    CHECK_FALSE(apply_cons(sl, set("x |-> 1"), sl.post, false).has_value());

    const SemTriple isl = triple(kIsl, "x |-> _", "free(x)", "emp && (x = 1 || x = 2)", u);
    CHECK(apply_cons(isl, isl.pre, set("emp && x = 1")).has_value());
    CHECK_FALSE(apply_cons(isl, isl.pre, set("true")).has_value());

    const SemTriple nc = triple(kNc, "x |-> _", "free(x)", "emp", u);
    CHECK(apply_cons(nc, set("true"), nc.post).has_value());
    CHECK_FALSE(apply_cons(nc, set("x |-> 1"), nc.post).has_value());
}

TEST_CASE("normalization of a small interleaving space") {
    const UniversePtr u = make_universe(make_config(2, {1}, {"x", "y"}, {"z'", "k1'", "k2'"}, Model::One, false));
    const std::vector<SymbolicTriple> seeds{
        {"Free", parse_assertion("empX{x, y} * x |-> z'"), parse_command("free(x)"), parse_assertion("empX{x, y}")}};
    NormalizationPools pools;
    pools.frames = {parse_assertion("z' = 1 && emp"), parse_assertion("x' |-> 0")};
    pools.exists = {{"z'"}};
    pools.cons = {parse_assertion("x = 0")};
    pools.spares = {"k1'", "k2'"};
    const NormalizationReport rep = check_normalization(seeds, kSl, pools, u);
    CHECK(rep.interleavings > 0);
    CHECK(rep.failures.empty());
    pools.rename_quantified = false;
    CHECK_FALSE(check_normalization(seeds, kSl, pools, u).failures.empty());
}
