#include <doctest.h>

#include "sepkit/assertion_semantics.hpp"

using namespace sepkit;

namespace {

UniversePtr universe(Model model = Model::One, bool reserved = false) {
    return make_universe(make_config(3, {1, 2}, {"x", "y"}, {"z'"}, model, reserved));
}

std::size_t count(const char* text, const UniversePtr& u) { return eval_assertion(*parse_assertion(text), u).size(); }

} // namespace

TEST_CASE("denotation sizes, counted by hand") {
    // Five variables over four values: 1024 stores; 25 heaps in model 1.
    const UniversePtr u = universe();
    CHECK(count("true", u) == 1024 * 25);
    CHECK(count("emp", u) == 1024);
    CHECK(count("false", u) == 0);
    // x names one of two locations; the single cell holds any of 4 values.
    CHECK(count("x |-> _", u) == 2 * 256 * 4);
    CHECK(count("x |-> 1 && x = 1", u) == 256);
    // Two distinct locations, in either order.
    CHECK(count("x |-> _ * y |-> _", u) == 2 * 64 * 16);
    CHECK(count("x |-> _ * x |-> _", u) == 0);
    // Heaps containing x's cell: 4 values for it, 5 states for the other.
    CHECK(count("true * x |-> _", u) == 2 * 256 * 20);
    CHECK(count("empX{x, y}", u) == 16 * 4);
    CHECK(count("exists z'. x |-> z' && z' = 0", u) == 2 * 256);
}

TEST_CASE("model-specific cells") {
    CHECK_THROWS_AS(count("x !->", universe()), ModelMismatch);
    CHECK_THROWS_AS(count("x #->", universe()), ModelMismatch);
    CHECK(count("x !->", universe(Model::Two)) == 2 * 256);
    CHECK(count("x #-> * y !->", universe(Model::Two, true)) == 2 * 64);
    CHECK_THROWS_AS(count("w' = 0", universe()), ConfigError);
}

TEST_CASE("entailment") {
    const UniversePtr u = universe();
    CHECK(implies(*parse_assertion("x |-> 1"), *parse_assertion("x |-> _"), u));
    CHECK_FALSE(implies(*parse_assertion("x |-> _"), *parse_assertion("x |-> 1"), u));
    CHECK(equivalent(*parse_assertion("exists z'. x = z' && emp"), *parse_assertion("emp"), u));
    CHECK(equivalent(*parse_assertion("x |-> _ * true"), *parse_assertion("true * x |-> _"), u));
}

TEST_CASE("normal forms denote the same sets") {
    for (auto model : {Model::One, Model::Two}) {
        const UniversePtr u = universe(model, true);
        for (const char* text :
             {"true", "emp", "x |-> _ * y |-> z'", "exists z'. x |-> z' * (z' = y && emp)", "x |-> 1 || y = 2",
              "(true * x |-> _) && y |-> _", "x #-> * true", "empX{x} * y |-> x' + 1",
              "exists x'. x' |-> _ * x' |-> _"}) {
            const AstPtr a = parse_assertion(text);
            CHECK_MESSAGE(eval_dnf(to_dnf(*a, u)) == eval_assertion(*a, u), text);
        }
        if (model == Model::Two) {
            const AstPtr d = parse_assertion("x !-> * y |-> _");
            CHECK(eval_dnf(to_dnf(*d, u)) == eval_assertion(*d, u));
        }
    }
}

TEST_CASE("universal frames") {
    const UniversePtr u = universe();
    CHECK(is_universal_frame(*parse_assertion("x' |-> _ * (z' = 1 && emp)")));
    CHECK_FALSE(is_universal_frame(*parse_assertion("x |-> _")));
    const AstPtr tautology = parse_assertion("(x = 0 || x != 0) && x' |-> _");
    CHECK_FALSE(is_universal_frame(*tautology));
    CHECK(is_universal_frame_semantic(*tautology, u));
    CHECK_FALSE(is_universal_frame_semantic(*parse_assertion("x |-> _"), u));
}

TEST_CASE("heap compatibility, semantic and on normal forms") {
    const UniversePtr u = universe();
    struct Case {
        const char* p;
        const char* q;
        bool compatible;
    };
    for (const Case& c : {Case{"x |-> _", "y |-> _", false}, Case{"x |-> _ && x = 1", "y |-> _ && y = 2", true},
                          Case{"emp", "true", true}, Case{"true", "x |-> _", false},
                          Case{"x |-> _ && x = 1", "x' |-> _ && x' = 1", false}, Case{"false", "true", true},
                          Case{"x |-> _ * y |-> _", "x' |-> _ && x' != x && x' != y", true}}) {
        const AstPtr p = parse_assertion(c.p);
        const AstPtr q = parse_assertion(c.q);
        CHECK_MESSAGE(heap_compat_semantic(eval_assertion(*p, u), eval_assertion(*q, u)) == c.compatible, c.p,
                      " ~ ", c.q);
        CHECK_MESSAGE(heap_compat_logical(*p, *q, u) == c.compatible, c.p, " ~ ", c.q);
    }
}
