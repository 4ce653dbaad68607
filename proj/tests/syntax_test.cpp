#include <doctest.h>

#include "sepkit/assertion_semantics.hpp"
#include "sepkit/syntax.hpp"

using namespace sepkit;

TEST_CASE("commands print back to an equal tree") {
    for (const char* text : {"x := 1; y := 2 + x := 0*", "x := alloc(); [x] := y; free(x)", "(x = y)?; error()",
                             "x := [y] + skip", "(x := x + 1)*; x < 2 && !(y = null)?"}) {
        const CmdPtr c = parse_command(text);
        CHECK(equal(*parse_command(to_string(*c)), *c));
    }
}

TEST_CASE("command precedence: star, then choice, then sequence") {
    const CmdPtr c = parse_command("x := 1; y := 2 + x := 0*");
    REQUIRE(c->kind == Command::Kind::Seq);
    REQUIRE(c->c2->kind == Command::Kind::Choice);
    CHECK(c->c2->c2->kind == Command::Kind::Star);
    CHECK(command_depth(*c) == 4); // atomic commands have depth 1
    // `+` inside an assignment is addition when followed by a term.
    const CmdPtr add = parse_command("x := x + 1");
    CHECK(add->kind == Command::Kind::Assign);
}

TEST_CASE("malformed commands are rejected") {
    CHECK_THROWS_AS(parse_command("x := [x]"), ParseError);
    CHECK_THROWS_AS(parse_command("[x] := x"), ParseError);
    CHECK_THROWS_AS(parse_command("x := z'"), ParseError);
    CHECK_THROWS_AS(parse_command("x :="), ParseError);
}

TEST_CASE("assertions print back to an equal tree") {
    for (const char* text : {"x |-> _ * y |-> 1 && x' = 2", "empX{x, y} * x !->", "exists z'. x |-> z' || emp",
                             "x #-> * (z' = 1 && emp)", "true * x' |-> z' + 1"}) {
        const AstPtr a = parse_assertion(text);
        CHECK(equal(*parse_assertion(to_string(*a)), *a));
    }
}

TEST_CASE("assertion precedence: star, then conjunction, then disjunction") {
    const AstPtr a = parse_assertion("emp * emp && true || false");
    REQUIRE(a->kind == Assertion::Kind::Or);
    REQUIRE(a->a->kind == Assertion::Kind::And);
    CHECK(a->a->a->kind == Assertion::Kind::Sep);
}

TEST_CASE("substitution avoids capture") {
    const AstPtr a = parse_assertion("exists z'. x = z'");
    CHECK_THROWS_AS(subst(a, "x", e_var("z'")), ConfigError);
    CHECK(equal(*subst(a, "z'", e_var("y")), *a)); // bound occurrences stay
    CHECK(equal(*subst(a, "x", e_var("y")), *parse_assertion("exists z'. y = z'")));
    CHECK_THROWS_AS(subst(parse_assertion("x |-> 1"), "x", e_const(1)), ConfigError);
    CHECK(to_string(*subst(parse_assertion("x |-> x"), "x", e_var("y"))) == "y |-> y");
}

TEST_CASE("substitution lemma: a[e/x] at s equals a at s[x := e(s)]") {
    const UniversePtr u = make_universe(make_config(3, {1, 2}, {"x", "y"}, {"z'"}, Model::One, false));
    const int x = u->var_index("x");
    for (const char* text : {"y |-> x * (z' = x + 1 && emp)", "exists z'. y |-> z' && x < z'", "x' = x || emp",
                             "true * y |-> x - 1"}) {
        const AstPtr a = parse_assertion(text);
        for (const char* e : {"y + 1", "x' + y", "2", "null"}) {
            const ExprPtr by = parse_expr(e);
            const MemorySet lhs = eval_assertion(*subst(a, "x", by), u);
            const MemorySet rhs = eval_assertion(*a, u);
            std::size_t mismatches = 0;
            for (std::uint64_t st = 0; st < u->num_stores(); ++st) {
                const std::uint64_t moved = u->set(st, x, eval_expr(*by, *u, st));
                for (std::uint32_t h = 0; h < u->num_heaps(); ++h) {
                    mismatches += lhs.test(st, h) != rhs.test(moved, h);
                }
            }
            CHECK_MESSAGE(mismatches == 0, text, " with x := ", e);
        }
    }
}

TEST_CASE("emp_X expands to mirror equalities") {
    const AstPtr e = expand_emp_vars(parse_assertion("empX{x}"));
    CHECK(equal(*e, *parse_assertion("x = x' && emp")));
}

TEST_CASE("arithmetic wraps and null absorbs; order is false on null") {
    const UniversePtr u = make_universe(make_config(3, {1, 2}, {"x", "y"}, {}, Model::One, false));
    const std::uint64_t st = u->set(u->set(0, 0, 2), 1, kNull); // x = 2, y = null
    CHECK(eval_expr(*parse_expr("x + 2"), *u, st) == 1);
    CHECK(eval_expr(*parse_expr("0 - 1"), *u, st) == 2);
    CHECK(eval_expr(*parse_expr("y + 1"), *u, st) == kNull);
    CHECK_FALSE(eval_bool(*parse_bool("y < x"), *u, st));
    CHECK_FALSE(eval_bool(*parse_bool("y <= y"), *u, st));
    CHECK(eval_bool(*parse_bool("y = null"), *u, st));
    CHECK(eval_bool(*parse_bool("y != x"), *u, st));
}

TEST_CASE("variable collection") {
    CHECK(command_vars(*parse_command("x := [y]; z := 1")) == VarSet{"x", "y", "z"});
    CHECK(all_vars(*parse_assertion("exists a'. x |-> a'")) == VarSet{"a'", "x"});
    CHECK(free_vars(*parse_assertion("exists a'. x |-> a'")) == VarSet{"x"});
}
