#include <doctest.h>

#include "sepkit/assertion_semantics.hpp"
#include "sepkit/program_semantics.hpp"

using namespace sepkit;

namespace {

UniversePtr universe(Model model = Model::One) {
    return make_universe(make_config(3, {1, 2}, {"x", "y"}, {}, model, false));
}

MemorySet eval(const char* text, const UniversePtr& u) { return eval_assertion(*parse_assertion(text), u); }

MemorySet forward(const char* cmd, const char* pre, const UniversePtr& u) {
    return run_forward(*parse_command(cmd), eval(pre, u));
}

} // namespace

TEST_CASE("heap commands, forward") {
    const UniversePtr u = universe();
    CHECK(forward("x := alloc()", "emp", u) == eval("x |-> _", u));
    CHECK(forward("x := alloc()", "empX{x, y}", u) == eval("exists x'. empX{y} * x |-> _", u));
    // Only two locations: a third allocation has nowhere to go.
    CHECK(forward("x := alloc()", "true * x' |-> _ * y' |-> _", u).empty());
    CHECK(forward("free(x)", "x |-> _", u) == eval("emp && (x = 1 || x = 2)", u));
    CHECK(forward("x := [y]", "y |-> 1", u) == eval("y |-> 1 && x = 1", u));
    CHECK(forward("[x] := y", "x |-> _", u) == eval("x |-> y", u));
}

TEST_CASE("faults abort under the abort-propagating semantics") {
    const UniversePtr u = universe();
    const MemorySet out = forward("free(x)", "emp", u);
    CHECK(out.includes_abort());
    CHECK(out.no_memories());
    CHECK(forward("error()", "emp", u).includes_abort());
    // Abort propagates through sequencing.
    CHECK(forward("free(x); y := 1", "emp", u).includes_abort());
    CHECK_FALSE(forward("x := alloc(); free(x)", "emp", u).includes_abort());
}

TEST_CASE("model 2 leaves a deallocated cell, which alloc may reuse") {
    const UniversePtr u = universe(Model::Two);
    CHECK(forward("free(x)", "x |-> _", u) == eval("x !->", u));
    CHECK(forward("free(x); y := [x]", "x |-> _", u).includes_abort());
    CHECK(forward("x := alloc()", "true * x' |-> _ * y' |-> _", u).empty());
    CHECK(forward("x := alloc()", "y !->", u) == eval("x |-> _ && x = y || x |-> _ * y !->", u));
}

TEST_CASE("ok/er tagged forward semantics") {
    const UniversePtr u = universe();
    const MemorySet p = eval("emp", u);
    const TaggedMemorySet out = run_forward(*parse_command("x := 1; error(); y := 2"),
                                            TaggedMemorySet(p, MemorySet(u)));
    CHECK(out.ok.empty());
    CHECK(out.er == eval("emp && x = 1", u));
    const TaggedMemorySet fault = run_forward(*parse_command("free(x)"), TaggedMemorySet(p, MemorySet(u)));
    CHECK(fault.er == p); // the faulting state itself
}

TEST_CASE("iteration is a fixpoint") {
    const UniversePtr u = universe();
    CHECK(forward("(x := x + 1)*", "x = 0 && emp", u) == eval("x != null && emp", u));
    CHECK(forward("(x := x + 1)*", "x = null && emp", u) == eval("x = null && emp", u));
    CHECK(forward("(x < 2)?; x := x + 1", "x = 0 && emp", u) == eval("x = 1 && emp", u));
}

TEST_CASE("backward semantics") {
    const UniversePtr u = universe();
    CHECK(run_backward(*parse_command("free(x)"), eval("emp", u)) == eval("x |-> _", u));
    CHECK(run_backward(*parse_command("x := 1"), eval("x = 1 && emp", u)) == eval("emp", u));
    CHECK(run_backward(*parse_command("error()"), eval("true", u)).empty());
    CHECK(run_backward(*parse_command("(x := x + 1)*"), eval("x = 2 && emp", u)) == eval("x != null && emp", u));
}

TEST_CASE("backward images are the memories with a successor in the target") {
    const UniversePtr u = universe(Model::Two);
    const MemorySet q = eval("x |-> y", u);
    for (const char* text : {"x := alloc()", "[x] := y", "free(x); x := alloc()", "(y := [x] + y := y + 1)*"}) {
        const CmdPtr c = parse_command(text);
        const MemorySet back = run_backward(*c, q);
        for (std::uint64_t st = 0; st < u->num_stores(); st += 3) {
            for (std::uint32_t h = 0; h < u->num_heaps(); ++h) {
                MemorySet one(u);
                one.set(st, h);
                CHECK_MESSAGE(back.test(st, h) == run_forward(*c, one).intersects(q), text);
            }
        }
    }
}
