#include <doctest.h>

#include <fstream>
#include <sstream>

#include "sepkit/checker.hpp"

using namespace sepkit;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(SEPKIT_FIXTURES_DIR) + "/" + name);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Verdict check_text(const std::string& text) {
    const auto ds = parse_derivations(text);
    REQUIRE(ds.size() == 1);
    return check_derivation(ds.front());
}

} // namespace

TEST_CASE("logic names") {
    const Logic l = parse_logic("isl+2", Model::One);
    CHECK(l.id == LogicId::IslPlus);
    CHECK(l.model == Model::Two);
    CHECK(parse_logic("nc+", Model::Two).model == Model::Two);
    CHECK(to_string(Logic{LogicId::SilPlus, Model::One}) == "sil+1");
    CHECK_THROWS_AS(parse_logic("hoare", Model::One), ParseError);
    CHECK(default_reserved(LogicId::IslPlus));
    CHECK_FALSE(default_reserved(LogicId::SlPlus));
}

TEST_CASE("triples with outcome tags") {
    const LogicalTriple load = parse_triple("{y |-> 1} x := [y] {y |-> 1 && x = 1}");
    CHECK(load.cmd->kind == Command::Kind::Load);
    CHECK(load.outcome == Outcome::Ok);
    CHECK(parse_triple("{emp} error() [er] {emp}").outcome == Outcome::Er);
    CHECK(parse_triple("{emp} skip [either] {emp}").outcome == Outcome::Either);
    CHECK_THROWS_AS(parse_triple("{emp} skip [maybe] {emp}"), ParseError);
    CHECK_THROWS_AS(parse_triple("{emp} skip"), ParseError);
    const LogicalTriple t = parse_triple("{emp} error() [er] {emp}");
    CHECK(equal(parse_triple(to_string(t)), t));
}

TEST_CASE("every axiom instance is accepted as its own derivation") {
    for (LogicId id : {LogicId::SlPlus, LogicId::IslPlus, LogicId::SilPlus, LogicId::NcPlus}) {
        for (Model model : {Model::One, Model::Two}) {
            for (const AxiomSchema& s : available_axioms(id, model, default_reserved(id))) {
                AxiomInstance inst;
                inst.e = parse_expr("y + 1");
                inst.b = parse_bool("x = y");
                inst.z = parse_expr("z'");
                Derivation d;
                d.rule = s.name;
                d.logic = Logic{id, model};
                d.conclusion = s.build(inst, {"x", "y"});
                const Verdict v = check_derivation(d);
                CHECK_MESSAGE(v.accepted, to_string(*d.logic), " ", s.name, ": ", v.reason);

                // The same conclusion with pre and post swapped is not an instance.
                if (!equivalent(*d.conclusion.pre, *d.conclusion.post, derivation_universe(d, {}))) {
                    std::swap(d.conclusion.pre, d.conclusion.post);
                    CHECK_FALSE_MESSAGE(check_derivation(d).accepted, s.name);
                }
            }
        }
    }
}

TEST_CASE("rejections name the offending node") {
    const Verdict unknown = check_text("(rule Magic :logic sl+1 :conclusion \"{emp} skip {emp}\")");
    CHECK_FALSE(unknown.accepted);
    CHECK(unknown.path == std::vector<std::string>{"Magic"});
    CHECK(unknown.reason.find("unknown rule") != std::string::npos);

    const Verdict mixed = check_text(R"((rule Exists :logic sl+1 :exists "z'"
        :conclusion "{emp} skip {emp}"
        (rule Assume :logic nc+1 :conclusion "{emp} skip {emp}")))");
    CHECK_FALSE(mixed.accepted);
    CHECK(mixed.path == std::vector<std::string>{"Exists", "Assume"});

    const Verdict stated = check_text(R"((rule Assign :logic sl+1 :subst ((x . "x") (e . "x+1"))
        :conclusion "{empX{x, y}} x := x + 1 [ok]{empX{y} && x = x' + 1}"))");
    CHECK(stated.accepted);
    const Verdict contradicting = check_text(R"((rule Assign :logic sl+1 :subst ((e . "x+2"))
        :conclusion "{empX{x, y}} x := x + 1 {empX{y} && x = x' + 1}"))");
    CHECK_FALSE(contradicting.accepted);
    CHECK(contradicting.reason.find("does not match") != std::string::npos);

    const Verdict tag = check_text("(rule Error :logic sl+1 :conclusion \"{emp} error() [er] {emp}\")");
    CHECK_FALSE(tag.accepted);
}

TEST_CASE("fixtures") {
    CHECK(check_text(fixture("sl_more_expressive.drv")).accepted);
    CHECK(check_text(fixture("isl_more_expressive.drv")).accepted);
    for (const char* name : {"wrong_frame.drv", "isl_classical_frame.drv"}) {
        const Verdict v = check_text(fixture(name));
        CHECK_FALSE(v.accepted);
        CHECK(v.path == std::vector<std::string>{"Frame"});
        CHECK(v.reason.find("heap-compatible") != std::string::npos);
    }
    CheckOptions lax;
    lax.mutations.frame_skips_compat = true;
    CHECK(check_derivation(parse_derivations(fixture("wrong_frame.drv")).front(), lax).accepted);
}

TEST_CASE("derivations print and parse back") {
    for (const char* name : {"sl_more_expressive.drv", "isl_more_expressive.drv"}) {
        const auto ds = parse_derivations(fixture(name));
        const auto again = parse_derivations(to_sexpr(ds.front()));
        REQUIRE(again.size() == 1);
        CHECK(equal(again.front().conclusion, ds.front().conclusion));
        CHECK(check_derivation(again.front()).accepted);
    }
}

TEST_CASE("malformed derivation files") {
    CHECK_THROWS_AS(parse_derivations("(rule Assume)"), ParseError);
    CHECK_THROWS_AS(parse_derivations("(rule Assume :conclusion \"{emp\")"), ParseError);
    CHECK_THROWS_AS(parse_derivations("(rule Assume :logic sl+ :conclusion \"{emp} skip {emp}\")"), ParseError);
    CHECK_THROWS_AS(parse_derivations("(rule Assume :colour \"red\" :conclusion \"{emp} skip {emp}\")"), ParseError);
    CHECK_THROWS_AS(parse_derivations("(rule Assume"), ParseError);
}
