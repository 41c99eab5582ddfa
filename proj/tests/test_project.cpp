#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "typecsp/errors.hpp"
#include "typecsp/project.hpp"

using namespace typecsp;

namespace {

Json equality_project() {
    return Json::parse(R"json({
        "partition": {"blocks": [{"name": "N", "size": "inf"}]},
        "reduct": {"relations": [
            {"name": "Eq", "arity": 2, "def": "z1 = z2"},
            {"name": "Neq", "arity": 2, "def": "!(z1 = z2)"}
        ]},
        "instances": [
            {"vars": ["x1", "x2"], "conjuncts": [{"rel": "Eq", "args": ["x1", "x2"]}]}
        ],
        "assertions": {"is_model_complete_core": true, "tame_endomorphisms": true}
    })json");
}

} // namespace

TEST_CASE("projects load with instances and assertions") {
    ProjectFile project = load_project(equality_project());
    CHECK(project.partition.blocks.size() == 1);
    CHECK(project.reduct.relations.size() == 2);
    REQUIRE(project.instances.size() == 1);
    CHECK(project.instances[0].vars.size() == 2);
    CHECK(project.assert_model_complete_core);
    CHECK(project.assert_tame_endomorphisms);
    CHECK_FALSE(project.was_stabilised);
}

TEST_CASE("schema errors carry a JSON path") {
    Json bad = equality_project();
    bad["reduct"]["relations"][0].erase("arity");
    try {
        load_project(bad);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("/reduct/relations/0/") != std::string::npos);
    }

    Json unknown_block = equality_project();
    unknown_block["reduct"]["relations"][0]["def"] = "Ghost(z1)";
    CHECK_THROWS_AS(load_project(unknown_block), ValidationError);

    Json bad_arity = equality_project();
    bad_arity["reduct"]["relations"][0]["arity"] = 1; // def has width 2
    CHECK_THROWS_AS(load_project(bad_arity), ValidationError);

    Json bad_instance = equality_project();
    bad_instance["instances"][0]["conjuncts"][0]["rel"] = "Nope";
    CHECK_THROWS_AS(load_project(bad_instance), ValidationError);
}

TEST_CASE("non-stabilised partitions are stabilised on load") {
    Json j = Json::parse(R"json({
        "partition": {"blocks": [{"name": "F", "size": 2}, {"name": "I", "size": "inf"}]},
        "reduct": {"relations": [{"name": "InF", "arity": 1, "def": "F(z1)"}]}
    })json");
    ProjectFile project = load_project(j);
    CHECK(project.was_stabilised);
    REQUIRE(project.partition.blocks.size() == 3);
    CHECK(project.partition.stabilised());
    // the membership formula was rewritten to the split blocks
    CHECK(project.reduct.relations[0].def ==
          parse_formula("F#1(z1) | F#2(z1)"));
}

TEST_CASE("formula AST json round trips") {
    Formula f = parse_formula("(z1 = z2 | S(z3)) & !false");
    CHECK(formula_from_json(formula_to_json(f)) == f);
}

TEST_CASE("instance and witness json round trips") {
    CspInstance psi;
    psi.vars = {"a", "b"};
    psi.conjuncts = {{"Eq", {"a", "b"}}};
    Json j = instance_to_json(psi);
    CspInstance back = instance_from_json(j);
    CHECK(back.vars == psi.vars);
    CHECK(back.conjuncts.size() == 1);
    CHECK(back.conjuncts[0].rel == "Eq");

    Witness w;
    w.classes = {{{"a", "b"}, "N"}};
    Witness wb = witness_from_json(witness_to_json(w));
    REQUIRE(wb.classes.size() == 1);
    CHECK(wb.classes[0].vars == std::vector<std::string>{"a", "b"});
    CHECK(wb.classes[0].block == "N");
}

TEST_CASE("solver instance json round trips") {
    SolverInstance inst;
    inst.domains = {Bitset(3, true), Bitset(3, true)};
    Bitset allowed(3);
    allowed.set(1);
    allowed.set(2);
    inst.unary.push_back({0, allowed});
    auto m = std::make_shared<BitMatrix>(3, 3);
    m->set(0, 1);
    m->set(2, 2);
    inst.binary.push_back({0, 1, m, nullptr, ""});
    inst.binary.push_back(
        {1, 0, nullptr, std::make_shared<FnEqPredicate>(std::vector<int>{0, 1, 0},
                                                        std::vector<int>{1, 0, 1}),
         ""});
    inst.nary.push_back({{0, 1}, {{0, 0}, {2, 1}}, ""});

    SolverInstance back = solver_instance_from_json(solver_instance_to_json(inst));
    CHECK(back.var_count() == 2);
    CHECK(back.unary.size() == 1);
    CHECK(back.unary[0].allowed == allowed);
    REQUIRE(back.binary.size() == 2);
    CHECK(back.binary[0].table->at(0, 1));
    CHECK_FALSE(back.binary[0].table->at(1, 1));
    CHECK(back.binary[1].pred->holds(0, 1));
    CHECK_FALSE(back.binary[1].pred->holds(0, 0));
    CHECK(back.nary[0].tuples == inst.nary[0].tuples);

    // solving either form gives the same outcome
    CHECK(solve(inst).status == solve(back).status);

    // opaque callbacks refuse to serialize
    SolverInstance opaque;
    opaque.domains = {Bitset(2, true), Bitset(2, true)};
    opaque.binary.push_back(
        {0, 1, nullptr, std::make_shared<LambdaPredicate>([](int, int) { return true; }), ""});
    CHECK_THROWS_AS(solver_instance_to_json(opaque), ValidationError);
}

TEST_CASE("algebra and structure json round trips") {
    FiniteAlgebra a{2, {{"min", {2, 2, {0, 0, 0, 1}}}}};
    Json j = algebra_to_json(a);
    FiniteAlgebra back = algebra_from_json(j);
    REQUIRE(back.ops.size() == 1);
    CHECK(back.ops[0].name == "min");
    CHECK(back.ops[0].table == a.ops[0].table);

    CHECK_THROWS_AS(algebra_from_json(Json::parse(R"json({"d":2,"ops":{"bad":{"arity":2,"table":[0,1]}}})json")),
                    ValidationError);

    FiniteStructure s;
    s.d = 2;
    s.relations.push_back({"R", 2, {{0, 1}, {1, 0}}});
    FiniteStructure sb = finite_structure_from_json(finite_structure_to_json(s));
    REQUIRE(sb.relations.size() == 1);
    CHECK(sb.relations[0].tuples == s.relations[0].tuples);
}
