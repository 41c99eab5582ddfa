#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "typecsp/errors.hpp"
#include "typecsp/reduction.hpp"

#include "gen.hpp"

#include <algorithm>
#include <set>

using namespace typecsp;

namespace {

PartitionSpec one_infinite() { return {{{"N", std::nullopt}}}; }

ReductSpec equality_reduct() {
    return {{{"Eq", 2, parse_formula("z1 = z2")},
             {"Neq", 2, parse_formula("!(z1 = z2)")}}};
}

CspInstance worked_example() {
    CspInstance psi;
    psi.vars = {"x1", "x2", "x3", "x4"};
    psi.conjuncts = {{"Eq", {"x1", "x2"}},
                     {"Eq", {"x2", "x3"}},
                     {"Eq", {"x3", "x4"}},
                     {"Neq", {"x1", "x4"}}};
    return psi;
}

SolveResult run(const FiniteCspInstance& phi, const TypeStructure& t) {
    return solve(to_solver_instance(phi, t));
}

} // namespace

TEST_CASE("the worked example reduces to the known constraints") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);
    FiniteCspInstance phi = reduce(worked_example(), t);

    REQUIRE(phi.vars.size() == 4);
    // subsets in lexicographic order; write v_j for the subset omitting x_j
    CHECK(phi.vars[0] == std::vector<int>{0, 1, 2}); // v4
    CHECK(phi.vars[3] == std::vector<int>{1, 2, 3}); // v1

    using U = std::tuple<int, std::string, IndexMap>;
    std::set<U> got;
    for (const auto& c : phi.unary)
        got.insert({c.var, t.reduct().relations[c.relation].name, c.index_map});
    std::set<U> expected{
        {0, "Eq", {1, 2}},  // U3(v4)
        {0, "Eq", {2, 3}},  // U1(v4)
        {1, "Eq", {1, 2}},  // U3(v3)
        {1, "Neq", {1, 3}}, // V2(v3)
        {2, "Eq", {2, 3}},  // U1(v2)
        {2, "Neq", {1, 3}}, // V2(v2)
        {3, "Eq", {1, 2}},  // U3(v1)
        {3, "Eq", {2, 3}},  // U1(v1)
    };
    CHECK(got == expected);

    // the two compatibility constraints cited for the example
    bool has_v4_v2 = false, has_v4_v3 = false;
    for (const auto& c : phi.comp) {
        if (c.u == 0 && c.v == 2 && c.iu == IndexMap{1, 3} && c.iv == IndexMap{1, 2})
            has_v4_v2 = true;
        if (c.u == 0 && c.v == 1 && c.iu == IndexMap{1, 2} && c.iv == IndexMap{1, 2})
            has_v4_v3 = true;
    }
    CHECK(has_v4_v2);
    CHECK(has_v4_v3);
    CHECK(phi.comp.size() == 6);

    CHECK(run(phi, t).status == SolveStatus::Unsat);
}

TEST_CASE("an unconstrained instance only gets compatibility constraints") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);
    CspInstance psi;
    psi.vars = {"a", "b", "c", "d"};
    FiniteCspInstance phi = reduce(psi, t);
    CHECK(phi.vars.size() == 4);
    CHECK(phi.unary.empty());
    CHECK(phi.comp.size() == 6);
    CHECK(run(phi, t).status == SolveStatus::Sat);
}

TEST_CASE("short instances are padded to m variables") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);
    CspInstance psi;
    psi.vars = {"x1", "x2"};
    psi.conjuncts = {{"Eq", {"x1", "x2"}}};
    FiniteCspInstance phi = reduce(psi, t);
    CHECK(phi.var_names.size() == 3);
    CHECK(phi.original_var_count == 2);
    CHECK(phi.vars.size() == 1);
    CHECK(phi.comp.empty());

    SolveResult res = run(phi, t);
    REQUIRE(res.status == SolveStatus::Sat);
    Witness w = lift_solution(psi, phi, t, res.assignment);
    // padding stripped: only x1, x2 appear, in one class
    std::set<std::string> seen;
    for (const auto& c : w.classes)
        for (const auto& v : c.vars) seen.insert(v);
    CHECK(seen == std::set<std::string>{"x1", "x2"});
    bool together = false;
    for (const auto& c : w.classes)
        if (std::count(c.vars.begin(), c.vars.end(), "x1") &&
            std::count(c.vars.begin(), c.vars.end(), "x2"))
            together = true;
    CHECK(together);
    CHECK(verify_witness(psi, w, t.partition(), t.reduct()));
}

TEST_CASE("a self-contradictory atom empties the covering relation") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);
    CspInstance psi;
    psi.vars = {"x1"};
    psi.conjuncts = {{"Neq", {"x1", "x1"}}};
    FiniteCspInstance phi = reduce(psi, t);
    CHECK(run(phi, t).status == SolveStatus::Unsat);
}

TEST_CASE("metrics count variables and constraints exactly") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);

    ReductionMetrics wm = metrics(reduce(worked_example(), t));
    CHECK(wm.variables == 4);
    CHECK(wm.unary_constraints == 8);
    CHECK(wm.comp_constraints == 6);

    CspInstance five;
    five.vars = {"a", "b", "c", "d", "e"};
    ReductionMetrics fm = metrics(reduce(five, t));
    CHECK(fm.variables == 10);      // C(5,3)
    CHECK(fm.comp_constraints == 45); // any two 3-subsets of a 5-set intersect

    CspInstance three;
    three.vars = {"a", "b", "c"};
    ReductionMetrics tm = metrics(reduce(three, t));
    CHECK(tm.variables == 1);
    CHECK(tm.comp_constraints == 0);
}

TEST_CASE("verify_witness rejects bad witnesses") {
    PartitionSpec spec{{{"I1", std::nullopt}, {"S", 1}}};
    ReductSpec reduct{{{"Eq", 2, parse_formula("z1 = z2")}}};
    CspInstance psi;
    psi.vars = {"x1", "x2"};

    // two classes in one singleton block
    Witness overfull;
    overfull.classes = {{{"x1"}, "S"}, {{"x2"}, "S"}};
    CHECK_FALSE(verify_witness(psi, overfull, spec, reduct));

    // violated conjunct
    psi.conjuncts = {{"Eq", {"x1", "x2"}}};
    Witness split;
    split.classes = {{{"x1"}, "I1"}, {{"x2"}, "I1"}};
    CHECK_FALSE(verify_witness(psi, split, spec, reduct));

    Witness merged;
    merged.classes = {{{"x1", "x2"}, "I1"}};
    CHECK(verify_witness(psi, merged, spec, reduct));

    // the worked example is contradictory: no witness can verify
    CspInstance hard = worked_example();
    ReductSpec eq = equality_reduct();
    Witness all_one;
    all_one.classes = {{{"x1", "x2", "x3", "x4"}, "I1"}};
    CHECK_FALSE(verify_witness(hard, all_one, spec, eq));
    Witness last_out;
    last_out.classes = {{{"x1", "x2", "x3"}, "I1"}, {{"x4"}, "I1"}};
    CHECK_FALSE(verify_witness(hard, last_out, spec, eq));
}

TEST_CASE("reduction equivalence against brute force on random triples") {
    testgen::Rng rng(160);
    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 120; ++trial) {
        PartitionSpec spec = testgen::random_stabilised_spec(rng);
        ReductSpec reduct = testgen::random_reduct(rng, spec);
        CspInstance psi = testgen::random_instance(rng, reduct);

        int m = choose_m(spec, reduct, Purpose::Reduce);
        TypeStructure t = TypeStructure::build(spec, reduct, m);
        FiniteCspInstance phi = reduce(psi, t);
        SolveResult res = run(phi, t);
        REQUIRE(res.status != SolveStatus::NodeLimit);

        bool expected = testgen::brute_force_satisfiable(
            psi, reduct, testgen::make_universe(spec, (int)psi.vars.size()));
        CHECK((res.status == SolveStatus::Sat) == expected);
        (expected ? sat : unsat) += 1;

        if (res.status == SolveStatus::Sat) {
            Witness w = lift_solution(psi, phi, t, res.assignment);
            CHECK(verify_witness(psi, w, spec, reduct));
        }

        // both attachment policies agree on satisfiability
        FiniteCspInstance canonical = reduce(psi, t, AttachPolicy::SingleCanonical);
        CHECK((run(canonical, t).status == SolveStatus::Sat) == expected);
    }
    CHECK(sat > 10);
    CHECK(unsat > 10);
}

TEST_CASE("the reduction refuses type structures below m = 3") {
    ReductSpec unary_only{{{"U", 1, parse_formula("N(z1)")}}};
    TypeStructure t = TypeStructure::build(one_infinite(), unary_only, 2);
    CspInstance psi;
    psi.vars = {"x1"};
    CHECK_THROWS_AS(reduce(psi, t), ValidationError);
}

TEST_CASE("conjuncts referencing unknown names are rejected") {
    TypeStructure t = TypeStructure::build(one_infinite(), equality_reduct(), 3);
    CspInstance psi;
    psi.vars = {"x1"};
    psi.conjuncts = {{"Nope", {"x1", "x1"}}};
    CHECK_THROWS_AS(reduce(psi, t), ValidationError);

    CspInstance psi2;
    psi2.vars = {"x1"};
    psi2.conjuncts = {{"Eq", {"x1", "ghost"}}};
    CHECK_THROWS_AS(reduce(psi2, t), ValidationError);
}
