#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "typecsp/algebra.hpp"
#include "typecsp/errors.hpp"
#include "typecsp/polymorphism.hpp"

#include "gen.hpp"

using namespace typecsp;

namespace {

FiniteAlgebra min_algebra() {
    return {2, {{"min", {2, 2, {0, 0, 0, 1}}}}};
}

FiniteAlgebra projections_only() {
    return {2,
            {{"p1", OperationTable::projection(2, 2, 1)},
             {"p2", OperationTable::projection(2, 2, 2)}}};
}

bool contains_cyclic_ternary(const std::vector<OperationTable>& closure) {
    for (const auto& t : closure)
        if (t.arity == 3 &&
            check_identity(std::vector<OperationTable>{t}, IdentitySpec::cyclic(3), t.domain_size))
            return true;
    return false;
}

} // namespace

TEST_CASE("subalgebras of known algebras") {
    auto subs = subalgebras(min_algebra());
    CHECK(subs == std::vector<std::vector<int>>{{0}, {1}, {0, 1}});

    // a constant-0 unary operation forces 0 into every subuniverse
    FiniteAlgebra constant{2, {{"zero", {2, 1, {0, 0}}}}};
    for (const auto& s : subalgebras(constant))
        CHECK(std::count(s.begin(), s.end(), 0) == 1);

    FiniteAlgebra mod3{3, {{"plus", {3, 2, {0, 1, 2, 1, 2, 0, 2, 0, 1}}}}};
    CHECK(subalgebras(mod3) == std::vector<std::vector<int>>{{0}, {0, 1, 2}});
}

TEST_CASE("subalgebras are exactly the closed subsets") {
    testgen::Rng rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        int d = testgen::pick(rng, 2, 4);
        FiniteAlgebra a;
        a.d = d;
        int nops = testgen::pick(rng, 1, 2);
        for (int i = 0; i < nops; ++i) {
            int arity = testgen::pick(rng, 1, 2);
            std::size_t entries = 1;
            for (int k = 0; k < arity; ++k) entries *= (std::size_t)d;
            OperationTable t{d, arity, std::vector<int>(entries)};
            for (auto& v : t.values) v = testgen::pick(rng, 0, d - 1);
            a.ops.push_back({"f" + std::to_string(i), std::move(t)});
        }
        auto got = subalgebras(a);

        // independent filter over all nonempty subsets
        std::vector<std::vector<int>> expected;
        for (int mask = 1; mask < (1 << d); ++mask) {
            std::vector<int> subset;
            for (int x = 0; x < d; ++x)
                if ((mask >> x) & 1) subset.push_back(x);
            bool closed = true;
            for (const auto& op : a.ops) {
                int k = op.table.arity;
                std::vector<std::size_t> odo(k, 0);
                std::vector<int> args(k);
                while (closed) {
                    for (int i = 0; i < k; ++i) args[i] = subset[odo[i]];
                    int out = op.table.values[op.table.index_of(args)];
                    if (!((mask >> out) & 1)) closed = false;
                    int i = k - 1;
                    while (i >= 0 && odo[i] + 1 == subset.size()) odo[i--] = 0;
                    if (i < 0) break;
                    ++odo[i];
                }
            }
            if (closed) expected.push_back(std::move(subset));
        }
        std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
            return x.size() != y.size() ? x.size() < y.size() : x < y;
        });
        CHECK(got == expected);
    }
}

TEST_CASE("trivial two-element quotients") {
    auto q = has_trivial_two_quotient(projections_only());
    REQUIRE(q.has_value());
    CHECK(q->carrier == std::vector<int>{0, 1});
    CHECK(q->projection_index == std::vector<int>{1, 2});

    CHECK_FALSE(has_trivial_two_quotient(min_algebra()).has_value());

    FiniteAlgebra first{2, {{"f", OperationTable::projection(2, 2, 1)}}};
    CHECK(has_trivial_two_quotient(first).has_value());
}

TEST_CASE("mashup equations") {
    OperationTable p1 = OperationTable::projection(2, 2, 1);
    OperationTable p2 = OperationTable::projection(2, 2, 2);

    // any operation is a mashup of itself with itself
    for (int ell = 1; ell <= 2; ++ell) {
        CHECK(is_mashup(p1, p1, p1, ell, 0, 1));
        CHECK(is_mashup(p2, p2, p2, ell, 0, 1));
    }

    // g=p1, h=p2, ell=1, r=0, s=1: the equations read omega(1,0) = p1(1,0) = 1
    // and omega(0,1) = p2(0,1) = 1; each projection fails one of them
    CHECK_FALSE(is_mashup(p1, p1, p2, 1, 0, 1)); // p1(0,1) = 0 != p2(0,1) = 1
    CHECK_FALSE(is_mashup(p2, p1, p2, 1, 0, 1)); // p2(1,0) = 0 != p1(1,0) = 1
    OperationTable max_table{2, 2, {0, 1, 1, 1}};
    CHECK(is_mashup(max_table, p1, p2, 1, 0, 1));

    // differing on the first pattern breaks the first equation
    OperationTable tweaked = p1;
    tweaked.values[tweaked.index_of(std::vector<int>{0, 1})] ^= 1;
    CHECK_FALSE(is_mashup(tweaked, p1, p1, 2, 0, 1));

    CHECK_THROWS_AS(is_mashup(p1, p1, p1, 1, 0, 0), ValidationError);
    CHECK_THROWS_AS(is_mashup(p1, p1, p1, 3, 0, 1), ValidationError);
}

TEST_CASE("mashup premise over the full binary table set") {
    // all 16 binary tables: witnesses exist for every position and pair
    FiniteAlgebra full;
    full.d = 2;
    int i = 0;
    for (auto& t : testgen::all_operations(2, 2))
        full.ops.push_back({"f" + std::to_string(i++), std::move(t)});
    // name g = p1, h = p2 by locating them
    std::string g, h;
    for (const auto& op : full.ops) {
        if (op.table == OperationTable::projection(2, 2, 1)) g = op.name;
        if (op.table == OperationTable::projection(2, 2, 2)) h = op.name;
    }
    CHECK_FALSE(mashup_premise_gap(full, g, h).has_value());

    auto gap = mashup_premise_gap(projections_only(), "p1", "p2");
    REQUIRE(gap.has_value());
    CHECK(gap->ell == 1);
    CHECK(gap->r == 0);
    CHECK(gap->s == 1);

    // g = h holds trivially: g witnesses every case
    CHECK_FALSE(mashup_premise_gap(projections_only(), "p1", "p1").has_value());
}

TEST_CASE("the mashup lemma holds on crafted and random algebras") {
    MashupVerdict proj = check_mashup_lemma(projections_only(), "p1", "p2");
    CHECK_FALSE(proj.premise);
    CHECK(proj.lemma_respected);

    MashupVerdict same = check_mashup_lemma(projections_only(), "p1", "p1");
    CHECK(same.premise);
    CHECK(same.conclusion);
    CHECK(same.lemma_respected);

    testgen::Rng rng(3000);
    for (int trial = 0; trial < 150; ++trial) {
        int d = testgen::pick(rng, 2, 3);
        FiniteAlgebra a;
        a.d = d;
        int nops = testgen::pick(rng, 1, 2);
        int arity = testgen::pick(rng, 1, 2);
        for (int i = 0; i < nops; ++i) {
            std::size_t entries = 1;
            for (int k = 0; k < arity; ++k) entries *= (std::size_t)d;
            OperationTable t{d, arity, std::vector<int>(entries)};
            for (auto& v : t.values) v = testgen::pick(rng, 0, d - 1);
            a.ops.push_back({"f" + std::to_string(i), std::move(t)});
        }
        const std::string& g = a.ops[testgen::pick(rng, 0, nops - 1)].name;
        const std::string& h = a.ops[testgen::pick(rng, 0, nops - 1)].name;
        CHECK(check_mashup_lemma(a, g, h).lemma_respected);
    }
}

TEST_CASE("clone closure of known algebras") {
    auto min_closure = clone_closure(min_algebra(), 2);
    bool has_min = false, has_max = false;
    for (const auto& t : min_closure) {
        if (t == OperationTable{2, 2, {0, 0, 0, 1}}) has_min = true;
        if (t == OperationTable{2, 2, {0, 1, 1, 1}}) has_max = true;
    }
    CHECK(has_min);
    CHECK_FALSE(has_max);
    for (const auto& t : min_closure)
        CHECK((t.arity == 1 || t.arity == 2));

    // projections compose to projections
    auto proj_closure = clone_closure(projections_only(), 3);
    int unary = 0, binary = 0, ternary = 0;
    for (const auto& t : proj_closure) {
        if (t.arity == 1) ++unary;
        if (t.arity == 2) ++binary;
        if (t.arity == 3) ++ternary;
    }
    CHECK(unary == 1);
    CHECK(binary == 2);
    CHECK(ternary == 3);

    // NAND is functionally complete at arity 2
    FiniteAlgebra nand{2, {{"nand", {2, 2, {1, 1, 1, 0}}}}};
    auto nand_closure = clone_closure(nand, 2);
    int nand_binary = 0;
    for (const auto& t : nand_closure)
        if (t.arity == 2) ++nand_binary;
    CHECK(nand_binary == 16);

    CHECK_THROWS_AS(clone_closure(min_algebra(), 4), GuardError);
    FiniteAlgebra big{4, {{"id", {4, 1, {0, 1, 2, 3}}}}};
    CHECK_THROWS_AS(clone_closure(big, 2), GuardError);
}

TEST_CASE("trivial quotients match cyclic terms on idempotent binary algebras") {
    // the four idempotent binary operations on {0,1}
    for (int a01 = 0; a01 < 2; ++a01)
        for (int a10 = 0; a10 < 2; ++a10) {
            FiniteAlgebra a{2, {{"f", {2, 2, {0, a01, a10, 1}}}}};
            bool trivial_quotient = has_trivial_two_quotient(a).has_value();
            bool cyclic = contains_cyclic_ternary(clone_closure(a, 3));
            CHECK(trivial_quotient == !cyclic);
        }
}
