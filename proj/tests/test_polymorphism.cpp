#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "typecsp/errors.hpp"
#include "typecsp/polymorphism.hpp"

#include "gen.hpp"

using namespace typecsp;

namespace {

FiniteStructure bool_structure(std::vector<std::vector<int>> tuples, int arity,
                               bool with_constants = true) {
    FiniteStructure s;
    s.d = 2;
    if (with_constants) {
        s.relations.push_back({"Zero", 1, {{0}}});
        s.relations.push_back({"One", 1, {{1}}});
    }
    s.relations.push_back({"R", arity, std::move(tuples)});
    return s;
}

// brute-force existence of a polymorphism among all tables of the arity
bool enumeration_has(const FiniteStructure& s, const IdentitySpec& id) {
    for (const auto& f : testgen::all_operations(s.d, id.arities()[0]))
        if (check_identity(std::vector<OperationTable>{f}, id, s.d) && preserves(f, s))
            return true;
    return false;
}

TypeStructure equality_types() {
    PartitionSpec spec{{{"N", std::nullopt}}};
    ReductSpec reduct{{{"Eq", 2, parse_formula("z1 = z2")},
                       {"Neq", 2, parse_formula("!(z1 = z2)")}}};
    return TypeStructure::build(spec, reduct, 3);
}

} // namespace

TEST_CASE("indicator classes for small identities") {
    FiniteStructure bare;
    bare.d = 2;
    IndicatorInstance cyc2 = indicator_instance(bare, IdentitySpec::cyclic(2));
    CHECK(cyc2.class_counts[0] == 3); // {00}, {11}, {01 ~ 10}

    IndicatorInstance sig = indicator_instance(bare, IdentitySpec::siggers());
    CHECK(sig.class_counts[0] <= 64);
    // independent orbit count of the identification
    std::map<std::array<int, 6>, int> cls;
    int classes = 0;
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z) {
                std::array<int, 6> a{x, y, x, z, y, z}, b{y, x, z, x, z, y};
                if (!cls.count(a) && !cls.count(b)) cls[a] = cls[b] = classes++;
                else if (cls.count(a)) cls[b] = cls[a];
                else cls[a] = cls[b];
            }
    int patterned = (int)cls.size();
    CHECK(sig.class_counts[0] == 64 - patterned + classes);
}

TEST_CASE("rotation classes of the 5-type structure") {
    TypeStructure t = equality_types();
    IndicatorInstance ind = indicator_instance(t, IdentitySpec::cyclic(3));
    CHECK(ind.class_counts[0] == 45); // necklaces: (125 + 2*5) / 3
}

TEST_CASE("implication structure has a cyclic ternary polymorphism") {
    FiniteStructure s = bool_structure({{0, 0}, {0, 1}, {1, 1}}, 2);
    IdentitySpec id = IdentitySpec::cyclic(3);
    PolymorphismSearch got = has_polymorphism(s, id);
    REQUIRE(got.status == PolymorphismSearch::Status::Found);
    CHECK(check_identity(got.tables, id, 2));
    CHECK(preserves(got.tables[0], s));
    CHECK(enumeration_has(s, id)); // the majority operation, among others
}

TEST_CASE("one-in-three has no idempotent Siggers polymorphism") {
    FiniteStructure s = bool_structure({{0, 0, 1}, {0, 1, 0}, {1, 0, 0}}, 3);
    PolymorphismSearch got = has_polymorphism(s, IdentitySpec::siggers(true));
    CHECK(got.status == PolymorphismSearch::Status::None);
    // cross-check: no cyclic ternary either, by exhaustive enumeration
    CHECK_FALSE(enumeration_has(s, IdentitySpec::cyclic(3)));
}

TEST_CASE("relation-free structures always have wnu polymorphisms") {
    FiniteStructure bare;
    bare.d = 3;
    for (int k = 2; k <= 4; ++k) {
        PolymorphismSearch got = has_polymorphism(bare, IdentitySpec::wnu(k, true));
        REQUIRE(got.status == PolymorphismSearch::Status::Found);
        CHECK(got.tables[0].idempotent());
    }
}

TEST_CASE("check_identity on known tables") {
    // majority on {0,1} is cyclic
    OperationTable majority{2, 3, {0, 0, 0, 1, 0, 1, 1, 1}};
    CHECK(check_identity(std::vector<OperationTable>{majority}, IdentitySpec::cyclic(3), 2));
    CHECK(check_identity(std::vector<OperationTable>{majority}, IdentitySpec::wnu(3), 2));

    OperationTable pi1 = OperationTable::projection(2, 3, 1);
    CHECK_FALSE(check_identity(std::vector<OperationTable>{pi1}, IdentitySpec::cyclic(3), 2));
    CHECK_FALSE(check_identity(std::vector<OperationTable>{pi1}, IdentitySpec::wnu(3), 2));

    CHECK_THROWS_AS(
        check_identity(std::vector<OperationTable>{majority}, IdentitySpec::cyclic(2), 2),
        ValidationError);
}

TEST_CASE("search agrees with enumeration on random 2-element structures") {
    testgen::Rng rng(321);
    std::vector<IdentitySpec> ids{IdentitySpec::cyclic(2), IdentitySpec::cyclic(3),
                                  IdentitySpec::wnu(3)};
    for (int trial = 0; trial < 60; ++trial) {
        FiniteStructure s;
        s.d = 2;
        int nrel = testgen::pick(rng, 1, 2);
        for (int r = 0; r < nrel; ++r) {
            int arity = testgen::pick(rng, 1, 3);
            FiniteStructure::Relation rel;
            rel.name = "R" + std::to_string(r);
            rel.arity = arity;
            int count = 1 << arity;
            for (int t = 0; t < count; ++t) {
                if (!testgen::pick(rng, 0, 1)) continue;
                std::vector<int> tuple;
                for (int i = 0; i < arity; ++i) tuple.push_back((t >> i) & 1);
                rel.tuples.push_back(std::move(tuple));
            }
            s.relations.push_back(std::move(rel));
        }
        for (const auto& id : ids) {
            bool expected = enumeration_has(s, id);
            PolymorphismSearch got = has_polymorphism(s, id);
            REQUIRE(got.status != PolymorphismSearch::Status::NodeLimit);
            CHECK((got.status == PolymorphismSearch::Status::Found) == expected);
        }
    }
}

TEST_CASE("adding relations never creates polymorphisms") {
    testgen::Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        FiniteStructure base;
        base.d = 2;
        FiniteStructure::Relation r1;
        r1.name = "A";
        r1.arity = 2;
        for (int t = 0; t < 4; ++t)
            if (testgen::pick(rng, 0, 1)) r1.tuples.push_back({t >> 1, t & 1});
        base.relations.push_back(r1);

        FiniteStructure extended = base;
        FiniteStructure::Relation r2;
        r2.name = "B";
        r2.arity = 2;
        for (int t = 0; t < 4; ++t)
            if (testgen::pick(rng, 0, 1)) r2.tuples.push_back({t >> 1, t & 1});
        extended.relations.push_back(r2);

        IdentitySpec id = IdentitySpec::cyclic(3);
        bool before = has_polymorphism(base, id).status == PolymorphismSearch::Status::Found;
        bool after = has_polymorphism(extended, id).status == PolymorphismSearch::Status::Found;
        if (after) CHECK(before);
    }
}

TEST_CASE("Siggers exists iff a short cyclic operation exists, idempotent d=2") {
    // over all structures ({0,1}; {0}, {1}, R) with one binary relation
    for (int mask = 0; mask < 16; ++mask) {
        std::vector<std::vector<int>> tuples;
        for (int t = 0; t < 4; ++t)
            if ((mask >> t) & 1) tuples.push_back({t >> 1, t & 1});
        FiniteStructure s = bool_structure(std::move(tuples), 2);

        bool siggers =
            has_polymorphism(s, IdentitySpec::siggers()).status ==
            PolymorphismSearch::Status::Found;
        bool cyclic2 = enumeration_has(s, IdentitySpec::cyclic(2));
        bool cyclic3 = enumeration_has(s, IdentitySpec::cyclic(3));
        CHECK(siggers == (cyclic2 || cyclic3));
    }
}

TEST_CASE("wnu pair search returns linked tables") {
    FiniteStructure s = bool_structure({{0, 0}, {0, 1}, {1, 1}}, 2);
    PolymorphismSearch got = has_polymorphism(s, IdentitySpec::wnu_pair34());
    REQUIRE(got.status == PolymorphismSearch::Status::Found);
    REQUIRE(got.tables.size() == 2);
    CHECK(got.tables[0].arity == 4);
    CHECK(got.tables[1].arity == 3);
    CHECK(check_identity(got.tables, IdentitySpec::wnu_pair34(), 2));
}

TEST_CASE("identity parameters are range checked") {
    FiniteStructure bare;
    bare.d = 2;
    CHECK_THROWS_AS(has_polymorphism(bare, IdentitySpec::wnu(7)), ValidationError);
    CHECK_THROWS_AS(has_polymorphism(bare, IdentitySpec::cyclic(1)), ValidationError);
}

TEST_CASE("wnu pair search works on type structures") {
    TypeStructure t = equality_types();
    PolymorphismSearch got = has_polymorphism(t, IdentitySpec::wnu_pair34());
    REQUIRE(got.status == PolymorphismSearch::Status::Found);
    REQUIRE(got.tables.size() == 2);
    CHECK(got.tables[0].arity == 4);
    CHECK(got.tables[1].arity == 3);
    CHECK(check_identity(got.tables, IdentitySpec::wnu_pair34(), 5));
    CHECK(preserves_type_structure(got.tables[0], t));
    CHECK(preserves_type_structure(got.tables[1], t));
}

TEST_CASE("the equality-language type structure has a Siggers polymorphism") {
    TypeStructure t = equality_types();
    PolymorphismSearch got = has_polymorphism(t, IdentitySpec::siggers());
    REQUIRE(got.status == PolymorphismSearch::Status::Found);
    CHECK(got.tables[0].arity == 6);
    CHECK(got.tables[0].domain_size == 5);
    CHECK(check_identity(got.tables, IdentitySpec::siggers(), 5));
    CHECK(preserves_type_structure(got.tables[0], t));
}

TEST_CASE("type-structure preservation audit accepts the meet and rejects a projection") {
    TypeStructure t = equality_types();
    // pointwise refinement of equality patterns is a symmetric polymorphism;
    // build it directly as a binary table
    auto types = t.domain();
    OperationTable meet{5, 2, std::vector<int>(25)};
    for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q) {
            // classes of the meet: positions equal iff equal in both
            std::vector<int> cls(3), blocks(3, 0);
            int next = 0;
            for (int i = 0; i < 3; ++i) {
                int found = -1;
                for (int j = 0; j < i; ++j)
                    if (types[p].class_of(j + 1) == types[p].class_of(i + 1) &&
                        types[q].class_of(j + 1) == types[q].class_of(i + 1)) {
                        found = cls[j];
                        break;
                    }
                cls[i] = found >= 0 ? found : next++;
            }
            MType result = MType::from_pattern(cls, blocks);
            meet.values[meet.index_of(std::vector<int>{p, q})] = t.type_index(result);
        }
    CHECK(preserves_type_structure(meet, t));

    // the first projection preserves everything trivially
    CHECK(preserves_type_structure(OperationTable::projection(5, 2, 1), t));

    // a constant map to the all-distinct type breaks <Eq,(1,2)>
    OperationTable bad{5, 1, std::vector<int>(5, 4)};
    CHECK_FALSE(preserves_type_structure(bad, t));
}

TEST_CASE("restriction compatibility equals preservation of materialized comps") {
    // materialize every unary relation and every Comp_{i,j} of the 5-type
    // structure as plain tuple sets, then compare the two preservation routes
    // on random binary tables
    TypeStructure t = equality_types();
    int d = (int)t.domain().size();
    FiniteStructure mat;
    mat.d = d;
    int uid = 0;
    for (const auto& u : t.unary_relations()) {
        FiniteStructure::Relation rel;
        rel.name = "U" + std::to_string(uid++);
        rel.arity = 1;
        for (int p = u.members.first(); p >= 0; p = u.members.next(p)) rel.tuples.push_back({p});
        mat.relations.push_back(std::move(rel));
    }
    int cid = 0;
    for (int r = 1; r <= t.m(); ++r)
        for (const auto& i : all_index_maps(r, t.m()))
            for (const auto& j : all_index_maps(r, t.m())) {
                auto iid = t.restriction_ids(i);
                auto jid = t.restriction_ids(j);
                FiniteStructure::Relation rel;
                rel.name = "C" + std::to_string(cid++);
                rel.arity = 2;
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        if (iid[p] == jid[q]) rel.tuples.push_back({p, q});
                mat.relations.push_back(std::move(rel));
            }
    REQUIRE(mat.relations.size() == 18 + 9 + 81 + 729);

    testgen::Rng rng(606);
    int agree_true = 0, agree_false = 0;
    for (int trial = 0; trial < 60; ++trial) {
        OperationTable f{d, 2, std::vector<int>(25)};
        if (trial % 3 == 0) {
            // bias towards genuine polymorphisms: compose the meet pattern
            // with occasional corruption
            f = OperationTable::projection(d, 2, 1 + trial % 2);
            if (testgen::pick(rng, 0, 1))
                f.values[testgen::pick(rng, 0, 24)] = testgen::pick(rng, 0, d - 1);
        } else {
            for (auto& v : f.values) v = testgen::pick(rng, 0, d - 1);
        }
        bool direct = preserves(f, mat);
        bool structural = preserves_type_structure(f, t);
        CHECK(direct == structural);
        (direct ? agree_true : agree_false) += 1;
    }
    CHECK(agree_true > 0);
    CHECK(agree_false > 0);

    // the decomposed search and the generic search agree on the materialized
    // structure for a short identity
    PolymorphismSearch via_types = has_polymorphism(t, IdentitySpec::cyclic(2));
    PolymorphismSearch via_matrices = has_polymorphism(mat, IdentitySpec::cyclic(2));
    CHECK((via_types.status == PolymorphismSearch::Status::Found) ==
          (via_matrices.status == PolymorphismSearch::Status::Found));
    if (via_types.status == PolymorphismSearch::Status::Found) {
        CHECK(preserves(via_types.tables[0], mat));
        CHECK(preserves_type_structure(via_matrices.tables[0], t));
    }
}

TEST_CASE("classification of the equality language") {
    PartitionSpec spec{{{"N", std::nullopt}}};
    ReductSpec reduct{{{"Eq", 2, parse_formula("z1 = z2")},
                       {"Neq", 2, parse_formula("!(z1 = z2)")}}};

    ClassifyOptions opts;
    opts.assume_core_and_tame = true;
    ClassifyReport report = classify_reduct(spec, reduct, opts);
    CHECK(report.verdict == ClassifyReport::Verdict::Tractable);
    CHECK_FALSE(report.expanded);
    CHECK(report.m == 3);
    CHECK(report.type_domain_size == 5);
    REQUIRE(report.witness.has_value());
    TypeStructure t = equality_types();
    CHECK(preserves_type_structure(*report.witness, t));
}

TEST_CASE("verdict mapping honors the asserted hypotheses") {
    using S = PolymorphismSearch::Status;
    using V = ClassifyReport::Verdict;
    CHECK(classification_verdict(S::Found, false) == V::Tractable);
    CHECK(classification_verdict(S::Found, true) == V::Tractable);
    CHECK(classification_verdict(S::None, true) == V::HardCandidate);
    CHECK(classification_verdict(S::None, false) == V::NotApplicable);
    CHECK(classification_verdict(S::NodeLimit, true) == V::ResourceLimit);
    CHECK(classification_verdict(S::TimeLimit, false) == V::ResourceLimit);
}

TEST_CASE("classification of a relation-free reduct is tractable") {
    PartitionSpec spec{{{"N", std::nullopt}}};
    ReductSpec empty;
    ClassifyReport report = classify_reduct(spec, empty, {});
    CHECK(report.verdict == ClassifyReport::Verdict::Tractable);
}

TEST_CASE("classification without asserted hypotheses never claims hardness") {
    // a reduct whose type structure at the expanded partition is too large is
    // reported as a resource limit, not as a verdict
    PartitionSpec spec{{{"N", std::nullopt}}};
    ReductSpec reduct{{{"Eq", 2, parse_formula("z1 = z2")},
                       {"Neq", 2, parse_formula("!(z1 = z2)")}}};
    ClassifyOptions opts; // no assertions: expansion applies
    ClassifyReport report = classify_reduct(spec, reduct, opts);
    CHECK(report.expanded);
    CHECK(report.verdict == ClassifyReport::Verdict::ResourceLimit);

    // forcing the unexpanded search through the option works
    opts.expansion = ExpansionMode::Never;
    ClassifyReport direct = classify_reduct(spec, reduct, opts);
    CHECK(direct.verdict == ClassifyReport::Verdict::Tractable);
}
