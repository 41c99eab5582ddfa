#include "typecsp/serialize.hpp"

#include "typecsp/errors.hpp"

#include <set>

namespace typecsp {

namespace {

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw ValidationError(what, path);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail("expected an object", path);
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'", path);
    return *it;
}

int int_field(const Json& j, const char* key, const std::string& path) {
    const Json& v = field(j, key, path);
    if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer", path);
    return v.get<int>();
}

std::string string_field(const Json& j, const char* key, const std::string& path) {
    const Json& v = field(j, key, path);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string", path);
    return v.get<std::string>();
}

std::vector<int> int_array(const Json& j, const std::string& path) {
    if (!j.is_array()) fail("expected an array of integers", path);
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) fail("expected an array of integers", path);
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// formulas

Json formula_to_json(const Formula& f) {
    switch (f.kind()) {
    case Formula::Kind::True: return {{"type", "true"}};
    case Formula::Kind::False: return {{"type", "false"}};
    case Formula::Kind::Eq: return {{"type", "eq"}, {"lhs", f.lhs()}, {"rhs", f.rhs()}};
    case Formula::Kind::InBlock:
        return {{"type", "block"}, {"name", f.block()}, {"pos", f.pos()}};
    case Formula::Kind::Not: return {{"type", "not"}, {"arg", formula_to_json(f.args()[0])}};
    case Formula::Kind::And:
    case Formula::Kind::Or: {
        Json args = Json::array();
        for (const auto& a : f.args()) args.push_back(formula_to_json(a));
        return {{"type", f.kind() == Formula::Kind::And ? "and" : "or"}, {"args", args}};
    }
    }
    fail("unreachable formula kind", "/");
}

Formula formula_from_json(const Json& j, const std::string& path) {
    std::string type = string_field(j, "type", path);
    if (type == "true") return Formula::truth();
    if (type == "false") return Formula::falsity();
    if (type == "eq") return Formula::eq(int_field(j, "lhs", path), int_field(j, "rhs", path));
    if (type == "block")
        return Formula::in_block(string_field(j, "name", path), int_field(j, "pos", path));
    if (type == "not") return Formula::negation(formula_from_json(field(j, "arg", path), path + "arg/"));
    if (type == "and" || type == "or") {
        const Json& args = field(j, "args", path);
        if (!args.is_array() || args.size() < 2)
            fail("'args' must be an array of at least two formulas", path);
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < args.size(); ++i)
            parts.push_back(formula_from_json(args[i], path + "args/" + std::to_string(i) + "/"));
        return type == "and" ? Formula::conjunction(std::move(parts))
                             : Formula::disjunction(std::move(parts));
    }
    fail("unknown formula node type '" + type + "'", path);
}

// ---------------------------------------------------------------------------
// partitions and types

Json partition_to_json(const PartitionSpec& spec) {
    Json blocks = Json::array();
    for (const auto& b : spec.blocks) {
        Json jb{{"name", b.name}};
        if (b.infinite())
            jb["size"] = "inf";
        else
            jb["size"] = *b.size;
        blocks.push_back(std::move(jb));
    }
    return {{"blocks", blocks}};
}

PartitionSpec partition_from_json(const Json& j, const std::string& path) {
    PartitionSpec spec;
    const Json& blocks = field(j, "blocks", path);
    if (!blocks.is_array()) fail("'blocks' must be an array", path);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::string bpath = path + "blocks/" + std::to_string(i) + "/";
        Block b;
        b.name = string_field(blocks[i], "name", bpath);
        const Json& size = field(blocks[i], "size", bpath);
        if (size.is_string() && size.get<std::string>() == "inf")
            b.size = std::nullopt;
        else if (size.is_number_integer())
            b.size = size.get<int>();
        else
            fail("'size' must be \"inf\" or a positive integer", bpath);
        spec.blocks.push_back(std::move(b));
    }
    spec.validate();
    return spec;
}

Json mtype_to_json(const PartitionSpec& spec, const MType& t) {
    Json classes = Json::array();
    for (int k = 1; k <= t.width(); ++k) classes.push_back(t.class_of(k));
    Json blocks = Json::array();
    for (int c = 0; c < t.class_count(); ++c)
        blocks.push_back(spec.block_name(t.block_of_class(c)));
    return {{"classes", classes}, {"blocks", blocks}};
}

MType mtype_from_json(const PartitionSpec& spec, const Json& j, const std::string& path) {
    std::vector<int> classes = int_array(field(j, "classes", path), path + "classes/");
    const Json& blocks = field(j, "blocks", path);
    if (!blocks.is_array()) fail("'blocks' must be an array", path);
    std::vector<int> block_of_class;
    for (const auto& b : blocks) {
        if (!b.is_string()) fail("'blocks' entries must be block names", path);
        int idx = spec.index_of(b.get<std::string>());
        if (idx < 0) fail("unknown block '" + b.get<std::string>() + "'", path);
        block_of_class.push_back(idx);
    }
    int class_count = 0;
    std::vector<int> block_of_pos;
    for (int c : classes) {
        if (c < 0 || c >= (int)block_of_class.size())
            fail("class id outside the blocks array", path);
        class_count = std::max(class_count, c + 1);
        block_of_pos.push_back(block_of_class[c]);
    }
    if ((int)block_of_class.size() != class_count)
        fail("'blocks' must list exactly one block per class", path);
    return MType::from_pattern(classes, block_of_pos);
}

// ---------------------------------------------------------------------------
// reducts

Json reduct_to_json(const ReductSpec& reduct) {
    Json rels = Json::array();
    for (const auto& r : reduct.relations)
        rels.push_back({{"name", r.name}, {"arity", r.arity}, {"def", r.def.to_string()}});
    return {{"relations", rels}};
}

ReductSpec reduct_from_json(const PartitionSpec& spec, const Json& j, const std::string& path) {
    ReductSpec reduct;
    const Json& rels = field(j, "relations", path);
    if (!rels.is_array()) fail("'relations' must be an array", path);
    std::set<std::string> blocks;
    for (const auto& b : spec.blocks) blocks.insert(b.name);
    for (std::size_t i = 0; i < rels.size(); ++i) {
        std::string rpath = path + "relations/" + std::to_string(i) + "/";
        ReductRelation r;
        r.name = string_field(rels[i], "name", rpath);
        r.arity = int_field(rels[i], "arity", rpath);
        const Json& def = field(rels[i], "def", rpath);
        if (def.is_string()) {
            try {
                r.def = parse_formula(def.get<std::string>(), blocks);
            } catch (const ParseError& e) {
                fail("definition of '" + r.name + "': " + e.what(), rpath + "def");
            }
        } else {
            r.def = formula_from_json(def, rpath + "def/");
        }
        reduct.relations.push_back(std::move(r));
    }
    reduct.validate(spec);
    return reduct;
}

// ---------------------------------------------------------------------------
// type structures

Json type_structure_to_json(const TypeStructure& t, bool materialize_comp) {
    Json out;
    out["m"] = t.m();
    out["partition"] = partition_to_json(t.partition());
    out["reduct"] = reduct_to_json(t.reduct());
    Json domain = Json::array();
    for (const auto& p : t.domain()) domain.push_back(mtype_to_json(t.partition(), p));
    out["domain"] = std::move(domain);
    Json unary = Json::array();
    for (const auto& u : t.unary_relations()) {
        Json members = Json::array();
        for (int p = u.members.first(); p >= 0; p = u.members.next(p)) members.push_back(p);
        unary.push_back({{"rel", t.reduct().relations[u.relation].name},
                         {"map", u.index_map},
                         {"members", members}});
    }
    out["unary"] = std::move(unary);
    if (!materialize_comp) {
        out["comp"] = "lazy";
        return out;
    }
    Json comp = Json::array();
    int d = (int)t.domain().size();
    for (int r = 1; r <= t.m(); ++r)
        for (const auto& i : all_index_maps(r, t.m()))
            for (const auto& j : all_index_maps(r, t.m())) {
                Json pairs = Json::array();
                auto iid = t.restriction_ids(i);
                auto jid = t.restriction_ids(j);
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q)
                        if (iid[p] == jid[q]) pairs.push_back({p, q});
                comp.push_back({{"i", i}, {"j", j}, {"pairs", pairs}});
            }
    out["comp"] = std::move(comp);
    return out;
}

TypeStructure type_structure_from_json(const Json& j, const std::string& path) {
    PartitionSpec spec = partition_from_json(field(j, "partition", path), path + "partition/");
    ReductSpec reduct = reduct_from_json(spec, field(j, "reduct", path), path + "reduct/");
    int m = int_field(j, "m", path);
    const Json& domain = field(j, "domain", path);
    if (!domain.is_array()) fail("'domain' must be an array", path);
    std::vector<MType> types;
    for (std::size_t i = 0; i < domain.size(); ++i)
        types.push_back(mtype_from_json(spec, domain[i], path + "domain/" + std::to_string(i) + "/"));
    const Json& unary = field(j, "unary", path);
    if (!unary.is_array()) fail("'unary' must be an array", path);
    std::vector<TypeStructure::UnaryRelation> rels;
    for (std::size_t i = 0; i < unary.size(); ++i) {
        std::string upath = path + "unary/" + std::to_string(i) + "/";
        TypeStructure::UnaryRelation u;
        std::string name = string_field(unary[i], "rel", upath);
        u.relation = reduct.index_of(name);
        if (u.relation < 0) fail("unknown relation '" + name + "'", upath);
        u.index_map = int_array(field(unary[i], "map", upath), upath + "map/");
        u.members = Bitset((int)types.size());
        for (int p : int_array(field(unary[i], "members", upath), upath + "members/")) {
            if (p < 0 || p >= (int)types.size()) fail("member index outside the domain", upath);
            u.members.set(p);
        }
        rels.push_back(std::move(u));
    }
    return TypeStructure::assemble(std::move(spec), std::move(reduct), m, std::move(types),
                                   std::move(rels));
}

// ---------------------------------------------------------------------------
// instances

Json instance_to_json(const CspInstance& psi) {
    Json conjuncts = Json::array();
    for (const auto& c : psi.conjuncts) conjuncts.push_back({{"rel", c.rel}, {"args", c.args}});
    return {{"vars", psi.vars}, {"conjuncts", conjuncts}};
}

CspInstance instance_from_json(const Json& j, const std::string& path) {
    CspInstance psi;
    const Json& vars = field(j, "vars", path);
    if (!vars.is_array()) fail("'vars' must be an array", path);
    for (const auto& v : vars) {
        if (!v.is_string()) fail("'vars' entries must be strings", path);
        psi.vars.push_back(v.get<std::string>());
    }
    const Json& conjuncts = field(j, "conjuncts", path);
    if (!conjuncts.is_array()) fail("'conjuncts' must be an array", path);
    for (std::size_t i = 0; i < conjuncts.size(); ++i) {
        std::string cpath = path + "conjuncts/" + std::to_string(i) + "/";
        CspInstance::Conjunct c;
        c.rel = string_field(conjuncts[i], "rel", cpath);
        const Json& args = field(conjuncts[i], "args", cpath);
        if (!args.is_array()) fail("'args' must be an array", cpath);
        for (const auto& a : args) {
            if (!a.is_string()) fail("'args' entries must be strings", cpath);
            c.args.push_back(a.get<std::string>());
        }
        psi.conjuncts.push_back(std::move(c));
    }
    return psi;
}

Json reduced_to_json(const FiniteCspInstance& phi, const TypeStructure& t) {
    Json out;
    out["m"] = phi.m;
    out["domain_size"] = phi.domain_size;
    Json vars = Json::array();
    for (const auto& subset : phi.vars) {
        Json names = Json::array();
        for (int x : subset) names.push_back(phi.var_names[x]);
        vars.push_back(std::move(names));
    }
    out["vars"] = std::move(vars);
    Json unary = Json::array();
    for (const auto& c : phi.unary)
        unary.push_back({{"var", c.var},
                         {"rel", t.reduct().relations[c.relation].name},
                         {"map", c.index_map}});
    out["unary"] = std::move(unary);
    Json comp = Json::array();
    for (const auto& c : phi.comp)
        comp.push_back({{"kind", "comp"}, {"u", c.u}, {"v", c.v}, {"iu", c.iu}, {"iv", c.iv}});
    out["comp"] = std::move(comp);
    return out;
}

Json witness_to_json(const Witness& w) {
    Json classes = Json::array();
    for (const auto& c : w.classes) classes.push_back({{"vars", c.vars}, {"block", c.block}});
    return {{"classes", classes}};
}

Witness witness_from_json(const Json& j, const std::string& path) {
    Witness w;
    const Json& classes = field(j, "classes", path);
    if (!classes.is_array()) fail("'classes' must be an array", path);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        std::string cpath = path + "classes/" + std::to_string(i) + "/";
        Witness::Class c;
        c.block = string_field(classes[i], "block", cpath);
        const Json& vars = field(classes[i], "vars", cpath);
        if (!vars.is_array()) fail("'vars' must be an array", cpath);
        for (const auto& v : vars) {
            if (!v.is_string()) fail("'vars' entries must be strings", cpath);
            c.vars.push_back(v.get<std::string>());
        }
        w.classes.push_back(std::move(c));
    }
    return w;
}

// ---------------------------------------------------------------------------
// structures, algebras, operations

Json finite_structure_to_json(const FiniteStructure& s) {
    Json rels = Json::object();
    for (const auto& r : s.relations) rels[r.name] = {{"arity", r.arity}, {"tuples", r.tuples}};
    return {{"d", s.d}, {"relations", rels}};
}

FiniteStructure finite_structure_from_json(const Json& j, const std::string& path) {
    FiniteStructure s;
    s.d = int_field(j, "d", path);
    const Json& rels = field(j, "relations", path);
    if (!rels.is_object()) fail("'relations' must be an object keyed by name", path);
    for (auto it = rels.begin(); it != rels.end(); ++it) {
        std::string rpath = path + "relations/" + it.key() + "/";
        FiniteStructure::Relation r;
        r.name = it.key();
        r.arity = int_field(*it, "arity", rpath);
        const Json& tuples = field(*it, "tuples", rpath);
        if (!tuples.is_array()) fail("'tuples' must be an array", rpath);
        for (const auto& t : tuples) r.tuples.push_back(int_array(t, rpath + "tuples/"));
        s.relations.push_back(std::move(r));
    }
    s.validate();
    return s;
}

Json operation_to_json(const OperationTable& t) {
    return {{"d", t.domain_size}, {"arity", t.arity}, {"table", t.values}};
}

OperationTable operation_from_json(const Json& j, const std::string& path) {
    OperationTable t;
    t.domain_size = int_field(j, "d", path);
    t.arity = int_field(j, "arity", path);
    t.values = int_array(field(j, "table", path), path + "table/");
    t.validate();
    return t;
}

Json algebra_to_json(const FiniteAlgebra& a) {
    Json ops = Json::object();
    for (const auto& op : a.ops)
        ops[op.name] = {{"arity", op.table.arity}, {"table", op.table.values}};
    return {{"d", a.d}, {"ops", ops}};
}

namespace {

Json bitset_to_json(const Bitset& b) {
    Json out = Json::array();
    for (int i = b.first(); i >= 0; i = b.next(i)) out.push_back(i);
    return out;
}

Bitset bitset_from_json(const Json& j, int size, const std::string& path) {
    Bitset b(size);
    for (int v : int_array(j, path)) {
        if (v < 0 || v >= size) fail("value outside the domain", path);
        b.set(v);
    }
    return b;
}

} // namespace

Json solver_instance_to_json(const SolverInstance& inst) {
    Json out;
    Json domains = Json::array();
    for (const auto& d : inst.domains) {
        Json dom = bitset_to_json(d);
        domains.push_back({{"size", d.size()}, {"values", dom}});
    }
    out["domains"] = std::move(domains);
    Json unary = Json::array();
    for (const auto& c : inst.unary)
        unary.push_back({{"var", c.var}, {"allowed", bitset_to_json(c.allowed)}});
    out["unary"] = std::move(unary);
    Json binary = Json::array();
    for (const auto& c : inst.binary) {
        Json jc{{"u", c.u}, {"v", c.v}};
        if (c.table) {
            Json pairs = Json::array();
            for (int a = 0; a < c.table->rows(); ++a)
                for (int b = c.table->row(a).first(); b >= 0; b = c.table->row(a).next(b))
                    pairs.push_back({a, b});
            jc["pairs"] = std::move(pairs);
        } else if (auto* fneq = dynamic_cast<const FnEqPredicate*>(c.pred.get())) {
            jc["kind"] = "fneq";
            jc["left"] = fneq->left_id();
            jc["right"] = fneq->right_id();
        } else {
            throw ValidationError("opaque intensional constraints cannot be serialized");
        }
        binary.push_back(std::move(jc));
    }
    out["binary"] = std::move(binary);
    Json nary = Json::array();
    for (const auto& c : inst.nary) nary.push_back({{"scope", c.scope}, {"tuples", c.tuples}});
    out["nary"] = std::move(nary);
    return out;
}

SolverInstance solver_instance_from_json(const Json& j, const std::string& path) {
    SolverInstance inst;
    const Json& domains = field(j, "domains", path);
    if (!domains.is_array()) fail("'domains' must be an array", path);
    for (std::size_t i = 0; i < domains.size(); ++i) {
        std::string dpath = path + "domains/" + std::to_string(i) + "/";
        int size = int_field(domains[i], "size", dpath);
        inst.domains.push_back(
            bitset_from_json(field(domains[i], "values", dpath), size, dpath));
    }
    if (auto it = j.find("unary"); it != j.end())
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string upath = path + "unary/" + std::to_string(i) + "/";
            int var = int_field((*it)[i], "var", upath);
            if (var < 0 || var >= inst.var_count()) fail("variable out of range", upath);
            inst.unary.push_back({var, bitset_from_json(field((*it)[i], "allowed", upath),
                                                        inst.domains[var].size(), upath)});
        }
    if (auto it = j.find("binary"); it != j.end())
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string bpath = path + "binary/" + std::to_string(i) + "/";
            SolverInstance::Binary c;
            c.u = int_field((*it)[i], "u", bpath);
            c.v = int_field((*it)[i], "v", bpath);
            if (c.u < 0 || c.u >= inst.var_count() || c.v < 0 || c.v >= inst.var_count())
                fail("variable out of range", bpath);
            if ((*it)[i].contains("pairs")) {
                auto m = std::make_shared<BitMatrix>(inst.domains[c.u].size(),
                                                     inst.domains[c.v].size());
                for (const auto& pq : (*it)[i]["pairs"]) {
                    auto pair = int_array(pq, bpath + "pairs/");
                    if (pair.size() != 2 || pair[0] < 0 || pair[0] >= m->rows() || pair[1] < 0 ||
                        pair[1] >= m->cols())
                        fail("bad pair", bpath);
                    m->set(pair[0], pair[1]);
                }
                c.table = std::move(m);
            } else if ((*it)[i].contains("kind") && (*it)[i]["kind"] == "fneq") {
                c.pred = std::make_shared<FnEqPredicate>(
                    int_array(field((*it)[i], "left", bpath), bpath + "left/"),
                    int_array(field((*it)[i], "right", bpath), bpath + "right/"));
            } else {
                fail("binary constraint needs 'pairs' or kind 'fneq'", bpath);
            }
            inst.binary.push_back(std::move(c));
        }
    if (auto it = j.find("nary"); it != j.end())
        for (std::size_t i = 0; i < it->size(); ++i) {
            std::string npath = path + "nary/" + std::to_string(i) + "/";
            SolverInstance::Nary c;
            c.scope = int_array(field((*it)[i], "scope", npath), npath + "scope/");
            for (const auto& t : field((*it)[i], "tuples", npath))
                c.tuples.push_back(int_array(t, npath + "tuples/"));
            inst.nary.push_back(std::move(c));
        }
    inst.validate();
    return inst;
}

FiniteAlgebra algebra_from_json(const Json& j, const std::string& path) {
    FiniteAlgebra a;
    a.d = int_field(j, "d", path);
    const Json& ops = field(j, "ops", path);
    if (!ops.is_object()) fail("'ops' must be an object keyed by name", path);
    for (auto it = ops.begin(); it != ops.end(); ++it) {
        std::string opath = path + "ops/" + it.key() + "/";
        FiniteAlgebra::Op op;
        op.name = it.key();
        op.table.domain_size = a.d;
        op.table.arity = int_field(*it, "arity", opath);
        op.table.values = int_array(field(*it, "table", opath), opath + "table/");
        try {
            op.table.validate();
        } catch (const ValidationError& e) {
            fail(e.what(), opath);
        }
        a.ops.push_back(std::move(op));
    }
    a.validate();
    return a;
}

} // namespace typecsp
