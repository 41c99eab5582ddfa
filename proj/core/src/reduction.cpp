#include "typecsp/reduction.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace typecsp {

int CspInstance::index_of(const std::string& var) const {
    for (int i = 0; i < (int)vars.size(); ++i)
        if (vars[i] == var) return i;
    return -1;
}

void CspInstance::validate(const ReductSpec& reduct) const {
    if (vars.empty()) throw ValidationError("instance needs at least one variable");
    std::set<std::string> seen;
    for (const auto& v : vars) {
        if (v.empty()) throw ValidationError("variable names must be nonempty");
        if (!seen.insert(v).second)
            throw ValidationError("duplicate variable '" + v + "'");
    }
    for (const auto& c : conjuncts) {
        int rel = reduct.index_of(c.rel);
        if (rel < 0) throw ValidationError("conjunct references unknown relation '" + c.rel + "'");
        if ((int)c.args.size() != reduct.relations[rel].arity)
            throw ValidationError("conjunct on '" + c.rel + "' has " +
                                  std::to_string(c.args.size()) + " arguments, arity is " +
                                  std::to_string(reduct.relations[rel].arity));
        for (const auto& a : c.args)
            if (!seen.count(a))
                throw ValidationError("conjunct references unknown variable '" + a + "'");
    }
}

int FiniteCspInstance::var_index(std::span<const int> subset) const {
    std::vector<int> key(subset.begin(), subset.end());
    auto it = std::lower_bound(vars.begin(), vars.end(), key);
    if (it == vars.end() || *it != key) return -1;
    return (int)(it - vars.begin());
}

namespace {

std::vector<std::vector<int>> combinations(int n, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(m);
    for (int i = 0; i < m; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = m - 1;
        while (i >= 0 && cur[i] == n - m + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < m; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

} // namespace

FiniteCspInstance reduce(const CspInstance& psi, const TypeStructure& t, AttachPolicy policy) {
    psi.validate(t.reduct());
    const int m = t.m();
    // the quotient construction behind witness lifting needs every variable
    // triple inside one map image
    if (m < 3)
        throw ValidationError("the reduction needs a type structure with m >= 3");

    FiniteCspInstance phi;
    phi.m = m;
    phi.domain_size = (int)t.domain().size();
    phi.var_names = psi.vars;
    phi.original_var_count = (int)psi.vars.size();
    // The reduction assumes n >= m; shorter instances get fresh unconstrained
    // padding variables, stripped again when witnesses are read.
    std::set<std::string> taken(psi.vars.begin(), psi.vars.end());
    int pad = 1;
    while ((int)phi.var_names.size() < m) {
        std::string name = "~pad" + std::to_string(pad++);
        while (taken.count(name)) name += "_";
        taken.insert(name);
        phi.var_names.push_back(name);
    }
    const int n = (int)phi.var_names.size();
    phi.vars = combinations(n, m);

    std::set<std::tuple<int, int, IndexMap>> unary_seen; // (var, relation, map)
    auto attach = [&](int var, int relation, IndexMap map) {
        if (unary_seen.insert({var, relation, map}).second)
            phi.unary.push_back({var, relation, std::move(map)});
    };

    for (const auto& c : psi.conjuncts) {
        int rel = t.reduct().index_of(c.rel);
        std::vector<int> args;
        for (const auto& a : c.args) args.push_back(psi.index_of(a));
        std::vector<int> image(args);
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());

        auto map_into = [&](const std::vector<int>& subset) {
            IndexMap map;
            for (int a : args) {
                auto it = std::lower_bound(subset.begin(), subset.end(), a);
                map.push_back((int)(it - subset.begin()) + 1);
            }
            return map;
        };

        if (policy == AttachPolicy::AllCovering) {
            for (int v = 0; v < (int)phi.vars.size(); ++v) {
                const auto& subset = phi.vars[v];
                if (std::includes(subset.begin(), subset.end(), image.begin(), image.end()))
                    attach(v, rel, map_into(subset));
            }
        } else {
            // fill the image with the smallest variables not already in it
            std::vector<int> subset(image);
            for (int x = 0; (int)subset.size() < m; ++x)
                if (!std::binary_search(image.begin(), image.end(), x)) subset.push_back(x);
            std::sort(subset.begin(), subset.end());
            int v = phi.var_index(subset);
            attach(v, rel, map_into(subset));
        }
    }
    std::sort(phi.unary.begin(), phi.unary.end(), [](const auto& a, const auto& b) {
        return std::tie(a.var, a.relation, a.index_map) < std::tie(b.var, b.relation, b.index_map);
    });

    for (int u = 0; u < (int)phi.vars.size(); ++u) {
        for (int v = u + 1; v < (int)phi.vars.size(); ++v) {
            const auto& su = phi.vars[u];
            const auto& sv = phi.vars[v];
            std::vector<int> common;
            std::set_intersection(su.begin(), su.end(), sv.begin(), sv.end(),
                                  std::back_inserter(common));
            if (common.empty()) continue; // nothing to relate
            FiniteCspInstance::CompC c;
            c.u = u;
            c.v = v;
            for (int x : common) {
                c.iu.push_back((int)(std::lower_bound(su.begin(), su.end(), x) - su.begin()) + 1);
                c.iv.push_back((int)(std::lower_bound(sv.begin(), sv.end(), x) - sv.begin()) + 1);
            }
            phi.comp.push_back(std::move(c));
        }
    }
    return phi;
}

SolverInstance to_solver_instance(const FiniteCspInstance& phi, const TypeStructure& t) {
    SolverInstance inst;
    inst.domains.assign(phi.vars.size(), Bitset(phi.domain_size, true));
    for (const auto& c : phi.unary)
        inst.unary.push_back({c.var, t.unary(c.relation, c.index_map).members});

    // one shared predicate per distinct pair of restriction maps
    std::map<std::pair<IndexMap, IndexMap>, std::shared_ptr<const FnEqPredicate>> cache;
    std::map<IndexMap, std::vector<int>> ids;
    auto id_table = [&](const IndexMap& i) -> const std::vector<int>& {
        auto it = ids.find(i);
        if (it == ids.end()) it = ids.emplace(i, t.restriction_ids(i)).first;
        return it->second;
    };
    for (const auto& c : phi.comp) {
        auto key = std::make_pair(c.iu, c.iv);
        auto it = cache.find(key);
        if (it == cache.end()) {
            auto pred = std::make_shared<FnEqPredicate>(id_table(c.iu), id_table(c.iv));
            it = cache.emplace(std::move(key), std::move(pred)).first;
        }
        inst.binary.push_back({c.u, c.v, nullptr, it->second, "comp"});
    }
    return inst;
}

ReductionMetrics metrics(const FiniteCspInstance& phi) {
    return {phi.vars.size(), phi.unary.size(), phi.comp.size()};
}

Witness lift_solution(const CspInstance&, const FiniteCspInstance& phi,
                      const TypeStructure& t, std::span<const int> assignment) {
    if (assignment.size() != phi.vars.size())
        throw ValidationError("assignment length does not match the reduced instance");
    const int n = (int)phi.var_names.size();

    // -1 unknown, otherwise the agreed verdict / block
    std::vector<std::vector<int>> equal(n, std::vector<int>(n, -1));
    std::vector<int> block(n, -1);

    for (std::size_t vi = 0; vi < phi.vars.size(); ++vi) {
        int h = assignment[vi];
        if (h < 0 || h >= (int)t.domain().size())
            throw ValidationError("assignment value outside the type domain");
        const MType& type = t.domain()[h];
        const auto& subset = phi.vars[vi];
        for (int a = 0; a < (int)subset.size(); ++a) {
            int x = subset[a];
            int b = type.block_of(a + 1);
            if (block[x] < 0)
                block[x] = b;
            else if (block[x] != b)
                throw Error("internal: covering variables disagree on the block of '" +
                            phi.var_names[x] + "'");
            for (int c = a + 1; c < (int)subset.size(); ++c) {
                int y = subset[c];
                int verdict = type.class_of(a + 1) == type.class_of(c + 1) ? 1 : 0;
                if (equal[x][y] < 0)
                    equal[x][y] = equal[y][x] = verdict;
                else if (equal[x][y] != verdict)
                    throw Error("internal: covering variables disagree on '" +
                                phi.var_names[x] + "' = '" + phi.var_names[y] + "'");
            }
        }
    }

    // union-find over the equality verdicts
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            if (equal[x][y] < 0) throw Error("internal: uncovered variable pair");
            if (equal[x][y] == 1) parent[find(x)] = find(y);
        }

    Witness w;
    std::map<int, int> class_of_root; // root -> index into w.classes
    for (int x = 0; x < phi.original_var_count; ++x) {
        int root = find(x);
        auto it = class_of_root.find(root);
        if (it == class_of_root.end()) {
            it = class_of_root.emplace(root, (int)w.classes.size()).first;
            w.classes.push_back({{}, t.partition().block_name(block[x])});
        }
        w.classes[it->second].vars.push_back(phi.var_names[x]);
    }
    return w;
}

bool verify_witness(const CspInstance& psi, const Witness& w, const PartitionSpec& spec,
                    const ReductSpec& reduct) {
    std::map<std::string, int> cls;
    for (int c = 0; c < (int)w.classes.size(); ++c)
        for (const auto& v : w.classes[c].vars) cls[v] = c;
    for (const auto& v : psi.vars)
        if (!cls.count(v))
            throw ValidationError("witness does not cover variable '" + v + "'");

    // at most one class per singleton block
    std::map<std::string, int> singleton_uses;
    for (const auto& c : w.classes) {
        int b = spec.index_of(c.block);
        if (b < 0) return false;
        if (spec.blocks[b].singleton() && ++singleton_uses[c.block] > 1) return false;
    }

    for (const auto& conjunct : psi.conjuncts) {
        int rel = reduct.index_of(conjunct.rel);
        if (rel < 0) return false;
        std::vector<Label> labels;
        for (const auto& a : conjunct.args) {
            int c = cls.at(a);
            labels.push_back({w.classes[c].block, c});
        }
        if (!evaluate(reduct.relations[rel].def, labels)) return false;
    }
    return true;
}

} // namespace typecsp
