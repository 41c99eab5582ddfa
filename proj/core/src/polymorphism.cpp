#include "typecsp/polymorphism.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

namespace typecsp {

void FiniteStructure::validate() const {
    if (d < 1) throw ValidationError("structure needs a nonempty domain");
    std::set<std::string> seen;
    for (const auto& r : relations) {
        if (r.name.empty()) throw ValidationError("relation names must be nonempty");
        if (!seen.insert(r.name).second)
            throw ValidationError("duplicate relation name '" + r.name + "'");
        if (r.arity < 1) throw ValidationError("relation '" + r.name + "' needs arity >= 1");
        for (const auto& t : r.tuples) {
            if ((int)t.size() != r.arity)
                throw ValidationError("tuple length does not match arity of '" + r.name + "'");
            for (int v : t)
                if (v < 0 || v >= d)
                    throw ValidationError("tuple value outside the domain in '" + r.name + "'");
        }
    }
}

IdentitySpec IdentitySpec::siggers(bool idem) { return {Kind::Siggers6, 0, idem}; }
IdentitySpec IdentitySpec::cyclic(int k, bool idem) { return {Kind::Cyclic, k, idem}; }
IdentitySpec IdentitySpec::wnu(int k, bool idem) { return {Kind::Wnu, k, idem}; }
IdentitySpec IdentitySpec::wnu_pair34(bool idem) { return {Kind::WnuPair34, 0, idem}; }

std::vector<int> IdentitySpec::arities() const {
    switch (kind) {
    case Kind::Siggers6: return {6};
    case Kind::Cyclic:
    case Kind::Wnu: return {k};
    case Kind::WnuPair34: return {4, 3};
    }
    return {};
}

void IdentitySpec::validate() const {
    if ((kind == Kind::Cyclic || kind == Kind::Wnu) && (k < 2 || k > 6))
        throw ValidationError("cyclic/wnu arity parameter must be in [2,6]");
}

std::string IdentitySpec::describe() const {
    std::string base;
    switch (kind) {
    case Kind::Siggers6: base = "siggers"; break;
    case Kind::Cyclic: base = "cyclic:" + std::to_string(k); break;
    case Kind::Wnu: base = "wnu:" + std::to_string(k); break;
    case Kind::WnuPair34: base = "wnupair"; break;
    }
    if (idempotent) base += " (idempotent)";
    return base;
}

// ---------------------------------------------------------------------------
// identity checking

namespace {

std::size_t pow_size(int base, int exp) {
    std::size_t s = 1;
    for (int i = 0; i < exp; ++i) s *= (std::size_t)base;
    return s;
}

bool check_wnu_table(const OperationTable& f, int d) {
    int k = f.arity;
    std::vector<int> pattern(k);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
            std::fill(pattern.begin(), pattern.end(), x);
            pattern[0] = y;
            int first = f.values[f.index_of(pattern)];
            for (int i = 1; i < k; ++i) {
                std::fill(pattern.begin(), pattern.end(), x);
                pattern[i] = y;
                if (f.values[f.index_of(pattern)] != first) return false;
            }
        }
    return true;
}

} // namespace

bool check_identity(std::span<const OperationTable> tables, const IdentitySpec& id, int d) {
    id.validate();
    auto arities = id.arities();
    if (tables.size() != arities.size())
        throw ValidationError("identity expects " + std::to_string(arities.size()) + " table(s)");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (tables[i].arity != arities[i])
            throw ValidationError("table arity does not match the identity");
        if (tables[i].domain_size != d)
            throw ValidationError("table domain does not match");
    }
    if (id.idempotent)
        for (const auto& t : tables)
            if (!t.idempotent()) return false;

    switch (id.kind) {
    case IdentitySpec::Kind::Siggers6: {
        const auto& f = tables[0];
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                for (int z = 0; z < d; ++z) {
                    int a = f.values[f.index_of(std::vector<int>{x, y, x, z, y, z})];
                    int b = f.values[f.index_of(std::vector<int>{y, x, z, x, z, y})];
                    if (a != b) return false;
                }
        return true;
    }
    case IdentitySpec::Kind::Cyclic: {
        const auto& f = tables[0];
        int k = f.arity;
        std::vector<int> args(k), rot(k);
        std::size_t n = pow_size(d, k);
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::size_t rem = idx;
            for (int i = k - 1; i >= 0; --i) {
                args[i] = (int)(rem % d);
                rem /= d;
            }
            for (int i = 0; i < k; ++i) rot[i] = args[(i + 1) % k];
            if (f.values[idx] != f.values[f.index_of(rot)]) return false;
        }
        return true;
    }
    case IdentitySpec::Kind::Wnu: return check_wnu_table(tables[0], d);
    case IdentitySpec::Kind::WnuPair34: {
        if (!check_wnu_table(tables[0], d) || !check_wnu_table(tables[1], d)) return false;
        const auto& f = tables[0];
        const auto& g = tables[1];
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) {
                int a = f.values[f.index_of(std::vector<int>{y, x, x, x})];
                int b = g.values[g.index_of(std::vector<int>{y, x, x})];
                if (a != b) return false;
            }
        return true;
    }
    }
    return false;
}

// ---------------------------------------------------------------------------
// indicator construction

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Layout of the searched function tables over their entry spaces. For the
// type-structure search every table exists once per tuple length; the plain
// search has a single "level" whose value domain is the structure's domain.
struct TableSpace {
    int table = 0;  // which searched function
    int level = 0;  // 1-based tuple length; plain search uses level = 0
    int arity = 0;
    int value_domain = 0;
    std::size_t node_base = 0;
    std::size_t entries = 0;
};

std::size_t rank_tuple(std::span<const int> tuple, int base) {
    std::size_t r = 0;
    for (int v : tuple) r = r * (std::size_t)base + (std::size_t)v;
    return r;
}

void unrank_tuple(std::size_t rank, int base, std::span<int> out) {
    for (int i = (int)out.size() - 1; i >= 0; --i) {
        out[i] = (int)(rank % base);
        rank /= base;
    }
}

// identity-induced identifications within one table space
void identify(UnionFind& uf, const TableSpace& ts, IdentitySpec::Kind kind) {
    int d = ts.value_domain;
    auto base = ts.node_base;
    switch (kind) {
    case IdentitySpec::Kind::Siggers6:
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                for (int z = 0; z < d; ++z) {
                    std::size_t a = rank_tuple(std::vector<int>{x, y, x, z, y, z}, d);
                    std::size_t b = rank_tuple(std::vector<int>{y, x, z, x, z, y}, d);
                    uf.unite((int)(base + a), (int)(base + b));
                }
        break;
    case IdentitySpec::Kind::Cyclic: {
        int k = ts.arity;
        std::vector<int> args(k), rot(k);
        for (std::size_t e = 0; e < ts.entries; ++e) {
            unrank_tuple(e, d, args);
            for (int i = 0; i < k; ++i) rot[i] = args[(i + 1) % k];
            uf.unite((int)(base + e), (int)(base + rank_tuple(rot, d)));
        }
        break;
    }
    case IdentitySpec::Kind::Wnu:
    case IdentitySpec::Kind::WnuPair34: { // per-table part of the pair is wnu
        int k = ts.arity;
        std::vector<int> pattern(k);
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) {
                std::fill(pattern.begin(), pattern.end(), x);
                pattern[0] = y;
                std::size_t first = rank_tuple(pattern, d);
                for (int i = 1; i < k; ++i) {
                    std::fill(pattern.begin(), pattern.end(), x);
                    pattern[i] = y;
                    uf.unite((int)(base + first), (int)(base + rank_tuple(pattern, d)));
                }
            }
        break;
    }
    }
}

// links f(y,x,x,x) with g(y,x,x) inside one level
void identify_pair_link(UnionFind& uf, const TableSpace& f_space, const TableSpace& g_space) {
    int d = f_space.value_domain;
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
            std::size_t a = rank_tuple(std::vector<int>{y, x, x, x}, d);
            std::size_t b = rank_tuple(std::vector<int>{y, x, x}, d);
            uf.unite((int)(f_space.node_base + a), (int)(g_space.node_base + b));
        }
}

struct ClassIndex {
    std::vector<int> class_of_node;
    int class_count = 0;
    std::vector<int> level_of_class;        // value-domain level per class
    std::vector<std::size_t> representative; // first node of each class

    ClassIndex(UnionFind& uf, const std::vector<TableSpace>& spaces, std::size_t total) {
        class_of_node.assign(total, -1);
        std::vector<int> of_root(total, -1);
        for (const auto& ts : spaces) {
            for (std::size_t e = 0; e < ts.entries; ++e) {
                std::size_t node = ts.node_base + e;
                int root = uf.find((int)node);
                if (of_root[root] < 0) {
                    of_root[root] = class_count++;
                    level_of_class.push_back(ts.level);
                    representative.push_back(node);
                }
                class_of_node[node] = of_root[root];
            }
        }
    }
};

constexpr std::size_t kMaxEntriesPerTable = 1u << 21;

} // namespace

IndicatorInstance indicator_instance(const FiniteStructure& s, const IdentitySpec& id) {
    s.validate();
    id.validate();
    const int d = s.d;
    auto arities = id.arities();

    std::vector<TableSpace> spaces;
    std::size_t total = 0;
    for (int t = 0; t < (int)arities.size(); ++t) {
        std::size_t entries = pow_size(d, arities[t]);
        if (entries > kMaxEntriesPerTable)
            throw GuardError("indicator table would need " + std::to_string(entries) +
                             " entries; the supported maximum is " +
                             std::to_string(kMaxEntriesPerTable));
        spaces.push_back({t, 0, arities[t], d, total, entries});
        total += entries;
    }

    UnionFind uf(total);
    for (const auto& ts : spaces) identify(uf, ts, id.kind);
    if (id.kind == IdentitySpec::Kind::WnuPair34) identify_pair_link(uf, spaces[0], spaces[1]);
    ClassIndex classes(uf, spaces, total);

    IndicatorInstance out;
    out.csp.domains.assign(classes.class_count, Bitset(d, true));
    // value filters accumulate here and are emitted as unary constraints; an
    // empty filter is a legitimate "no polymorphism" outcome
    std::vector<Bitset> filter(classes.class_count, Bitset(d, true));

    if (id.idempotent) {
        std::vector<int> constant;
        for (const auto& ts : spaces)
            for (int x = 0; x < d; ++x) {
                constant.assign(ts.arity, x);
                Bitset b(d);
                b.set(x);
                filter[classes.class_of_node[ts.node_base + rank_tuple(constant, d)]] &= b;
            }
    }

    // encoded tuple sets for the column checks
    std::vector<std::unordered_set<std::size_t>> tuple_sets(s.relations.size());
    for (std::size_t r = 0; r < s.relations.size(); ++r)
        for (const auto& t : s.relations[r].tuples)
            tuple_sets[r].insert(rank_tuple(t, d));

    // membership bitsets of the unary relations
    std::vector<Bitset> unary_members;
    for (const auto& r : s.relations) {
        if (r.arity != 1) {
            unary_members.emplace_back();
            continue;
        }
        Bitset m(d);
        for (const auto& t : r.tuples) m.set(t[0]);
        unary_members.push_back(std::move(m));
    }

    // shared value matrices of the binary relations
    std::vector<std::shared_ptr<const BitMatrix>> binary_matrix(s.relations.size());
    for (std::size_t r = 0; r < s.relations.size(); ++r) {
        if (s.relations[r].arity != 2) continue;
        auto m = std::make_shared<BitMatrix>(d, d);
        for (const auto& t : s.relations[r].tuples) m->set(t[0], t[1]);
        binary_matrix[r] = std::move(m);
    }

    std::set<std::tuple<int, int, int>> binary_seen;          // (u, v, relation)
    std::set<std::pair<std::vector<int>, int>> nary_seen;     // (scope, relation)

    for (const auto& ts : spaces) {
        const int k = ts.arity;
        std::vector<int> tuple(k);
        for (std::size_t r = 0; r < s.relations.size(); ++r) {
            const auto& rel = s.relations[r];
            if (rel.arity == 1) {
                // a tuple with every coordinate in the relation forces the value in
                for (std::size_t e = 0; e < ts.entries; ++e) {
                    unrank_tuple(e, d, tuple);
                    bool all = true;
                    for (int v : tuple)
                        if (!unary_members[r].test(v)) { all = false; break; }
                    if (all) filter[classes.class_of_node[ts.node_base + e]] &= unary_members[r];
                }
                continue;
            }
            // columns range over the relation; rows are table entries
            double load = 1;
            for (int i = 0; i < rel.arity; ++i) load *= (double)ts.entries;
            if (load > 2e8)
                throw GuardError("indicator constraint enumeration for '" + rel.name +
                                 "' is too large");
            std::vector<std::size_t> rows(rel.arity, 0);
            std::vector<std::vector<int>> row_vals(rel.arity, std::vector<int>(k));
            std::vector<int> column(rel.arity);
            while (true) {
                for (int i = 0; i < rel.arity; ++i) unrank_tuple(rows[i], d, row_vals[i]);
                bool valid = true;
                for (int j = 0; j < k && valid; ++j) {
                    for (int i = 0; i < rel.arity; ++i) column[i] = row_vals[i][j];
                    valid = tuple_sets[r].count(rank_tuple(column, d)) > 0;
                }
                if (valid) {
                    std::vector<int> scope(rel.arity);
                    for (int i = 0; i < rel.arity; ++i)
                        scope[i] = classes.class_of_node[ts.node_base + rows[i]];
                    if (rel.arity == 2) {
                        if (scope[0] == scope[1]) {
                            Bitset diag(d);
                            for (int x = 0; x < d; ++x)
                                if (binary_matrix[r]->at(x, x)) diag.set(x);
                            filter[scope[0]] &= diag;
                        } else if (binary_seen.insert({scope[0], scope[1], (int)r}).second) {
                            out.csp.binary.push_back(
                                {scope[0], scope[1], binary_matrix[r], nullptr, rel.name});
                        }
                    } else if (nary_seen.insert({scope, (int)r}).second) {
                        out.csp.nary.push_back({scope, rel.tuples, rel.name});
                    }
                }
                int i = rel.arity - 1;
                while (i >= 0 && rows[i] + 1 == ts.entries) rows[i--] = 0;
                if (i < 0) break;
                ++rows[i];
            }
        }
    }

    for (int c = 0; c < classes.class_count; ++c)
        if (!(filter[c] == out.csp.domains[c])) out.csp.unary.push_back({c, filter[c]});

    for (const auto& ts : spaces) {
        IndicatorInstance::TableMap map;
        map.arity = ts.arity;
        map.value_domain = d;
        map.var_of_entry.resize(ts.entries);
        std::set<int> distinct;
        for (std::size_t e = 0; e < ts.entries; ++e) {
            map.var_of_entry[e] = classes.class_of_node[ts.node_base + e];
            distinct.insert(map.var_of_entry[e]);
        }
        out.tables.push_back(std::move(map));
        out.class_counts.push_back((int)distinct.size());
    }
    return out;
}

IndicatorInstance indicator_instance(const TypeStructure& t, const IdentitySpec& id) {
    id.validate();
    const int m = t.m();
    auto arities = id.arities();

    std::vector<int> level_size(m + 1);
    for (int r = 1; r <= m; ++r) level_size[r] = (int)t.level(r).size();

    std::vector<TableSpace> spaces;
    std::size_t total = 0;
    for (int tab = 0; tab < (int)arities.size(); ++tab)
        for (int r = 1; r <= m; ++r) {
            std::size_t entries = pow_size(level_size[r], arities[tab]);
            if (entries > kMaxEntriesPerTable)
                throw GuardError("type-structure indicator would need " +
                                 std::to_string(entries) + " entries at width " +
                                 std::to_string(r) + "; the supported maximum is " +
                                 std::to_string(kMaxEntriesPerTable));
            spaces.push_back({tab, r, arities[tab], level_size[r], total, entries});
            total += entries;
        }
    auto space_of = [&](int tab, int r) -> const TableSpace& {
        return spaces[tab * m + (r - 1)];
    };

    UnionFind uf(total);
    for (const auto& ts : spaces) identify(uf, ts, id.kind);
    if (id.kind == IdentitySpec::Kind::WnuPair34)
        for (int r = 1; r <= m; ++r) identify_pair_link(uf, space_of(0, r), space_of(1, r));
    ClassIndex classes(uf, spaces, total);

    IndicatorInstance out;
    out.csp.domains.reserve(classes.class_count);
    for (int c = 0; c < classes.class_count; ++c)
        out.csp.domains.emplace_back(level_size[classes.level_of_class[c]], true);
    std::vector<Bitset> filter = out.csp.domains; // emitted as unary constraints

    if (id.idempotent) {
        std::vector<int> constant;
        for (const auto& ts : spaces)
            for (int x = 0; x < ts.value_domain; ++x) {
                constant.assign(ts.arity, x);
                int cls = classes.class_of_node[ts.node_base + rank_tuple(constant, ts.value_domain)];
                Bitset b(ts.value_domain);
                b.set(x);
                filter[cls] &= b;
            }
    }

    // unary relations of the type structure constrain the width-m tables
    for (const auto& ts : spaces) {
        if (ts.level != m) continue;
        std::vector<int> tuple(ts.arity);
        for (std::size_t e = 0; e < ts.entries; ++e) {
            unrank_tuple(e, ts.value_domain, tuple);
            int cls = classes.class_of_node[ts.node_base + e];
            for (const auto& rel : t.unary_relations()) {
                bool all = true;
                for (int v : tuple)
                    if (!rel.members.test(v)) { all = false; break; }
                if (all) filter[cls] &= rel.members;
            }
        }
    }

    // restriction links: the width-r shadow of every width-m entry
    std::set<std::tuple<int, int, int>> linked; // (u, v, map ordinal)
    int map_ordinal = 0;
    for (int r = 1; r <= m; ++r) {
        std::vector<int> identity_map(r);
        std::iota(identity_map.begin(), identity_map.end(), 1);
        for (const auto& imap : all_index_maps(r, m)) {
            if (r == m && imap == identity_map) continue;
            ++map_ordinal;
            std::vector<int> rid = t.restriction_ids(imap);
            std::vector<int> right_id(level_size[r]);
            std::iota(right_id.begin(), right_id.end(), 0);
            auto pred = std::make_shared<FnEqPredicate>(rid, right_id);
            Bitset fixed(level_size[m]);
            for (int x = 0; x < level_size[m]; ++x)
                if (rid[x] == x) fixed.set(x);

            for (int tab = 0; tab < (int)arities.size(); ++tab) {
                const TableSpace& top = space_of(tab, m);
                const TableSpace& low = space_of(tab, r);
                std::vector<int> tuple(top.arity), image(top.arity);
                for (std::size_t e = 0; e < top.entries; ++e) {
                    unrank_tuple(e, top.value_domain, tuple);
                    for (int i = 0; i < top.arity; ++i) image[i] = rid[tuple[i]];
                    int u = classes.class_of_node[top.node_base + e];
                    int v = classes.class_of_node[low.node_base +
                                                  rank_tuple(image, low.value_domain)];
                    if (u == v) {
                        filter[u] &= fixed;
                    } else if (linked.insert({u, v, map_ordinal}).second) {
                        out.csp.binary.push_back({u, v, nullptr, pred, ""});
                    }
                }
            }
        }
    }

    for (int c = 0; c < classes.class_count; ++c)
        if (!(filter[c] == out.csp.domains[c])) out.csp.unary.push_back({c, filter[c]});

    for (int tab = 0; tab < (int)arities.size(); ++tab) {
        const TableSpace& top = space_of(tab, m);
        IndicatorInstance::TableMap map;
        map.arity = top.arity;
        map.value_domain = top.value_domain;
        map.var_of_entry.resize(top.entries);
        std::set<int> distinct;
        for (std::size_t e = 0; e < top.entries; ++e) {
            map.var_of_entry[e] = classes.class_of_node[top.node_base + e];
            distinct.insert(map.var_of_entry[e]);
        }
        out.tables.push_back(std::move(map));
        out.class_counts.push_back((int)distinct.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// search + audits

namespace {

std::vector<OperationTable> extract_tables(const IndicatorInstance& ind,
                                           const std::vector<int>& assignment) {
    std::vector<OperationTable> out;
    for (const auto& map : ind.tables) {
        OperationTable t{map.value_domain, map.arity, {}};
        t.values.reserve(map.var_of_entry.size());
        for (int var : map.var_of_entry) t.values.push_back(assignment[var]);
        out.push_back(std::move(t));
    }
    return out;
}

PolymorphismSearch run_search(const IndicatorInstance& ind, const SolverConfig& config) {
    PolymorphismSearch out;
    SolveResult res = solve(ind.csp, config);
    out.stats = res.stats;
    switch (res.status) {
    case SolveStatus::Sat:
        out.status = PolymorphismSearch::Status::Found;
        out.tables = extract_tables(ind, res.assignment);
        break;
    case SolveStatus::Unsat: out.status = PolymorphismSearch::Status::None; break;
    case SolveStatus::NodeLimit: out.status = PolymorphismSearch::Status::NodeLimit; break;
    case SolveStatus::TimeLimit: out.status = PolymorphismSearch::Status::TimeLimit; break;
    }
    return out;
}

} // namespace

bool preserves(const OperationTable& f, const FiniteStructure& s) {
    f.validate();
    if (f.domain_size != s.d) throw ValidationError("operation domain does not match");
    const int k = f.arity;
    for (const auto& rel : s.relations) {
        if (rel.tuples.empty()) continue;
        double load = 1;
        for (int i = 0; i < k; ++i) load *= (double)rel.tuples.size();
        if (load > 2e8)
            throw GuardError("preservation check for '" + rel.name + "' is too large");
        // choose k columns out of the relation; rows are argument tuples
        std::vector<std::size_t> cols(k, 0);
        std::vector<int> row(k), image(rel.arity);
        std::unordered_set<std::size_t> tuple_set;
        for (const auto& t : rel.tuples) tuple_set.insert(rank_tuple(t, s.d));
        while (true) {
            for (int i = 0; i < rel.arity; ++i) {
                for (int j = 0; j < k; ++j) row[j] = rel.tuples[cols[j]][i];
                image[i] = f.values[f.index_of(row)];
            }
            if (!tuple_set.count(rank_tuple(image, s.d))) return false;
            int j = k - 1;
            while (j >= 0 && cols[j] + 1 == rel.tuples.size()) cols[j--] = 0;
            if (j < 0) break;
            ++cols[j];
        }
    }
    return true;
}

bool preserves_type_structure(const OperationTable& f, const TypeStructure& t) {
    f.validate();
    const int m = t.m();
    const int d = (int)t.domain().size();
    if (f.domain_size != d) throw ValidationError("operation domain does not match");
    const int k = f.arity;
    std::size_t entries = pow_size(d, k);

    // membership in every unary relation
    std::vector<int> tuple(k);
    for (std::size_t e = 0; e < entries; ++e) {
        unrank_tuple(e, d, tuple);
        for (const auto& rel : t.unary_relations()) {
            bool all = true;
            for (int v : tuple)
                if (!rel.members.test(v)) { all = false; break; }
            if (all && !rel.members.test(f.values[e])) return false;
        }
    }

    // compatibility with the restriction maps: the induced width-r table must
    // be well-defined across all maps of that width (this is exactly
    // preservation of every Comp relation)
    for (int r = 1; r <= m; ++r) {
        std::map<std::size_t, int> induced;
        int low_size = (int)t.level(r).size();
        for (const auto& imap : all_index_maps(r, m)) {
            std::vector<int> rid = t.restriction_ids(imap);
            std::vector<int> image(k);
            for (std::size_t e = 0; e < entries; ++e) {
                unrank_tuple(e, d, tuple);
                for (int i = 0; i < k; ++i) image[i] = rid[tuple[i]];
                std::size_t key = rank_tuple(image, low_size);
                int value = rid[f.values[e]];
                auto [it, fresh] = induced.emplace(key, value);
                if (!fresh && it->second != value) return false;
            }
        }
    }
    return true;
}

PolymorphismSearch has_polymorphism(const FiniteStructure& s, const IdentitySpec& id,
                                    const SolverConfig& config) {
    IndicatorInstance ind = indicator_instance(s, id);
    PolymorphismSearch out = run_search(ind, config);
    if (out.status == PolymorphismSearch::Status::Found) {
        if (!check_identity(out.tables, id, s.d))
            throw Error("internal: found tables fail the identity audit");
        for (const auto& table : out.tables)
            if (!preserves(table, s))
                throw Error("internal: found tables fail the preservation audit");
    }
    return out;
}

PolymorphismSearch has_polymorphism(const TypeStructure& t, const IdentitySpec& id,
                                    const SolverConfig& config) {
    IndicatorInstance ind = indicator_instance(t, id);
    PolymorphismSearch out = run_search(ind, config);
    if (out.status == PolymorphismSearch::Status::Found) {
        if (!check_identity(out.tables, id, (int)t.domain().size()))
            throw Error("internal: found tables fail the identity audit");
        for (const auto& table : out.tables)
            if (!preserves_type_structure(table, t))
                throw Error("internal: found tables fail the preservation audit");
    }
    return out;
}

// ---------------------------------------------------------------------------
// classification

ClassifyReport classify_reduct(const PartitionSpec& spec, const ReductSpec& reduct,
                               const ClassifyOptions& options) {
    spec.validate();
    if (!spec.stabilised())
        throw ValidationError("classification needs a stabilised partition; stabilise first");
    reduct.validate(spec);

    ClassifyReport report;
    report.assumed_core_and_tame = options.assume_core_and_tame;

    if (reduct.relations.empty()) {
        // a reduct with no relations has only vacuously satisfiable instances
        report.verdict = ClassifyReport::Verdict::Tractable;
        report.explanation = "the reduct has no relations; every instance is satisfiable";
        return report;
    }

    bool expand = options.expansion == ExpansionMode::Always ||
                  (options.expansion == ExpansionMode::Auto && !options.assume_core_and_tame);
    report.expanded = expand;

    PartitionSpec working_spec = spec;
    ReductSpec working_reduct = reduct;
    if (expand) {
        ConstantExpansion ex = expand_with_constants(spec);
        working_spec = ex.spec;
        for (auto& rel : working_reduct.relations) rel.def = replace_blocks(rel.def, ex.cover);
    }

    report.m = choose_m(working_spec, working_reduct, Purpose::Classify);
    TypeStructure t = TypeStructure::build(working_spec, working_reduct, report.m);
    report.type_domain_size = (int)t.domain().size();

    PolymorphismSearch search;
    try {
        search = has_polymorphism(t, IdentitySpec::siggers(), options.solver);
    } catch (const GuardError& e) {
        report.verdict = ClassifyReport::Verdict::ResourceLimit;
        report.explanation = e.what();
        return report;
    }
    report.stats = search.stats;
    report.verdict = classification_verdict(search.status, options.assume_core_and_tame);

    switch (report.verdict) {
    case ClassifyReport::Verdict::Tractable:
        report.witness = search.tables[0];
        report.explanation = "the type structure has a Siggers polymorphism";
        break;
    case ClassifyReport::Verdict::HardCandidate:
        report.explanation =
            "no Siggers polymorphism; NP-complete under the asserted "
            "model-complete-core and tame-endomorphism hypotheses";
        break;
    case ClassifyReport::Verdict::NotApplicable:
        report.explanation =
            "no Siggers polymorphism found, and the model-complete-core / "
            "tame-endomorphism hypotheses were not asserted, so no hardness "
            "claim is made";
        break;
    case ClassifyReport::Verdict::ResourceLimit:
        report.explanation = "the polymorphism search hit a resource limit";
        break;
    }
    return report;
}

ClassifyReport::Verdict classification_verdict(PolymorphismSearch::Status status,
                                               bool assume_core_and_tame) {
    switch (status) {
    case PolymorphismSearch::Status::Found: return ClassifyReport::Verdict::Tractable;
    case PolymorphismSearch::Status::None:
        return assume_core_and_tame ? ClassifyReport::Verdict::HardCandidate
                                    : ClassifyReport::Verdict::NotApplicable;
    default: return ClassifyReport::Verdict::ResourceLimit;
    }
}

} // namespace typecsp
