#include "typecsp/type_structure.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <set>

namespace typecsp {

int ReductSpec::index_of(const std::string& name) const {
    for (int i = 0; i < (int)relations.size(); ++i)
        if (relations[i].name == name) return i;
    return -1;
}

int ReductSpec::max_arity() const {
    int a = 0;
    for (const auto& r : relations) a = std::max(a, r.arity);
    return a;
}

void ReductSpec::validate(const PartitionSpec& spec) const {
    std::set<std::string> seen;
    for (const auto& r : relations) {
        if (r.name.empty()) throw ValidationError("relation names must be nonempty");
        if (!seen.insert(r.name).second)
            throw ValidationError("duplicate relation name '" + r.name + "'");
        if (r.arity < 1)
            throw ValidationError("relation '" + r.name + "' needs arity >= 1");
        if (r.def.width() > r.arity)
            throw ValidationError("definition of '" + r.name + "' has width " +
                                  std::to_string(r.def.width()) + " > arity " +
                                  std::to_string(r.arity));
        // every referenced block must exist
        auto walk = [&](auto&& self, const Formula& f) -> void {
            if (f.kind() == Formula::Kind::InBlock && spec.index_of(f.block()) < 0)
                throw ValidationError("definition of '" + r.name +
                                      "' references unknown block '" + f.block() + "'");
            for (const auto& a : f.args()) self(self, a);
        };
        walk(walk, r.def);
    }
}

std::vector<IndexMap> all_index_maps(int r, int m) {
    std::vector<IndexMap> out;
    IndexMap cur(r, 1);
    while (true) {
        out.push_back(cur);
        int pos = r - 1;
        while (pos >= 0 && cur[pos] == m) cur[pos--] = 1;
        if (pos < 0) break;
        ++cur[pos];
    }
    return out;
}

int choose_m(const PartitionSpec& spec, const ReductSpec& reduct, Purpose) {
    if (!spec.stabilised())
        throw ValidationError("choose_m needs a stabilised partition");
    // block predicates of the base structure are unary
    int m_a = std::max(1, reduct.max_arity());
    int m_b = bounds(spec).max_size;
    // Both purposes land on the same floor for unary bases: the Reduce rule is
    // max(m_a+1, m_b, 3) and the Classify rule ("larger than each bound,
    // strictly larger than the maximal arity") is dominated by it.
    return std::max({m_a + 1, m_b, 3});
}

TypeStructure TypeStructure::build(const PartitionSpec& spec, const ReductSpec& reduct, int m) {
    spec.validate();
    if (!spec.stabilised())
        throw ValidationError("type structures are built over stabilised partitions");
    reduct.validate(spec);
    if (m < reduct.max_arity())
        throw ValidationError("m = " + std::to_string(m) + " is below the maximal arity " +
                              std::to_string(reduct.max_arity()));
    if (m < 1) throw ValidationError("m must be positive");

    TypeStructure t;
    t.spec_ = spec;
    t.reduct_ = reduct;
    t.m_ = m;
    for (int r = 1; r <= m; ++r) t.levels_.push_back(enumerate_types(spec, r));
    t.domain_ = t.levels_.back();

    int d = (int)t.domain_.size();
    for (int rel = 0; rel < (int)reduct.relations.size(); ++rel) {
        const auto& R = reduct.relations[rel];
        for (auto& i : all_index_maps(R.arity, m)) {
            Formula shifted = reindex(R.def, i);
            UnaryRelation u{rel, i, Bitset(d)};
            for (int p = 0; p < d; ++p)
                if (type_contains(spec, t.domain_[p], shifted)) u.members.set(p);
            t.unary_.push_back(std::move(u));
        }
    }
    t.index_unary();
    return t;
}

TypeStructure TypeStructure::assemble(PartitionSpec spec, ReductSpec reduct, int m,
                                      std::vector<MType> domain,
                                      std::vector<UnaryRelation> unary) {
    spec.validate();
    reduct.validate(spec);
    TypeStructure t;
    t.spec_ = std::move(spec);
    t.reduct_ = std::move(reduct);
    t.m_ = m;
    for (int r = 1; r <= m; ++r) t.levels_.push_back(enumerate_types(t.spec_, r));
    t.domain_ = std::move(domain);
    if (t.domain_ != t.levels_.back())
        throw ValidationError("imported domain does not match the partition's m-types");
    t.unary_ = std::move(unary);
    // exports keep the build order; verify the layout before trusting offsets
    std::size_t at = 0;
    for (int rel = 0; rel < (int)t.reduct_.relations.size(); ++rel)
        for (const auto& i : all_index_maps(t.reduct_.relations[rel].arity, m)) {
            if (at >= t.unary_.size() || t.unary_[at].relation != rel ||
                t.unary_[at].index_map != i)
                throw ValidationError("imported unary relations are not in build order");
            if (t.unary_[at].members.size() != (int)t.domain_.size())
                throw ValidationError("imported membership bitset has the wrong size");
            ++at;
        }
    if (at != t.unary_.size())
        throw ValidationError("imported unary relation list has unexpected size");
    t.index_unary();
    return t;
}

void TypeStructure::index_unary() {
    unary_offset_.assign(reduct_.relations.size(), 0);
    int off = 0;
    for (int rel = 0; rel < (int)reduct_.relations.size(); ++rel) {
        unary_offset_[rel] = off;
        int maps = 1;
        for (int k = 0; k < reduct_.relations[rel].arity; ++k) maps *= m_;
        off += maps;
    }
}

const std::vector<MType>& TypeStructure::level(int r) const {
    if (r < 1 || r > m_) throw ValidationError("level index outside [1,m]");
    return levels_[r - 1];
}

void TypeStructure::check_map(const IndexMap& i) const {
    if (i.empty() || (int)i.size() > m_)
        throw ValidationError("index map length outside [1,m]");
    for (int v : i)
        if (v < 1 || v > m_)
            throw ValidationError("index map value " + std::to_string(v) + " outside [1,m]");
}

const TypeStructure::UnaryRelation& TypeStructure::unary(int rel, const IndexMap& i) const {
    check_map(i);
    const auto& R = reduct_.relations[rel];
    if ((int)i.size() != R.arity)
        throw ValidationError("index map length does not match arity of '" + R.name + "'");
    int rank = 0;
    for (int v : i) rank = rank * m_ + (v - 1);
    return unary_[unary_offset_[rel] + rank];
}

const TypeStructure::UnaryRelation* TypeStructure::find_unary(const std::string& rel,
                                                              const IndexMap& i) const {
    int idx = reduct_.index_of(rel);
    if (idx < 0) return nullptr;
    if ((int)i.size() != reduct_.relations[idx].arity) return nullptr;
    return &unary(idx, i);
}

bool TypeStructure::comp(const IndexMap& i, const IndexMap& j, int p, int q) const {
    check_map(i);
    check_map(j);
    if (i.size() != j.size())
        throw ValidationError("comp maps must have equal length");
    return restrict_type(domain_[p], i) == restrict_type(domain_[q], j);
}

std::vector<int> TypeStructure::restriction_ids(const IndexMap& i) const {
    check_map(i);
    const auto& lvl = levels_[i.size() - 1];
    std::vector<int> ids(domain_.size());
    for (int p = 0; p < (int)domain_.size(); ++p) {
        MType r = restrict_type(domain_[p], i);
        auto it = std::lower_bound(lvl.begin(), lvl.end(), r);
        ids[p] = (int)(it - lvl.begin());
    }
    return ids;
}

int TypeStructure::type_index(const MType& t) const {
    if (t.width() < 1 || t.width() > m_) return -1;
    const auto& lvl = levels_[t.width() - 1];
    auto it = std::lower_bound(lvl.begin(), lvl.end(), t);
    if (it == lvl.end() || !(*it == t)) return -1;
    return (int)(it - lvl.begin());
}

bool TypeStructure::operator==(const TypeStructure& o) const {
    if (m_ != o.m_ || domain_ != o.domain_) return false;
    if (unary_.size() != o.unary_.size()) return false;
    for (std::size_t k = 0; k < unary_.size(); ++k) {
        if (unary_[k].relation != o.unary_[k].relation) return false;
        if (unary_[k].index_map != o.unary_[k].index_map) return false;
        if (!(unary_[k].members == o.unary_[k].members)) return false;
    }
    return true;
}

} // namespace typecsp
