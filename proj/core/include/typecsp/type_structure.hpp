#pragma once

#include "typecsp/bitset.hpp"
#include "typecsp/formula.hpp"
#include "typecsp/unary_base.hpp"

#include <span>
#include <string>
#include <vector>

namespace typecsp {

/// One named relation of the reduct, defined over the unary base by a
/// quantifier-free formula of width <= arity.
struct ReductRelation {
    std::string name;
    int arity = 0;
    Formula def = Formula::truth();
};

struct ReductSpec {
    std::vector<ReductRelation> relations;

    int index_of(const std::string& name) const;
    int max_arity() const;

    /// Checks name uniqueness, arity bounds, definition widths, and that every
    /// block atom names a block of `spec`.
    void validate(const PartitionSpec& spec) const;
};

/// Index map [r] -> [m], values 1-based.
using IndexMap = std::vector<int>;

/// All m^r maps [r] -> [m], odometer order (first position most significant).
std::vector<IndexMap> all_index_maps(int r, int m);

enum class Purpose { Reduce, Classify };

/// Smallest admissible m for the given partition and reduct:
/// max(max_arity + 1, largest bound size, 3).
int choose_m(const PartitionSpec& spec, const ReductSpec& reduct, Purpose purpose);

/// The finite relational structure on m-types: one unary relation per
/// (reduct relation, index map), plus the binary compatibility predicate
/// comp(i,j,p,q) <=> restrict(p,i) = restrict(q,j), evaluated lazily.
class TypeStructure {
public:
    struct UnaryRelation {
        int relation = 0; // index into reduct().relations
        IndexMap index_map;
        Bitset members; // over domain indices
    };

    static TypeStructure build(const PartitionSpec& spec, const ReductSpec& reduct, int m);

    /// Reassembles a structure from exported parts (domain and unary
    /// relations are trusted as given; comp stays lazy).
    static TypeStructure assemble(PartitionSpec spec, ReductSpec reduct, int m,
                                  std::vector<MType> domain,
                                  std::vector<UnaryRelation> unary);

    int m() const { return m_; }
    const PartitionSpec& partition() const { return spec_; }
    const ReductSpec& reduct() const { return reduct_; }
    const std::vector<MType>& domain() const { return domain_; }

    /// Types of width r <= m, in enumeration order. level(m) == domain().
    const std::vector<MType>& level(int r) const;

    const std::vector<UnaryRelation>& unary_relations() const { return unary_; }

    /// The relation <R, i> for relation index `rel`; O(1).
    const UnaryRelation& unary(int rel, const IndexMap& i) const;
    const UnaryRelation* find_unary(const std::string& rel, const IndexMap& i) const;

    /// Comp_{i,j}(p,q): the subtuples selected by i and j have the same type.
    bool comp(const IndexMap& i, const IndexMap& j, int p, int q) const;

    /// For each domain index, the index of its i-restriction within level(r).
    std::vector<int> restriction_ids(const IndexMap& i) const;

    /// Index of `t` in level(t.width()), or -1.
    int type_index(const MType& t) const;

    bool operator==(const TypeStructure& o) const;

private:
    TypeStructure() = default;
    void index_unary();
    void check_map(const IndexMap& i) const;

    PartitionSpec spec_;
    ReductSpec reduct_;
    int m_ = 0;
    std::vector<std::vector<MType>> levels_; // levels_[r-1] = r-types
    std::vector<MType> domain_;              // == levels_[m-1]
    std::vector<UnaryRelation> unary_;
    std::vector<int> unary_offset_; // per relation, start index into unary_
};

} // namespace typecsp
