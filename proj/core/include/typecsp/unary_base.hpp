#pragma once

#include "typecsp/formula.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace typecsp {

/// One block of a partitioned unary base structure. `size` is empty for
/// infinite blocks, otherwise the (positive) number of elements.
struct Block {
    std::string name;
    std::optional<int> size;

    bool infinite() const { return !size.has_value(); }
    bool singleton() const { return size && *size == 1; }
};

/// Ordered list of blocks partitioning the base domain.
struct PartitionSpec {
    std::vector<Block> blocks;

    /// Every block infinite or a singleton.
    bool stabilised() const;

    /// Index of the named block, or -1.
    int index_of(const std::string& name) const;

    const std::string& block_name(int idx) const { return blocks[idx].name; }
    int block_count() const { return (int)blocks.size(); }

    /// Throws ValidationError on duplicate names or nonpositive sizes.
    void validate() const;
};

struct Stabilisation {
    PartitionSpec spec;
    /// old block name -> names of the blocks it was split into (identity for
    /// blocks that passed through unchanged)
    std::map<std::string, std::vector<std::string>> rewrite;
};

/// Splits every finite block of size k >= 2 into k singleton blocks named
/// name#1..name#k. Infinite and singleton blocks pass through.
Stabilisation stabilise(const PartitionSpec& spec);

struct ConstantExpansion {
    PartitionSpec spec;
    /// old block name -> blocks that now cover it (U' and cU for infinite
    /// blocks, the block itself for singletons)
    std::map<std::string, std::vector<std::string>> cover;
    /// old block name -> its singleton constant block
    std::map<std::string, std::string> constant;
};

/// Refines a stabilised partition with one constant per block: every infinite
/// block U becomes U' (infinite) plus cU (singleton); singletons are their own
/// constant. Membership formulas are rewritten through `cover`.
ConstantExpansion expand_with_constants(const PartitionSpec& spec);

/// Normalized quantifier-free type of an m-tuple: the equality partition of
/// positions (class ids in first-occurrence order) plus a block per class.
/// Orders lexicographically on (class pattern, block pattern), making the
/// enumerate_types output order structural.
class MType {
public:
    static constexpr int kMaxWidth = 10;

    MType() = default;

    /// Builds a type from a class id per position (any ids; renormalized) and
    /// a block index per position (must be constant on classes).
    static MType from_pattern(std::span<const int> class_ids, std::span<const int> block_idx);

    int width() const { return m_; }
    int class_count() const { return ncls_; }
    int class_of(int pos) const { return cls_[pos - 1]; }       // pos is 1-based
    int block_of_class(int cls) const { return blk_[cls]; }
    int block_of(int pos) const { return blk_[cls_[pos - 1]]; }

    auto operator<=>(const MType&) const = default;

private:
    friend std::vector<MType> enumerate_types(const PartitionSpec&, int);
    friend MType restrict_type(const MType&, std::span<const int>);

    std::uint8_t m_ = 0;
    std::array<std::uint8_t, kMaxWidth> cls_{}; // class id per position, 0-based
    std::uint8_t ncls_ = 0;
    std::array<std::uint8_t, kMaxWidth> blk_{}; // block index per class id
};

/// All normalized m-types of the stabilised partition, in lexicographic order
/// on (class pattern, block pattern). m must be in [1, MType::kMaxWidth].
std::vector<MType> enumerate_types(const PartitionSpec& spec, int m);

/// Type of the subtuple selected by `index_map` (1-based values into [m],
/// arbitrary, not necessarily injective).
MType restrict_type(const MType& p, std::span<const int> index_map);

/// Whether the type contains the formula, i.e. the formula holds under the
/// canonical realization of p. width(phi) <= width(p).
bool type_contains(const PartitionSpec& spec, const MType& p, const Formula& phi);

/// Canonical assignment of p: position k gets (block name of its class, class id).
std::vector<Label> canonical_assignment(const PartitionSpec& spec, const MType& p);

/// A finite structure over the block signature that cannot embed into the
/// partitioned domain: each element carries a set of block labels.
struct BoundStructure {
    std::vector<std::vector<int>> labels; // per element, sorted block indices

    int size() const { return (int)labels.size(); }
};

struct BoundSet {
    std::vector<BoundStructure> bounds;
    int max_size = 0;
};

/// Minimal forbidden substructures of a stabilised partition: an unlabeled
/// element, an element with >= 2 labels, and a repeated singleton label.
BoundSet bounds(const PartitionSpec& spec);

/// Whether `d` embeds into `e` (injective map preserving label sets exactly).
bool bound_embeds(const BoundStructure& d, const BoundStructure& e);

} // namespace typecsp
