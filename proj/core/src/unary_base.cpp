#include "typecsp/unary_base.hpp"

#include "typecsp/errors.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace typecsp {

bool PartitionSpec::stabilised() const {
    for (const auto& b : blocks)
        if (!b.infinite() && !b.singleton()) return false;
    return true;
}

int PartitionSpec::index_of(const std::string& name) const {
    for (int i = 0; i < (int)blocks.size(); ++i)
        if (blocks[i].name == name) return i;
    return -1;
}

void PartitionSpec::validate() const {
    if (blocks.empty()) throw ValidationError("partition needs at least one block");
    std::set<std::string> seen;
    for (const auto& b : blocks) {
        if (b.name.empty()) throw ValidationError("block names must be nonempty");
        if (!seen.insert(b.name).second)
            throw ValidationError("duplicate block name '" + b.name + "'");
        if (b.size && *b.size < 1)
            throw ValidationError("block '" + b.name + "' has nonpositive size");
    }
}

Stabilisation stabilise(const PartitionSpec& spec) {
    spec.validate();
    Stabilisation out;
    for (const auto& b : spec.blocks) {
        if (b.infinite() || b.singleton()) {
            out.spec.blocks.push_back(b);
            out.rewrite[b.name] = {b.name};
            continue;
        }
        std::vector<std::string> parts;
        for (int k = 1; k <= *b.size; ++k) {
            std::string name = b.name + "#" + std::to_string(k);
            out.spec.blocks.push_back({name, 1});
            parts.push_back(name);
        }
        out.rewrite[b.name] = std::move(parts);
    }
    out.spec.validate(); // splits could collide with existing names
    return out;
}

ConstantExpansion expand_with_constants(const PartitionSpec& spec) {
    spec.validate();
    if (!spec.stabilised())
        throw ValidationError("constant expansion needs a stabilised partition");
    ConstantExpansion out;
    for (const auto& b : spec.blocks) {
        if (b.singleton()) {
            out.spec.blocks.push_back(b);
            out.cover[b.name] = {b.name};
            out.constant[b.name] = b.name;
            continue;
        }
        std::string rest = b.name + "'";
        std::string constant = "c" + b.name;
        out.spec.blocks.push_back({rest, std::nullopt});
        out.spec.blocks.push_back({constant, 1});
        out.cover[b.name] = {rest, constant};
        out.constant[b.name] = constant;
    }
    out.spec.validate();
    return out;
}

// ---------------------------------------------------------------------------
// m-types

MType MType::from_pattern(std::span<const int> class_ids, std::span<const int> block_idx) {
    if (class_ids.size() != block_idx.size() || class_ids.empty())
        throw ValidationError("pattern arrays must be nonempty and of equal length");
    if ((int)class_ids.size() > kMaxWidth)
        throw GuardError("type width exceeds " + std::to_string(kMaxWidth));
    MType t;
    t.m_ = (std::uint8_t)class_ids.size();
    std::vector<int> remap; // original class id of normalized class k
    for (int i = 0; i < (int)class_ids.size(); ++i) {
        int norm = -1;
        for (int k = 0; k < (int)remap.size(); ++k)
            if (remap[k] == class_ids[i]) { norm = k; break; }
        if (norm < 0) {
            norm = (int)remap.size();
            remap.push_back(class_ids[i]);
            t.blk_[norm] = (std::uint8_t)block_idx[i];
        } else if (t.blk_[norm] != block_idx[i]) {
            throw ValidationError("positions in one equality class carry different blocks");
        }
        t.cls_[i] = (std::uint8_t)norm;
    }
    t.ncls_ = (std::uint8_t)remap.size();
    return t;
}

std::vector<MType> enumerate_types(const PartitionSpec& spec, int m) {
    spec.validate();
    if (!spec.stabilised())
        throw ValidationError("type enumeration needs a stabilised partition");
    if (m < 1) throw ValidationError("m must be positive");
    if (m > MType::kMaxWidth)
        throw GuardError("m exceeds the supported width " + std::to_string(MType::kMaxWidth));
    if (spec.block_count() > 32) throw GuardError("more than 32 blocks are not supported");

    std::vector<MType> out;
    MType t;
    t.m_ = (std::uint8_t)m;

    // blocks per class, odometer order; singleton blocks usable at most once
    auto assign_blocks = [&](auto&& self, int cls, std::uint32_t singletons_used) -> void {
        if (cls == t.ncls_) {
            out.push_back(t);
            return;
        }
        for (int b = 0; b < spec.block_count(); ++b) {
            if (spec.blocks[b].singleton() && (singletons_used & (1u << b))) continue;
            t.blk_[cls] = (std::uint8_t)b;
            self(self, cls + 1,
                 spec.blocks[b].singleton() ? singletons_used | (1u << b) : singletons_used);
        }
        t.blk_[cls] = 0;
    };
    // restricted growth strings give the partitions in lexicographic order
    auto grow = [&](auto&& self, int pos) -> void {
        if (pos == m) {
            assign_blocks(assign_blocks, 0, 0);
            return;
        }
        for (int c = 0; c <= t.ncls_; ++c) {
            t.cls_[pos] = (std::uint8_t)c;
            std::uint8_t saved = t.ncls_;
            if (c == t.ncls_) ++t.ncls_;
            self(self, pos + 1);
            t.ncls_ = saved;
        }
        t.cls_[pos] = 0;
    };
    grow(grow, 0);
    return out;
}

MType restrict_type(const MType& p, std::span<const int> index_map) {
    if (index_map.empty()) throw ValidationError("restriction map must be nonempty");
    if ((int)index_map.size() > MType::kMaxWidth)
        throw GuardError("restriction width exceeds " + std::to_string(MType::kMaxWidth));
    MType t;
    t.m_ = (std::uint8_t)index_map.size();
    std::array<int, MType::kMaxWidth> remap; // old class -> new class, -1 unset
    remap.fill(-1);
    for (int i = 0; i < (int)index_map.size(); ++i) {
        int src = index_map[i];
        if (src < 1 || src > p.width())
            throw ValidationError("restriction map value " + std::to_string(src) +
                                  " outside [1," + std::to_string(p.width()) + "]");
        int old_cls = p.class_of(src);
        if (remap[old_cls] < 0) {
            remap[old_cls] = t.ncls_;
            t.blk_[t.ncls_] = (std::uint8_t)p.block_of_class(old_cls);
            ++t.ncls_;
        }
        t.cls_[i] = (std::uint8_t)remap[old_cls];
    }
    return t;
}

namespace {

bool contains_rec(const PartitionSpec& spec, const MType& p, const Formula& phi) {
    switch (phi.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Eq: return p.class_of(phi.lhs()) == p.class_of(phi.rhs());
    case Formula::Kind::InBlock:
        return spec.block_name(p.block_of(phi.pos())) == phi.block();
    case Formula::Kind::Not: return !contains_rec(spec, p, phi.args()[0]);
    case Formula::Kind::And:
        for (const auto& a : phi.args())
            if (!contains_rec(spec, p, a)) return false;
        return true;
    case Formula::Kind::Or:
        for (const auto& a : phi.args())
            if (contains_rec(spec, p, a)) return true;
        return false;
    }
    return false;
}

} // namespace

bool type_contains(const PartitionSpec& spec, const MType& p, const Formula& phi) {
    if (phi.width() > p.width())
        throw ValidationError("formula width " + std::to_string(phi.width()) +
                              " exceeds type width " + std::to_string(p.width()));
    return contains_rec(spec, p, phi);
}

std::vector<Label> canonical_assignment(const PartitionSpec& spec, const MType& p) {
    std::vector<Label> out;
    out.reserve(p.width());
    for (int k = 1; k <= p.width(); ++k)
        out.push_back({spec.block_name(p.block_of(k)), p.class_of(k)});
    return out;
}

// ---------------------------------------------------------------------------
// Bounds

BoundSet bounds(const PartitionSpec& spec) {
    spec.validate();
    if (!spec.stabilised())
        throw ValidationError("bounds are computed for stabilised partitions; stabilise first");
    if (spec.block_count() > 16)
        throw GuardError("bound enumeration supports at most 16 blocks");
    BoundSet out;
    // one element carrying no label
    out.bounds.push_back({{{}}});
    // one element carrying any >= 2 labels
    int b = spec.block_count();
    for (std::uint32_t mask = 0; mask < (1u << b); ++mask) {
        if (std::popcount(mask) < 2) continue;
        std::vector<int> labels;
        for (int i = 0; i < b; ++i)
            if (mask & (1u << i)) labels.push_back(i);
        out.bounds.push_back({{labels}});
    }
    // two elements sharing a singleton block
    for (int i = 0; i < b; ++i)
        if (spec.blocks[i].singleton())
            out.bounds.push_back({{{i}, {i}}});
    for (const auto& d : out.bounds) out.max_size = std::max(out.max_size, d.size());
    return out;
}

bool bound_embeds(const BoundStructure& d, const BoundStructure& e) {
    // injective assignment with exact label-set matching, backtracking
    std::vector<int> target(d.size(), -1);
    std::vector<bool> used(e.size(), false);
    auto rec = [&](auto&& self, int i) -> bool {
        if (i == d.size()) return true;
        for (int j = 0; j < e.size(); ++j) {
            if (used[j] || d.labels[i] != e.labels[j]) continue;
            used[j] = true;
            target[i] = j;
            if (self(self, i + 1)) return true;
            used[j] = false;
            target[i] = -1;
        }
        return false;
    };
    return rec(rec, 0);
}

} // namespace typecsp
