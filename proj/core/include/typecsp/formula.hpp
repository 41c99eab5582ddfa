#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace typecsp {

/// Label of one tuple position under a canonical realization: which block the
/// element lies in and which equality class it belongs to.
struct Label {
    std::string block;
    int cls = 0;
};

/// Quantifier-free formula over atoms "zI = zJ" and "Block(zI)", with the
/// usual boolean connectives. Positions are 1-based. Immutable once built.
class Formula {
public:
    enum class Kind { True, False, Eq, InBlock, Not, And, Or };

    static Formula truth();
    static Formula falsity();
    static Formula eq(int lhs, int rhs);
    static Formula in_block(std::string block, int pos);
    static Formula negation(Formula arg);
    static Formula conjunction(std::vector<Formula> args); // needs >= 2 args
    static Formula disjunction(std::vector<Formula> args); // needs >= 2 args

    Kind kind() const { return kind_; }
    int lhs() const { return lhs_; }
    int rhs() const { return rhs_; }
    int pos() const { return lhs_; }
    const std::string& block() const { return block_; }
    const std::vector<Formula>& args() const { return args_; }

    /// Maximum referenced position; 0 for constant formulas.
    int width() const { return width_; }

    bool operator==(const Formula& o) const;

    /// Grammar-faithful rendering; parse(to_string(f)) reproduces f.
    std::string to_string() const;

private:
    Formula() = default;

    Kind kind_ = Kind::True;
    int lhs_ = 0, rhs_ = 0;   // Eq positions; lhs_ doubles as InBlock position
    std::string block_;
    std::vector<Formula> args_;
    int width_ = 0;
};

/// Parses `text` against the formula grammar. When `known_blocks` is given,
/// block atoms naming anything outside it are rejected.
Formula parse_formula(const std::string& text);
Formula parse_formula(const std::string& text, const std::set<std::string>& known_blocks);

/// Satisfaction under the canonical semantics: Eq(i,j) holds iff the class
/// ids at positions i and j agree, InBlock(b,i) iff position i carries block b.
/// The assignment must cover the formula's width.
bool evaluate(const Formula& phi, std::span<const Label> assignment);

/// Substitutes position p by index_map[p-1] throughout. The map must be total
/// on [width(phi)]; values are 1-based.
Formula reindex(const Formula& phi, std::span<const int> index_map);

/// Replaces every InBlock(old,·) whose block appears in `cover` by the
/// disjunction of InBlock(new,·) over the listed replacement blocks. Used when
/// a partition is refined (stabilise, constant expansion).
Formula replace_blocks(const Formula& phi,
                       const std::map<std::string, std::vector<std::string>>& cover);

} // namespace typecsp
