#pragma once

#include "typecsp/bitset.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace typecsp {

/// Backend of a binary intensional constraint. Implementations may override
/// the support queries with something faster than a holds() scan.
class BinaryPredicate {
public:
    virtual ~BinaryPredicate() = default;

    virtual bool holds(int a, int b) const = 0;

    /// Whether value `a` of the first variable has a support in `dom_second`.
    virtual bool supported(int a, const Bitset& dom_second) const {
        for (int b = dom_second.first(); b >= 0; b = dom_second.next(b))
            if (holds(a, b)) return true;
        return false;
    }

    /// Whether value `b` of the second variable has a support in `dom_first`.
    virtual bool supported_rev(int b, const Bitset& dom_first) const {
        for (int a = dom_first.first(); a >= 0; a = dom_first.next(a))
            if (holds(a, b)) return true;
        return false;
    }
};

/// Predicate from a plain callable; support queries scan.
class LambdaPredicate : public BinaryPredicate {
public:
    explicit LambdaPredicate(std::function<bool(int, int)> fn) : fn_(std::move(fn)) {}
    bool holds(int a, int b) const override { return fn_(a, b); }

private:
    std::function<bool(int, int)> fn_;
};

/// holds(a,b) iff left_id[a] == right_id[b]. Supports run in O(words) through
/// precomputed value classes. This is the shape of compatibility constraints:
/// the parameters are the two restriction-id tables.
class FnEqPredicate : public BinaryPredicate {
public:
    FnEqPredicate(std::vector<int> left_id, std::vector<int> right_id);

    bool holds(int a, int b) const override { return left_id_[a] == right_id_[b]; }
    bool supported(int a, const Bitset& dom_second) const override;
    bool supported_rev(int b, const Bitset& dom_first) const override;

    const std::vector<int>& left_id() const { return left_id_; }
    const std::vector<int>& right_id() const { return right_id_; }

private:
    int id_count_ = 0;
    std::vector<int> left_id_, right_id_;
    std::vector<Bitset> left_class_, right_class_; // per id, values carrying it
};

/// Finite-domain CSP: explicit value domains plus unary, binary (extensional
/// or intensional), and n-ary extensional constraints.
struct SolverInstance {
    struct Unary {
        int var = 0;
        Bitset allowed;
    };
    struct Binary {
        int u = 0, v = 0;
        std::shared_ptr<const BitMatrix> table;        // extensional form
        std::shared_ptr<const BinaryPredicate> pred;   // intensional form
        std::string tag;
    };
    struct Nary {
        std::vector<int> scope;
        std::vector<std::vector<int>> tuples;
        std::string tag;
    };

    std::vector<Bitset> domains;
    std::vector<Unary> unary;
    std::vector<Binary> binary;
    std::vector<Nary> nary;

    int var_count() const { return (int)domains.size(); }

    /// Domains nonempty, scopes in range, exactly one backend per binary
    /// constraint. Throws ValidationError.
    void validate() const;
};

struct SolverConfig {
    enum class VarOrder { Mrv, Lexicographic };
    VarOrder var_order = VarOrder::Mrv;
    bool shuffle_ties = false;   // deterministic tie priorities drawn from seed
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> node_limit;
    std::optional<double> time_limit_seconds;
};

struct SolveStats {
    std::uint64_t nodes = 0;
    std::uint64_t propagations = 0; // constraint revisions
};

enum class SolveStatus { Sat, Unsat, NodeLimit, TimeLimit };

struct SolveResult {
    SolveStatus status = SolveStatus::Unsat;
    std::vector<int> assignment; // value per variable when Sat
    SolveStats stats;
};

struct AcOutcome {
    bool consistent = true;
    std::vector<Bitset> domains;
    std::uint64_t propagations = 0;
};

/// Generalized arc consistency fixpoint. The result is independent of the
/// revision order; Inconsistent is reported through `consistent`.
AcOutcome enforce_arc_consistency(const SolverInstance& inst);

/// Complete MAC search. Sound and complete; resource-limit outcomes are
/// distinct from Unsat. Deterministic for a fixed config.
SolveResult solve(const SolverInstance& inst, const SolverConfig& config = {});

} // namespace typecsp
