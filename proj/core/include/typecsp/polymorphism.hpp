#pragma once

#include "typecsp/finite_csp.hpp"
#include "typecsp/op_table.hpp"
#include "typecsp/type_structure.hpp"
#include "typecsp/unary_base.hpp"

#include <optional>
#include <string>
#include <vector>

namespace typecsp {

/// Plain finite relational structure: a domain size and named tuple sets.
struct FiniteStructure {
    struct Relation {
        std::string name;
        int arity = 0;
        std::vector<std::vector<int>> tuples;
    };

    int d = 0;
    std::vector<Relation> relations;

    void validate() const;
};

/// One of the supported operation identities. `idempotent` additionally pins
/// f(x,..,x) = x.
struct IdentitySpec {
    enum class Kind { Siggers6, Cyclic, Wnu, WnuPair34 };

    Kind kind = Kind::Siggers6;
    int k = 0; // arity parameter of Cyclic / Wnu, in [2,6]
    bool idempotent = false;

    static IdentitySpec siggers(bool idempotent = false);
    static IdentitySpec cyclic(int k, bool idempotent = false);
    static IdentitySpec wnu(int k, bool idempotent = false);
    static IdentitySpec wnu_pair34(bool idempotent = false);

    /// Arities of the function tables the identity talks about.
    std::vector<int> arities() const;
    void validate() const;
    std::string describe() const;
};

/// Exhaustively verifies the identity over [0,d)^arity. `tables` carries one
/// table, except WnuPair34 which expects the 4-ary and the 3-ary one.
bool check_identity(std::span<const OperationTable> tables, const IdentitySpec& id, int d);

/// The indicator CSP: one variable per class of function-table entries under
/// the identity-induced identifications, constrained so that solutions are
/// exactly the operation tables that satisfy the identity and preserve every
/// relation.
struct IndicatorInstance {
    SolverInstance csp;

    struct TableMap {
        int arity = 0;
        int value_domain = 0;          // size of the value domain of this table
        std::vector<int> var_of_entry; // solver variable per table entry
    };
    std::vector<TableMap> tables;   // the searched tables, identity order
    std::vector<int> class_counts;  // identification classes per searched table
};

IndicatorInstance indicator_instance(const FiniteStructure& s, const IdentitySpec& id);

/// Type-structure form: searches a restriction-compatible family of tables
/// (one per tuple length), which is equivalent to preserving every Comp
/// relation; only the width-m table is reported.
IndicatorInstance indicator_instance(const TypeStructure& t, const IdentitySpec& id);

struct PolymorphismSearch {
    enum class Status { Found, None, NodeLimit, TimeLimit };
    Status status = Status::None;
    std::vector<OperationTable> tables; // filled when Found
    SolveStats stats;
};

/// Searches the indicator CSP. A Found result has passed check_identity and a
/// preservation audit.
PolymorphismSearch has_polymorphism(const FiniteStructure& s, const IdentitySpec& id,
                                    const SolverConfig& config = {});
PolymorphismSearch has_polymorphism(const TypeStructure& t, const IdentitySpec& id,
                                    const SolverConfig& config = {});

/// Direct preservation check by enumerating relation matrices.
bool preserves(const OperationTable& f, const FiniteStructure& s);

/// Preservation audit against a type structure: membership in every unary
/// relation plus compatibility with all restriction maps (equivalent to
/// preserving every Comp relation).
bool preserves_type_structure(const OperationTable& f, const TypeStructure& t);

enum class ExpansionMode {
    Auto,   // expand with constants exactly when core+tame is not asserted
    Always,
    Never,
};

struct ClassifyOptions {
    bool assume_core_and_tame = false;
    ExpansionMode expansion = ExpansionMode::Auto;
    SolverConfig solver;
};

struct ClassifyReport {
    enum class Verdict { Tractable, HardCandidate, NotApplicable, ResourceLimit };

    Verdict verdict = Verdict::NotApplicable;
    std::optional<OperationTable> witness; // Siggers table over the type domain
    bool expanded = false;
    bool assumed_core_and_tame = false;
    int m = 0;
    int type_domain_size = 0;
    std::string explanation;
    SolveStats stats;
};

/// Maps a finished Siggers search onto the classification verdict: Found is
/// Tractable unconditionally, None is HardCandidate only under the asserted
/// hypotheses (otherwise NotApplicable), limits stay limits.
ClassifyReport::Verdict classification_verdict(PolymorphismSearch::Status status,
                                               bool assume_core_and_tame);

/// Tractability classification of a reduct of a stabilised unary structure:
/// Siggers search on the type structure (of the constant expansion, depending
/// on the mode). A found polymorphism is audited before Tractable is claimed;
/// a failed search is HardCandidate only under the user-asserted hypotheses.
ClassifyReport classify_reduct(const PartitionSpec& spec, const ReductSpec& reduct,
                               const ClassifyOptions& options = {});

} // namespace typecsp
