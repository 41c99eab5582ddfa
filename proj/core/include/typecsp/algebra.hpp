#pragma once

#include "typecsp/op_table.hpp"

#include <optional>
#include <string>
#include <vector>

namespace typecsp {

/// Finite algebra: a domain size and named fundamental operations.
struct FiniteAlgebra {
    struct Op {
        std::string name;
        OperationTable table;
    };

    int d = 0;
    std::vector<Op> ops;

    int index_of(const std::string& name) const;
    void validate() const;
};

/// All subuniverses (subsets closed under every operation), found by closing
/// each nonempty seed subset. Sorted carriers; includes the full carrier.
/// Guard: d <= 12.
std::vector<std::vector<int>> subalgebras(const FiniteAlgebra& a);

/// A two-element trivial quotient: a subalgebra, a 2-block partition of it
/// that every operation respects while acting as a projection on the blocks.
struct TrivialQuotient {
    std::vector<int> carrier;          // the subalgebra
    std::vector<int> side;             // 0/1 per carrier element
    std::vector<int> projection_index; // per operation, 1-based
};

/// First trivial two-element quotient in HS(a), if any. Guard: d <= 12.
std::optional<TrivialQuotient> has_trivial_two_quotient(const FiniteAlgebra& a);

/// All trivial two-element quotients, in deterministic enumeration order.
std::vector<TrivialQuotient> trivial_two_quotients(const FiniteAlgebra& a);

/// The two defining equations of an l-mashup of g and h over {r,s}:
/// omega agrees with g on (r,..,s@l,..,r) and with h on (s,..,r@l,..,s).
bool is_mashup(const OperationTable& omega, const OperationTable& g, const OperationTable& h,
               int ell, int r, int s);

struct MashupGap {
    int ell = 0, r = 0, s = 0;
};

/// Checks that for every argument position and every pair of distinct
/// elements some operation of `a` (or of its clone closure up to the guarded
/// arity, when `search_closure`) is the corresponding mashup of g and h.
/// Returns the first missing case, or nullopt when the premise holds.
/// Guard: d <= 8.
std::optional<MashupGap> mashup_premise_gap(const FiniteAlgebra& a, const std::string& g,
                                            const std::string& h, bool search_closure = false);

struct MashupVerdict {
    bool premise = false;
    bool conclusion = false;
    bool lemma_respected = false; // !premise || conclusion
    std::optional<MashupGap> gap; // set when the premise fails
};

/// Premise: mashup witnesses exist for every position and element pair.
/// Conclusion: on every trivial two-element quotient the induced actions of g
/// and h coincide. lemma_respected must always hold; a violation is a bug.
MashupVerdict check_mashup_lemma(const FiniteAlgebra& a, const std::string& g,
                                 const std::string& h, bool search_closure = false);

/// Term operations of arity <= max_arity: per-arity fixpoints of composing
/// fundamental operations over projections. Guard: d = 2 with max_arity <= 3,
/// or d = 3 with max_arity <= 2.
std::vector<OperationTable> clone_closure(const FiniteAlgebra& a, int max_arity);

} // namespace typecsp
