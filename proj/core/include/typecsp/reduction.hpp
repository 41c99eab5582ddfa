#pragma once

#include "typecsp/finite_csp.hpp"
#include "typecsp/type_structure.hpp"

#include <span>
#include <string>
#include <vector>

namespace typecsp {

/// Instance of the infinite-domain CSP: named variables (declaration order
/// doubles as the linear order behind "increasing") and atomic conjuncts.
struct CspInstance {
    struct Conjunct {
        std::string rel;
        std::vector<std::string> args;
    };

    std::vector<std::string> vars;
    std::vector<Conjunct> conjuncts;

    int index_of(const std::string& var) const;

    /// Unknown variables/relations and arity mismatches throw ValidationError.
    void validate(const ReductSpec& reduct) const;
};

/// Which covering variables receive the unary constraint of a conjunct:
/// every v with Im(j) within Im(v), or one canonical choice.
enum class AttachPolicy { AllCovering, SingleCanonical };

/// Finite-domain image of an instance: variables are the increasing maps
/// [m] -> V encoded as sorted index tuples, constrained by unary relations of
/// the type structure and pairwise compatibility.
struct FiniteCspInstance {
    struct UnaryC {
        int var = 0;
        int relation = 0; // into the reduct of the originating TypeStructure
        IndexMap index_map;
    };
    struct CompC {
        int u = 0, v = 0;
        IndexMap iu, iv;
    };

    int m = 0;
    int domain_size = 0;
    std::vector<std::string> var_names; // original variables then padding
    int original_var_count = 0;
    std::vector<std::vector<int>> vars; // sorted 0-based index tuples, lex order
    std::vector<UnaryC> unary;
    std::vector<CompC> comp;

    int var_index(std::span<const int> subset) const;
};

/// The instance translation: pads V up to m variables, creates one variable
/// per increasing map, attaches the unary constraint <R, v^-1 j> per conjunct
/// and covering v, and one Comp constraint per variable pair with intersecting
/// images.
FiniteCspInstance reduce(const CspInstance& psi, const TypeStructure& t,
                         AttachPolicy policy = AttachPolicy::AllCovering);

/// Solver form of a reduced instance. Comp constraints become intensional
/// binary constraints whose parameters are the two restriction-id tables.
SolverInstance to_solver_instance(const FiniteCspInstance& phi, const TypeStructure& t);

struct ReductionMetrics {
    std::size_t variables = 0;
    std::size_t unary_constraints = 0;
    std::size_t comp_constraints = 0;
};

ReductionMetrics metrics(const FiniteCspInstance& phi);

/// Quotient of the variables under the equality pattern of a solution, with a
/// block per class. Padding variables are stripped.
struct Witness {
    struct Class {
        std::vector<std::string> vars;
        std::string block;
    };
    std::vector<Class> classes;
};

/// Reads the witness off a satisfying assignment of the reduced instance.
/// Inconsistent class or block reads across covering variables indicate a
/// solver/construction bug and throw.
Witness lift_solution(const CspInstance& psi, const FiniteCspInstance& phi,
                      const TypeStructure& t, std::span<const int> assignment);

/// Checks the witness directly against the instance: singleton-block capacity
/// plus every conjunct under the class/block assignment.
bool verify_witness(const CspInstance& psi, const Witness& w, const PartitionSpec& spec,
                    const ReductSpec& reduct);

} // namespace typecsp
