#pragma once

#include "typecsp/algebra.hpp"
#include "typecsp/polymorphism.hpp"
#include "typecsp/reduction.hpp"
#include "typecsp/type_structure.hpp"
#include "typecsp/unary_base.hpp"

#include <json.hpp>

#include <string>

namespace typecsp {

using Json = nlohmann::json;

// Formula ASTs: node-tagged objects {"type":"eq","lhs":1,"rhs":2}, ...
Json formula_to_json(const Formula& f);
Formula formula_from_json(const Json& j, const std::string& path = "/");

// {"blocks":[{"name":"I1","size":"inf"},{"name":"S","size":1}]}
Json partition_to_json(const PartitionSpec& spec);
PartitionSpec partition_from_json(const Json& j, const std::string& path = "/");

// {"classes":[0,0,1],"blocks":["I1","I1"]} with blocks indexed by class id
Json mtype_to_json(const PartitionSpec& spec, const MType& t);
MType mtype_from_json(const PartitionSpec& spec, const Json& j, const std::string& path = "/");

// {"relations":[{"name":"Eq","arity":2,"def":"z1 = z2"}]}; `def` may also be
// an AST object
Json reduct_to_json(const ReductSpec& reduct);
ReductSpec reduct_from_json(const PartitionSpec& spec, const Json& j,
                            const std::string& path = "/");

// {"m":…,"partition":…,"reduct":…,"domain":[…],"unary":[…],"comp":"lazy"|[…]}
Json type_structure_to_json(const TypeStructure& t, bool materialize_comp = false);
TypeStructure type_structure_from_json(const Json& j, const std::string& path = "/");

// {"vars":[…],"conjuncts":[{"rel":"Eq","args":["x1","x2"]}]}
Json instance_to_json(const CspInstance& psi);
CspInstance instance_from_json(const Json& j, const std::string& path = "/");

// mirrors FiniteCspInstance; comp entries are {"kind":"comp","u":…,"v":…,"iu":…,"iv":…}
Json reduced_to_json(const FiniteCspInstance& phi, const TypeStructure& t);

Json witness_to_json(const Witness& w);
Witness witness_from_json(const Json& j, const std::string& path = "/");

// {"d":2,"relations":{"R":{"arity":2,"tuples":[[0,1]]}}}
Json finite_structure_to_json(const FiniteStructure& s);
FiniteStructure finite_structure_from_json(const Json& j, const std::string& path = "/");

// {"d":2,"ops":{"min":{"arity":2,"table":[0,0,0,1]}}}, row-major tables
Json algebra_to_json(const FiniteAlgebra& a);
FiniteAlgebra algebra_from_json(const Json& j, const std::string& path = "/");

Json operation_to_json(const OperationTable& t);
OperationTable operation_from_json(const Json& j, const std::string& path = "/");

// Solver instances: domains as value lists, binary constraints as pair lists
// or fn-eq parameter tables. Opaque predicate callbacks are not serializable.
Json solver_instance_to_json(const SolverInstance& inst);
SolverInstance solver_instance_from_json(const Json& j, const std::string& path = "/");

} // namespace typecsp
