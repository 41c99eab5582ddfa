#pragma once

#include "typecsp/reduction.hpp"
#include "typecsp/serialize.hpp"
#include "typecsp/type_structure.hpp"
#include "typecsp/unary_base.hpp"

#include <string>
#include <vector>

namespace typecsp {

/// A whole problem description: partition, reduct, optional instances, and
/// the user-asserted hypotheses the classifier may rely on.
struct ProjectFile {
    PartitionSpec partition;
    ReductSpec reduct;
    std::vector<CspInstance> instances;
    bool assert_model_complete_core = false;
    bool assert_tame_endomorphisms = false;

    /// Set when loading had to stabilise the partition (reduct formulas were
    /// rewritten through the block splits).
    bool was_stabilised = false;
};

/// Parses and validates a project document. Non-stabilised partitions are
/// stabilised on the spot, with formulas rewritten accordingly.
ProjectFile load_project(const Json& j);
ProjectFile load_project_file(const std::string& filesystem_path);

} // namespace typecsp
