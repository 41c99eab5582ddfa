#pragma once

#include <span>
#include <vector>

namespace typecsp {

/// Total finite operation as a row-major value table: the entry for arguments
/// (x1,..,xk) sits at index ((x1*d + x2)*d + ...) + xk.
struct OperationTable {
    int domain_size = 0;
    int arity = 0;
    std::vector<int> values;

    static OperationTable projection(int d, int arity, int coord); // coord 1-based

    int apply(std::span<const int> args) const;
    std::size_t index_of(std::span<const int> args) const;

    bool idempotent() const;

    /// Throws ValidationError unless the table is total with values in [0,d).
    void validate() const;

    auto operator<=>(const OperationTable&) const = default;
};

} // namespace typecsp
