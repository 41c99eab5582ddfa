#include "typecsp/op_table.hpp"

#include "typecsp/errors.hpp"

namespace typecsp {

OperationTable OperationTable::projection(int d, int arity, int coord) {
    if (coord < 1 || coord > arity) throw ValidationError("projection coordinate outside [1,arity]");
    OperationTable t{d, arity, {}};
    std::size_t size = 1;
    for (int i = 0; i < arity; ++i) size *= (std::size_t)d;
    t.values.resize(size);
    std::vector<int> args(arity, 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
        t.values[idx] = args[coord - 1];
        for (int i = arity - 1; i >= 0; --i) {
            if (++args[i] < d) break;
            args[i] = 0;
        }
    }
    return t;
}

std::size_t OperationTable::index_of(std::span<const int> args) const {
    std::size_t idx = 0;
    for (int a : args) idx = idx * (std::size_t)domain_size + (std::size_t)a;
    return idx;
}

int OperationTable::apply(std::span<const int> args) const {
    if ((int)args.size() != arity) throw ValidationError("argument count does not match arity");
    return values[index_of(args)];
}

bool OperationTable::idempotent() const {
    std::vector<int> args(arity);
    for (int x = 0; x < domain_size; ++x) {
        std::fill(args.begin(), args.end(), x);
        if (values[index_of(args)] != x) return false;
    }
    return true;
}

void OperationTable::validate() const {
    if (domain_size < 1) throw ValidationError("operation needs a nonempty domain");
    if (arity < 1) throw ValidationError("operation arity must be >= 1");
    std::size_t size = 1;
    for (int i = 0; i < arity; ++i) size *= (std::size_t)domain_size;
    if (values.size() != size)
        throw ValidationError("operation table has " + std::to_string(values.size()) +
                              " entries, expected " + std::to_string(size));
    for (int v : values)
        if (v < 0 || v >= domain_size)
            throw ValidationError("operation table value outside the domain");
}

} // namespace typecsp
