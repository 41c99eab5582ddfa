#include "typecsp/polymorphism.hpp"
#include "typecsp/reduction.hpp"

#include <benchmark/benchmark.h>

using namespace typecsp;

namespace {

PartitionSpec two_blocks() {
    return {{{"I1", std::nullopt}, {"I2", std::nullopt}}};
}

ReductSpec equality_reduct() {
    return {{{"Eq", 2, parse_formula("z1 = z2")},
             {"Neq", 2, parse_formula("!(z1 = z2)")}}};
}

// x1 = x2 = ... = xn with one disequality closing the chain (UNSAT)
CspInstance equality_chain(int n) {
    CspInstance psi;
    for (int i = 1; i <= n; ++i) psi.vars.push_back("x" + std::to_string(i));
    for (int i = 1; i < n; ++i)
        psi.conjuncts.push_back({"Eq", {psi.vars[i - 1], psi.vars[i]}});
    psi.conjuncts.push_back({"Neq", {psi.vars[0], psi.vars[n - 1]}});
    return psi;
}

} // namespace

static void BM_EnumerateTypes(benchmark::State& state) {
    PartitionSpec spec = two_blocks();
    int m = (int)state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_types(spec, m));
}
BENCHMARK(BM_EnumerateTypes)->DenseRange(2, 6);

static void BM_BuildTypeStructure(benchmark::State& state) {
    PartitionSpec spec{{{"N", std::nullopt}}};
    ReductSpec reduct = equality_reduct();
    int m = (int)state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(TypeStructure::build(spec, reduct, m));
}
BENCHMARK(BM_BuildTypeStructure)->DenseRange(3, 6);

static void BM_ReduceChain(benchmark::State& state) {
    PartitionSpec spec{{{"N", std::nullopt}}};
    TypeStructure t = TypeStructure::build(spec, equality_reduct(), 3);
    CspInstance psi = equality_chain((int)state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reduce(psi, t));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ReduceChain)->RangeMultiplier(2)->Range(4, 32)->Complexity();

static void BM_SolveChain(benchmark::State& state) {
    PartitionSpec spec{{{"N", std::nullopt}}};
    TypeStructure t = TypeStructure::build(spec, equality_reduct(), 3);
    CspInstance psi = equality_chain((int)state.range(0));
    FiniteCspInstance phi = reduce(psi, t);
    for (auto _ : state) {
        SolveResult res = solve(to_solver_instance(phi, t));
        benchmark::DoNotOptimize(res);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveChain)->RangeMultiplier(2)->Range(4, 16)->Complexity();

static void BM_SiggersSearch(benchmark::State& state) {
    PartitionSpec spec{{{"N", std::nullopt}}};
    TypeStructure t = TypeStructure::build(spec, equality_reduct(), 3);
    for (auto _ : state) {
        PolymorphismSearch got = has_polymorphism(t, IdentitySpec::siggers());
        benchmark::DoNotOptimize(got);
    }
}
BENCHMARK(BM_SiggersSearch);

static void BM_CyclicIndicator(benchmark::State& state) {
    PartitionSpec spec{{{"N", std::nullopt}}};
    TypeStructure t = TypeStructure::build(spec, equality_reduct(), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(indicator_instance(t, IdentitySpec::cyclic(3)));
}
BENCHMARK(BM_CyclicIndicator);

BENCHMARK_MAIN();
