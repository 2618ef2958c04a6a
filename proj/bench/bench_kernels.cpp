// Serial reference kernels against their OpenMP counterparts.
//   ./bench_kernels --benchmark_filter=Matvec
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlai/interferometer.hpp"
#include "nlai/kernels.hpp"
#include "nlai/rotation.hpp"

namespace {

using nlai::cplx;

std::vector<cplx> test_vector(std::size_t dim) {
    std::vector<cplx> v(dim);
    for (std::size_t k = 0; k < dim; ++k)
        v[k] = {std::sin(0.37 * k), std::cos(1.3 * k)};
    return v;
}

template <bool Parallel> void BM_Matvec(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const nlai::SpinRotator rot(n, nlai::KernelBackend::serial);
    const auto x = test_vector(rot.dim());
    std::vector<cplx> y(rot.dim());
    for (auto _ : state) {
        if constexpr (Parallel)
            nlai::kernels::parallel::matvec(rot.basis_data(), rot.dim(), x, y);
        else
            nlai::kernels::serial::matvec(rot.basis_data(), rot.dim(), x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(rot.dim() * rot.dim()));
}

template <bool Parallel> void BM_MatvecTransposed(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const nlai::SpinRotator rot(n, nlai::KernelBackend::serial);
    const auto x = test_vector(rot.dim());
    std::vector<cplx> y(rot.dim());
    for (auto _ : state) {
        if constexpr (Parallel)
            nlai::kernels::parallel::matvec_transposed(rot.basis_data(), rot.dim(), x, y);
        else
            nlai::kernels::serial::matvec_transposed(rot.basis_data(), rot.dim(), x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(rot.dim() * rot.dim()));
}

template <bool Parallel> void BM_Husimi(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto psi = nlai::prepared_state(n, 1.2 * std::pow(n, -2.0 / 3.0));
    std::vector<double> polar(64), azimuth(128), out(64 * 128);
    for (std::size_t i = 0; i < polar.size(); ++i)
        polar[i] = std::numbers::pi * i / 63.0;
    for (std::size_t j = 0; j < azimuth.size(); ++j)
        azimuth[j] = 2 * std::numbers::pi * j / 128.0;
    for (auto _ : state) {
        if constexpr (Parallel)
            nlai::kernels::parallel::husimi(n, psi.amplitudes(), polar, azimuth, out);
        else
            nlai::kernels::serial::husimi(n, psi.amplitudes(), polar, azimuth, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_RotatorBuild(benchmark::State &state) {
    for (auto _ : state) {
        nlai::SpinRotator rot(static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(rot.basis_data().data());
    }
}

} // namespace

BENCHMARK(BM_Matvec<false>)->Arg(200)->Arg(1000)->Arg(2000)->Name("Matvec/serial");
BENCHMARK(BM_Matvec<true>)->Arg(200)->Arg(1000)->Arg(2000)->Name("Matvec/parallel");
BENCHMARK(BM_MatvecTransposed<false>)->Arg(200)->Arg(1000)->Arg(2000)->Name("MatvecT/serial");
BENCHMARK(BM_MatvecTransposed<true>)->Arg(200)->Arg(1000)->Arg(2000)->Name("MatvecT/parallel");
BENCHMARK(BM_Husimi<false>)->Arg(100)->Arg(1000)->Name("Husimi/serial");
BENCHMARK(BM_Husimi<true>)->Arg(100)->Arg(1000)->Name("Husimi/parallel");
BENCHMARK(BM_RotatorBuild)->Arg(1000);

BENCHMARK_MAIN();
