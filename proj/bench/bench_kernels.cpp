// Serial reference kernels against the OpenMP ones on latent-sized tensors.
// Set OMP_NUM_THREADS to compare thread counts.

#include <random>

#include <benchmark/benchmark.h>

#include "lcomp/analytics.hpp"
#include "lcomp/reference.hpp"
#include "lcomp/wavelet.hpp"

using namespace lcomp;

namespace {

TensorF latent(std::size_t c, std::size_t t, std::size_t hw) {
	TensorF z(Shape{c, t, hw, hw});
	std::mt19937 gen(1);
	std::normal_distribution<float> d;
	for (auto& v : z.data()) v = d(gen);
	return z;
}

void set_bytes(benchmark::State& state, const TensorF& z) {
	state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * z.size() * sizeof(float)));
}

template <Axis A>
void axis_reference(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(reference::haar_analysis_axis(z, A));
	set_bytes(state, z);
}

template <Axis A>
void axis_omp(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(haar_analysis_axis(z, A));
	set_bytes(state, z);
}

void wt3d_reference(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(reference::wt3d_sequential(z));
	set_bytes(state, z);
}

void wt3d_direct(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(reference::wt3d_direct(z));
	set_bytes(state, z);
}

void wt3d_omp(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(wt3d(z));
	set_bytes(state, z);
}

void multi_reference(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(reference::multi_iwt(reference::multi_wt(z)));
	set_bytes(state, z);
}

void multi_omp(benchmark::State& state) {
	const auto z = latent(16, 16, state.range(0));
	for (auto _ : state) benchmark::DoNotOptimize(multi_iwt(multi_wt(z)));
	set_bytes(state, z);
}

void energy_report(benchmark::State& state) {
	const auto m = multi_wt(latent(16, 16, state.range(0)));
	for (auto _ : state) benchmark::DoNotOptimize(subband_energy(m));
}

} // namespace

BENCHMARK(axis_reference<Axis::time>)->Arg(32)->Arg(64);
BENCHMARK(axis_omp<Axis::time>)->Arg(32)->Arg(64);
BENCHMARK(axis_reference<Axis::width>)->Arg(32)->Arg(64);
BENCHMARK(axis_omp<Axis::width>)->Arg(32)->Arg(64);
BENCHMARK(wt3d_reference)->Arg(32)->Arg(64);
BENCHMARK(wt3d_direct)->Arg(32)->Arg(64);
BENCHMARK(wt3d_omp)->Arg(32)->Arg(64);
BENCHMARK(multi_reference)->Arg(32)->Arg(64);
BENCHMARK(multi_omp)->Arg(32)->Arg(64);
BENCHMARK(energy_report)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
