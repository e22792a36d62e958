#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lcomp {

// Seeded generator with distribution code written out here, so streams do
// not depend on the standard library's (implementation-defined)
// distribution algorithms.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	// Uniform on [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	// Box-Muller; the second variate is discarded to keep the stream simple.
	double normal() {
		double u1 = uniform();
		while (u1 <= 0.0) u1 = uniform();
		const double u2 = uniform();
		return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
	}

private:
	std::mt19937_64 engine_;
};

// splitmix64 finaliser; derives independent sub-seeds from (seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
	std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
	return z ^ (z >> 31);
}

} // namespace lcomp
