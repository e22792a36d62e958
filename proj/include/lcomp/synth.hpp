#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "lcomp/tensor.hpp"

namespace lcomp {

// Synthetic video clips: translating Gaussian blobs (low-frequency content),
// an optional pixel checkerboard riding on the blobs, optional white noise.
// Values are clamped to [0, 1].
struct SynthSpec {
	std::size_t clips = 64;
	Shape shape{1, 16, 16, 16};
	double motion = 1.0;  // max blob speed, pixels per frame along each axis
	double texture = 0.0; // checkerboard amplitude relative to the blob envelope
	double noise = 0.0;   // white-noise standard deviation
	std::uint64_t seed = 0;
	std::size_t blobs = 3;
	double sigma_min = 2.0;
	double sigma_max = 4.0;
	double amplitude = 1.0; // overall gain applied before clamping
};

void to_json(nlohmann::json& j, const SynthSpec& s);
void from_json(const nlohmann::json& j, SynthSpec& s);

// Clip i depends only on (spec, i).
TensorD synth_clip(const SynthSpec& spec, std::size_t index);
std::vector<TensorD> synth_dataset(const SynthSpec& spec);

} // namespace lcomp
