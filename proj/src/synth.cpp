#include "lcomp/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lcomp/rng.hpp"

namespace lcomp {

void to_json(nlohmann::json& j, const SynthSpec& s) {
	j = nlohmann::json{{"clips", s.clips},
	                   {"shape", {s.shape.c, s.shape.t, s.shape.h, s.shape.w}},
	                   {"motion", s.motion},
	                   {"texture", s.texture},
	                   {"noise", s.noise},
	                   {"seed", s.seed},
	                   {"blobs", s.blobs},
	                   {"sigma_min", s.sigma_min},
	                   {"sigma_max", s.sigma_max},
	                   {"amplitude", s.amplitude}};
}

void from_json(const nlohmann::json& j, SynthSpec& s) {
	SynthSpec d;
	s.clips = j.value("clips", d.clips);
	if (j.contains("shape")) {
		const auto v = j.at("shape").get<std::vector<std::size_t>>();
		if (v.size() != 4) throw ShapeError("synth spec: shape must have four entries (C,T,H,W)");
		s.shape = Shape{v[0], v[1], v[2], v[3]};
	} else {
		s.shape = d.shape;
	}
	s.motion = j.value("motion", d.motion);
	s.texture = j.value("texture", d.texture);
	s.noise = j.value("noise", d.noise);
	s.seed = j.value("seed", d.seed);
	s.blobs = j.value("blobs", d.blobs);
	s.sigma_min = j.value("sigma_min", d.sigma_min);
	s.sigma_max = j.value("sigma_max", d.sigma_max);
	s.amplitude = j.value("amplitude", d.amplitude);
}

namespace {

// Shortest signed offset on a ring of length n.
double wrap(double d, double n) {
	d = std::fmod(d, n);
	if (d > n / 2) d -= n;
	if (d < -n / 2) d += n;
	return d;
}

void check(const SynthSpec& s) {
	if (s.clips == 0) throw ShapeError("synth spec: clip count must be >= 1");
	if (s.shape.volume() == 0) throw ShapeError("synth spec: shape components must be >= 1");
	if (!(s.sigma_min > 0 && s.sigma_max >= s.sigma_min)) throw ShapeError("synth spec: need 0 < sigma_min <= sigma_max");
}

} // namespace

TensorD synth_clip(const SynthSpec& spec, std::size_t index) {
	check(spec);
	const Shape& s = spec.shape;
	Rng rng(mix_seed(spec.seed, index));

	struct Blob {
		double y, x, vy, vx, sigma, amp;
		std::vector<double> colour;
	};
	std::vector<Blob> blobs(spec.blobs);
	for (auto& b : blobs) {
		b.y = rng.uniform(0.0, static_cast<double>(s.h));
		b.x = rng.uniform(0.0, static_cast<double>(s.w));
		b.vy = spec.motion * rng.uniform(-1.0, 1.0);
		b.vx = spec.motion * rng.uniform(-1.0, 1.0);
		b.sigma = rng.uniform(spec.sigma_min, spec.sigma_max);
		b.amp = rng.uniform(0.4, 0.8);
		b.colour.resize(s.c);
		for (auto& c : b.colour) c = s.c == 1 ? 1.0 : rng.uniform(0.5, 1.0);
	}
	const std::size_t phase = static_cast<std::size_t>(rng.uniform() * 2.0);

	TensorD clip(s);
	for (std::size_t c = 0; c < s.c; ++c) {
		for (std::size_t t = 0; t < s.t; ++t) {
			for (std::size_t h = 0; h < s.h; ++h) {
				for (std::size_t w = 0; w < s.w; ++w) {
					double env = 0.0;
					for (const auto& b : blobs) {
						const double dy = wrap(static_cast<double>(h) - b.y - b.vy * static_cast<double>(t), static_cast<double>(s.h));
						const double dx = wrap(static_cast<double>(w) - b.x - b.vx * static_cast<double>(t), static_cast<double>(s.w));
						env += b.amp * b.colour[c] * std::exp(-(dy * dy + dx * dx) / (2.0 * b.sigma * b.sigma));
					}
					const double checker = ((h + w + phase) & 1u) ? 1.0 : 0.0;
					clip(c, t, h, w) = env + spec.texture * env * checker;
				}
			}
		}
	}
	for (auto& v : clip.data()) {
		const double n = spec.noise > 0 ? spec.noise * rng.normal() : 0.0;
		v = std::clamp(spec.amplitude * (v + n), 0.0, 1.0);
	}
	return clip;
}

std::vector<TensorD> synth_dataset(const SynthSpec& spec) {
	check(spec);
	std::vector<TensorD> out;
	out.reserve(spec.clips);
	for (std::size_t i = 0; i < spec.clips; ++i) out.push_back(synth_clip(spec, i));
	return out;
}

} // namespace lcomp
