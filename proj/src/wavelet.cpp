#include "lcomp/wavelet.hpp"

#include <algorithm>
#include <cstddef>

namespace lcomp {

std::string_view axis_name(Axis a) {
	switch (a) {
	case Axis::time: return "time";
	case Axis::height: return "height";
	case Axis::width: return "width";
	}
	return "?";
}

namespace {
constexpr std::array<std::string_view, kNumSubbands> kLabelNames{"LLL", "LLH", "LHL", "LHH", "HLL", "HLH", "HHL", "HHH"};

struct AxisLayout {
	std::size_t outer;
	std::size_t n;
	std::size_t inner;
};

AxisLayout layout_of(const Shape& s, Axis a) {
	switch (a) {
	case Axis::time: return {s.c, s.t, s.h * s.w};
	case Axis::height: return {s.c * s.t, s.h, s.w};
	case Axis::width: return {s.c * s.t * s.h, s.w, 1};
	}
	return {};
}

std::size_t extent(const Shape& s, Axis a) {
	return a == Axis::time ? s.t : a == Axis::height ? s.h : s.w;
}

Shape resized(Shape s, Axis a, std::size_t n) {
	(a == Axis::time ? s.t : a == Axis::height ? s.h : s.w) = n;
	return s;
}

void require_even(const Shape& s, Axis a, const char* op) {
	const std::size_t n = extent(s, a);
	if (n < 2 || n % 2 != 0) {
		throw ShapeError(std::string(op) + ": extent " + std::to_string(n) + " along axis '" +
		                 std::string(axis_name(a)) + "' must be even and >= 2");
	}
}

template <typename T>
void require_band_shapes(const std::array<Tensor<T>, kNumSubbands>& bands, const Shape& expected, const char* what) {
	for (std::size_t i = 0; i < kNumSubbands; ++i) {
		if (bands[i].empty()) throw ShapeError(std::string(what) + ": missing subband " + std::string(kLabelNames[i]));
		if (bands[i].shape() != expected) {
			throw ShapeError(std::string(what) + ": subband " + std::string(kLabelNames[i]) + " has shape " +
			                 bands[i].shape().str() + ", expected " + expected.str());
		}
	}
}

} // namespace

std::string_view label_name(std::size_t index) { return index < kNumSubbands ? kLabelNames[index] : "?"; }

std::optional<std::size_t> parse_label(std::string_view name) {
	auto it = std::find(kLabelNames.begin(), kLabelNames.end(), name);
	if (it == kLabelNames.end()) return std::nullopt;
	return static_cast<std::size_t>(it - kLabelNames.begin());
}

void validate_group_order(const GroupOrder& g) {
	std::array<bool, kNumSubbands> seen{};
	for (std::size_t i = 0; i < g.size(); ++i) {
		const std::size_t label = g[i];
		const bool temporal_high = i >= 4;
		if (label >= kNumSubbands || seen[label] || (label >= 4) != temporal_high) {
			throw ShapeError("group_order: entry " + std::to_string(i) + " = " + std::to_string(label) +
			                 " is not a valid permutation of its temporal group");
		}
		seen[label] = true;
	}
}

void require_wt3d_shape(const Shape& s) {
	if (s.c == 0) throw ShapeError("wt3d: channel count must be >= 1");
	for (Axis a : {Axis::time, Axis::height, Axis::width}) require_even(s, a, "wt3d");
}

void require_multi_wt_shape(const Shape& s) {
	if (s.t == 0 || s.t % 8 != 0) {
		throw ShapeError("multi_wt: requires T_z ≡ 0 mod 8 (got T=" + std::to_string(s.t) + ")");
	}
	require_wt3d_shape(s);
}

template <typename T>
void validate(const SubbandSet<T>& s) {
	require_wt3d_shape(s.source_shape);
	require_band_shapes(s.bands, s.band_shape(), "SubbandSet");
}

template <typename T>
void validate(const MultiWTSet<T>& m) {
	require_multi_wt_shape(m.source_shape);
	validate_group_order(m.group_order);
	require_band_shapes(m.bands, m.band_shape(), "MultiWTSet");
}

template <typename T>
HaarPair<T> haar_analysis_axis(const Tensor<T>& t, Axis axis) {
	require_even(t.shape(), axis, "haar_analysis_axis");
	const AxisLayout L = layout_of(t.shape(), axis);
	const std::size_t half = L.n / 2;
	const Shape out_shape = resized(t.shape(), axis, half);
	HaarPair<T> out{Tensor<T>(out_shape), Tensor<T>(out_shape)};

	const T k = static_cast<T>(kInvSqrt2);
	const T* src = t.data().data();
	T* lo = out.low.data().data();
	T* hi = out.high.data().data();
	const auto outer = static_cast<std::ptrdiff_t>(L.outer);
	const auto pairs = static_cast<std::ptrdiff_t>(half);
	const std::size_t inner = L.inner;

	if (inner == 1) { // width axis: pairs are adjacent, so treat the tensor as one flat row
		const auto total = outer * pairs;
#pragma omp parallel for schedule(static)
		for (std::ptrdiff_t i = 0; i < total; ++i) {
			const T a = src[2 * i], b = src[2 * i + 1];
			lo[i] = (a + b) * k;
			hi[i] = (a - b) * k;
		}
		return out;
	}

#pragma omp parallel for collapse(2) schedule(static)
	for (std::ptrdiff_t o = 0; o < outer; ++o) {
		for (std::ptrdiff_t i = 0; i < pairs; ++i) {
			const T* a = src + (static_cast<std::size_t>(o) * L.n + 2 * static_cast<std::size_t>(i)) * inner;
			const T* b = a + inner;
			const std::size_t dst = (static_cast<std::size_t>(o) * half + static_cast<std::size_t>(i)) * inner;
			for (std::size_t j = 0; j < inner; ++j) {
				lo[dst + j] = (a[j] + b[j]) * k;
				hi[dst + j] = (a[j] - b[j]) * k;
			}
		}
	}
	return out;
}

template <typename T>
Tensor<T> haar_synthesis_axis(const Tensor<T>& low, const Tensor<T>& high, Axis axis) {
	if (low.shape() != high.shape()) {
		throw ShapeError("haar_synthesis_axis: low " + low.shape().str() + " and high " + high.shape().str() +
		                 " differ");
	}
	if (low.empty()) throw ShapeError("haar_synthesis_axis: empty input");
	const AxisLayout L = layout_of(low.shape(), axis);
	Tensor<T> out(resized(low.shape(), axis, 2 * L.n));

	const T k = static_cast<T>(kInvSqrt2);
	const T* lo = low.data().data();
	const T* hi = high.data().data();
	T* dst = out.data().data();
	const auto outer = static_cast<std::ptrdiff_t>(L.outer);
	const auto pairs = static_cast<std::ptrdiff_t>(L.n);
	const std::size_t inner = L.inner;

	if (inner == 1) {
		const auto total = outer * pairs;
#pragma omp parallel for schedule(static)
		for (std::ptrdiff_t i = 0; i < total; ++i) {
			dst[2 * i] = (lo[i] + hi[i]) * k;
			dst[2 * i + 1] = (lo[i] - hi[i]) * k;
		}
		return out;
	}

#pragma omp parallel for collapse(2) schedule(static)
	for (std::ptrdiff_t o = 0; o < outer; ++o) {
		for (std::ptrdiff_t i = 0; i < pairs; ++i) {
			const std::size_t src = (static_cast<std::size_t>(o) * L.n + static_cast<std::size_t>(i)) * inner;
			T* a = dst + (static_cast<std::size_t>(o) * 2 * L.n + 2 * static_cast<std::size_t>(i)) * inner;
			T* b = a + inner;
			for (std::size_t j = 0; j < inner; ++j) {
				a[j] = (lo[src + j] + hi[src + j]) * k;
				b[j] = (lo[src + j] - hi[src + j]) * k;
			}
		}
	}
	return out;
}

// Fused single-level kernel. Each 2x2x2 input block is butterflied along
// time, then height, then width, in exactly the order and arithmetic of the
// axis-sequential reference, so f64 results agree bit for bit.
template <typename T>
SubbandSet<T> wt3d(const Tensor<T>& t) {
	require_wt3d_shape(t.shape());
	const Shape& s = t.shape();
	SubbandSet<T> out;
	out.source_shape = s;
	const Shape bs = out.band_shape();
	for (auto& b : out.bands) b = Tensor<T>(bs);

	std::array<T*, kNumSubbands> dst{};
	for (std::size_t i = 0; i < kNumSubbands; ++i) dst[i] = out.bands[i].data().data();
	const T* src = t.data().data();
	const T k = static_cast<T>(kInvSqrt2);
	const auto C = static_cast<std::ptrdiff_t>(bs.c);
	const auto T2 = static_cast<std::ptrdiff_t>(bs.t);

#pragma omp parallel for collapse(2) schedule(static)
	for (std::ptrdiff_t c = 0; c < C; ++c) {
		for (std::ptrdiff_t tt = 0; tt < T2; ++tt) {
			for (std::size_t h = 0; h < bs.h; ++h) {
				for (std::size_t w = 0; w < bs.w; ++w) {
					// x index = dt*4 + dh*2 + dw
					T x[8];
					for (std::size_t r = 0; r < 8; ++r) {
						const std::size_t ti = 2 * static_cast<std::size_t>(tt) + (r >> 2);
						const std::size_t hi = 2 * h + ((r >> 1) & 1);
						const std::size_t wi = 2 * w + (r & 1);
						x[r] = src[((static_cast<std::size_t>(c) * s.t + ti) * s.h + hi) * s.w + wi];
					}
					T u[8];
					for (std::size_t r = 0; r < 4; ++r) {
						u[r] = (x[r] + x[4 + r]) * k;
						u[4 + r] = (x[r] - x[4 + r]) * k;
					}
					T v[8];
					for (std::size_t a = 0; a < 2; ++a) {
						for (std::size_t dw = 0; dw < 2; ++dw) {
							v[a * 4 + dw] = (u[a * 4 + dw] + u[a * 4 + 2 + dw]) * k;
							v[a * 4 + 2 + dw] = (u[a * 4 + dw] - u[a * 4 + 2 + dw]) * k;
						}
					}
					const std::size_t o = ((static_cast<std::size_t>(c) * bs.t + static_cast<std::size_t>(tt)) * bs.h + h) * bs.w + w;
					for (std::size_t ab = 0; ab < 8; ab += 2) {
						dst[ab][o] = (v[ab] + v[ab + 1]) * k;
						dst[ab + 1][o] = (v[ab] - v[ab + 1]) * k;
					}
				}
			}
		}
	}
	return out;
}

template <typename T>
Tensor<T> iwt3d(const SubbandSet<T>& sb) {
	validate(sb);
	const Shape& s = sb.source_shape;
	const Shape bs = sb.band_shape();
	Tensor<T> out(s);

	std::array<const T*, kNumSubbands> src{};
	for (std::size_t i = 0; i < kNumSubbands; ++i) src[i] = sb.bands[i].data().data();
	T* dst = out.data().data();
	const T k = static_cast<T>(kInvSqrt2);
	const auto C = static_cast<std::ptrdiff_t>(bs.c);
	const auto T2 = static_cast<std::ptrdiff_t>(bs.t);

#pragma omp parallel for collapse(2) schedule(static)
	for (std::ptrdiff_t c = 0; c < C; ++c) {
		for (std::ptrdiff_t tt = 0; tt < T2; ++tt) {
			for (std::size_t h = 0; h < bs.h; ++h) {
				for (std::size_t w = 0; w < bs.w; ++w) {
					const std::size_t o = ((static_cast<std::size_t>(c) * bs.t + static_cast<std::size_t>(tt)) * bs.h + h) * bs.w + w;
					T v[8];
					for (std::size_t ab = 0; ab < 8; ab += 2) {
						const T lo = src[ab][o];
						const T hi = src[ab + 1][o];
						v[ab] = (lo + hi) * k;
						v[ab + 1] = (lo - hi) * k;
					}
					T u[8];
					for (std::size_t a = 0; a < 2; ++a) {
						for (std::size_t dw = 0; dw < 2; ++dw) {
							const T lo = v[a * 4 + dw];
							const T hi = v[a * 4 + 2 + dw];
							u[a * 4 + dw] = (lo + hi) * k;
							u[a * 4 + 2 + dw] = (lo - hi) * k;
						}
					}
					for (std::size_t r = 0; r < 4; ++r) {
						const T lo = u[r];
						const T hi = u[4 + r];
						const std::size_t hi_idx = 2 * h + (r >> 1);
						const std::size_t wi = 2 * w + (r & 1);
						const std::size_t t0 = 2 * static_cast<std::size_t>(tt);
						dst[((static_cast<std::size_t>(c) * s.t + t0) * s.h + hi_idx) * s.w + wi] = (lo + hi) * k;
						dst[((static_cast<std::size_t>(c) * s.t + t0 + 1) * s.h + hi_idx) * s.w + wi] = (lo - hi) * k;
					}
				}
			}
		}
	}
	return out;
}

template <typename T>
MultiWTSet<T> multi_wt(const Tensor<T>& z, const GroupOrder& group_order) {
	require_multi_wt_shape(z.shape());
	validate_group_order(group_order);

	SubbandSet<T> stage1 = wt3d(z);
	MultiWTSet<T> out;
	out.source_shape = z.shape();
	out.group_order = group_order;

	for (std::size_t group = 0; group < 2; ++group) {
		std::array<Tensor<T>, 4> parts;
		for (std::size_t j = 0; j < 4; ++j) parts[j] = std::move(stage1.bands[group_order[group * 4 + j]]);
		const Tensor<T> grouped = concat_channels(std::span<const Tensor<T>>(parts));
		HaarPair<T> stage2 = haar_analysis_axis(grouped, Axis::time);
		// stage-2 label (group, s2) -> stage-3 labels (group, s2, s3)
		const std::array<const Tensor<T>*, 2> halves{&stage2.low, &stage2.high};
		for (std::size_t s2 = 0; s2 < 2; ++s2) {
			HaarPair<T> stage3 = haar_analysis_axis(*halves[s2], Axis::time);
			out.bands[group * 4 + s2 * 2] = std::move(stage3.low);
			out.bands[group * 4 + s2 * 2 + 1] = std::move(stage3.high);
		}
	}
	return out;
}

template <typename T>
Tensor<T> multi_iwt(const MultiWTSet<T>& m) {
	validate(m);
	SubbandSet<T> stage1;
	stage1.source_shape = m.source_shape;
	const std::array<std::size_t, 4> sizes{m.source_shape.c, m.source_shape.c, m.source_shape.c, m.source_shape.c};

	for (std::size_t group = 0; group < 2; ++group) {
		const Tensor<T> low = haar_synthesis_axis(m.bands[group * 4], m.bands[group * 4 + 1], Axis::time);
		const Tensor<T> high = haar_synthesis_axis(m.bands[group * 4 + 2], m.bands[group * 4 + 3], Axis::time);
		const Tensor<T> grouped = haar_synthesis_axis(low, high, Axis::time);
		auto parts = split_channels(grouped, std::span<const std::size_t>(sizes));
		for (std::size_t j = 0; j < 4; ++j) stage1.bands[m.group_order[group * 4 + j]] = std::move(parts[j]);
	}
	return iwt3d(stage1);
}

#define LCOMP_INSTANTIATE(T)                                                                   \
	template void validate<T>(const SubbandSet<T>&);                                           \
	template void validate<T>(const MultiWTSet<T>&);                                           \
	template HaarPair<T> haar_analysis_axis<T>(const Tensor<T>&, Axis);                        \
	template Tensor<T> haar_synthesis_axis<T>(const Tensor<T>&, const Tensor<T>&, Axis);       \
	template SubbandSet<T> wt3d<T>(const Tensor<T>&);                                          \
	template Tensor<T> iwt3d<T>(const SubbandSet<T>&);                                         \
	template MultiWTSet<T> multi_wt<T>(const Tensor<T>&, const GroupOrder&);                   \
	template Tensor<T> multi_iwt<T>(const MultiWTSet<T>&);

LCOMP_INSTANTIATE(float)
LCOMP_INSTANTIATE(double)
#undef LCOMP_INSTANTIATE

} // namespace lcomp
