#include "lcomp/reference.hpp"

namespace lcomp::reference {

namespace {

std::size_t& extent_ref(Shape& s, Axis a) { return a == Axis::time ? s.t : a == Axis::height ? s.h : s.w; }

// Sample at position `i` along `axis`, all other coordinates from (c,t,h,w).
template <typename T>
T& along(Tensor<T>& x, Axis axis, std::size_t c, std::size_t t, std::size_t h, std::size_t w, std::size_t i) {
	switch (axis) {
	case Axis::time: return x(c, i, h, w);
	case Axis::height: return x(c, t, i, w);
	default: return x(c, t, h, i);
	}
}

template <typename T>
T along(const Tensor<T>& x, Axis axis, std::size_t c, std::size_t t, std::size_t h, std::size_t w, std::size_t i) {
	switch (axis) {
	case Axis::time: return x(c, i, h, w);
	case Axis::height: return x(c, t, i, w);
	default: return x(c, t, h, i);
	}
}

// Visits every (c,t,h,w) of `s` whose coordinate along `axis` is zero.
template <typename F>
void for_each_line(const Shape& s, Axis axis, F&& f) {
	Shape lines = s;
	extent_ref(lines, axis) = 1;
	for (std::size_t c = 0; c < lines.c; ++c)
		for (std::size_t t = 0; t < lines.t; ++t)
			for (std::size_t h = 0; h < lines.h; ++h)
				for (std::size_t w = 0; w < lines.w; ++w) f(c, t, h, w);
}

} // namespace

template <typename T>
HaarPair<T> haar_analysis_axis(const Tensor<T>& x, Axis axis) {
	Shape half = x.shape();
	const std::size_t n = extent_ref(half, axis);
	if (n < 2 || n % 2 != 0) throw ShapeError("reference::haar_analysis_axis: odd extent along " + std::string(axis_name(axis)));
	extent_ref(half, axis) = n / 2;
	HaarPair<T> out{Tensor<T>(half), Tensor<T>(half)};
	const T k = static_cast<T>(kInvSqrt2);
	for_each_line(x.shape(), axis, [&](std::size_t c, std::size_t t, std::size_t h, std::size_t w) {
		for (std::size_t i = 0; i < n / 2; ++i) {
			const T a = along(x, axis, c, t, h, w, 2 * i);
			const T b = along(x, axis, c, t, h, w, 2 * i + 1);
			along(out.low, axis, c, t, h, w, i) = (a + b) * k;
			along(out.high, axis, c, t, h, w, i) = (a - b) * k;
		}
	});
	return out;
}

template <typename T>
Tensor<T> haar_synthesis_axis(const Tensor<T>& low, const Tensor<T>& high, Axis axis) {
	if (low.shape() != high.shape()) throw ShapeError("reference::haar_synthesis_axis: shape mismatch");
	Shape full = low.shape();
	const std::size_t n = extent_ref(full, axis);
	extent_ref(full, axis) = 2 * n;
	Tensor<T> out(full);
	const T k = static_cast<T>(kInvSqrt2);
	for_each_line(low.shape(), axis, [&](std::size_t c, std::size_t t, std::size_t h, std::size_t w) {
		for (std::size_t i = 0; i < n; ++i) {
			const T lo = along(low, axis, c, t, h, w, i);
			const T hi = along(high, axis, c, t, h, w, i);
			along(out, axis, c, t, h, w, 2 * i) = (lo + hi) * k;
			along(out, axis, c, t, h, w, 2 * i + 1) = (lo - hi) * k;
		}
	});
	return out;
}

template <typename T>
SubbandSet<T> wt3d_sequential(const Tensor<T>& x, std::array<Axis, 3> order) {
	require_wt3d_shape(x.shape());
	auto bit_of = [](Axis a) -> std::size_t { return a == Axis::time ? 4 : a == Axis::height ? 2 : 1; };

	// (partial label bits, tensor) pairs, refined one axis at a time
	std::vector<std::pair<std::size_t, Tensor<T>>> bands;
	bands.emplace_back(0, x);
	for (Axis axis : order) {
		std::vector<std::pair<std::size_t, Tensor<T>>> next;
		for (auto& [bits, band] : bands) {
			HaarPair<T> p = reference::haar_analysis_axis(band, axis);
			next.emplace_back(bits, std::move(p.low));
			next.emplace_back(bits | bit_of(axis), std::move(p.high));
		}
		bands = std::move(next);
	}
	SubbandSet<T> out;
	out.source_shape = x.shape();
	for (auto& [bits, band] : bands) out.bands[bits] = std::move(band);
	return out;
}

template <typename T>
SubbandSet<T> wt3d_direct(const Tensor<T>& x) {
	require_wt3d_shape(x.shape());
	SubbandSet<T> out;
	out.source_shape = x.shape();
	const Shape bs = out.band_shape();
	const double scale = kInvSqrt2 * kInvSqrt2 * kInvSqrt2;
	for (std::size_t label = 0; label < kNumSubbands; ++label) {
		Tensor<T> band(bs);
		// filter tap sign: high-pass along an axis negates the odd tap
		const bool hi_t = label & 4, hi_h = label & 2, hi_w = label & 1;
		for (std::size_t c = 0; c < bs.c; ++c)
			for (std::size_t t = 0; t < bs.t; ++t)
				for (std::size_t h = 0; h < bs.h; ++h)
					for (std::size_t w = 0; w < bs.w; ++w) {
						double acc = 0.0;
						for (std::size_t dt = 0; dt < 2; ++dt)
							for (std::size_t dh = 0; dh < 2; ++dh)
								for (std::size_t dw = 0; dw < 2; ++dw) {
									const bool neg = (hi_t && dt) ^ (hi_h && dh) ^ (hi_w && dw);
									const double v = x(c, 2 * t + dt, 2 * h + dh, 2 * w + dw);
									acc += neg ? -v : v;
								}
						band(c, t, h, w) = static_cast<T>(acc * scale);
					}
		out.bands[label] = std::move(band);
	}
	return out;
}

template <typename T>
Tensor<T> iwt3d_sequential(const SubbandSet<T>& s) {
	validate(s);
	std::array<Tensor<T>, 4> by_th;
	for (std::size_t ab = 0; ab < 4; ++ab) by_th[ab] = reference::haar_synthesis_axis(s.bands[2 * ab], s.bands[2 * ab + 1], Axis::width);
	std::array<Tensor<T>, 2> by_t;
	for (std::size_t a = 0; a < 2; ++a) by_t[a] = reference::haar_synthesis_axis(by_th[2 * a], by_th[2 * a + 1], Axis::height);
	return reference::haar_synthesis_axis(by_t[0], by_t[1], Axis::time);
}

template <typename T>
MultiWTSet<T> multi_wt(const Tensor<T>& z, const GroupOrder& group_order) {
	require_multi_wt_shape(z.shape());
	validate_group_order(group_order);
	const SubbandSet<T> stage1 = wt3d_sequential(z);
	MultiWTSet<T> out;
	out.source_shape = z.shape();
	out.group_order = group_order;
	for (std::size_t g = 0; g < 2; ++g) {
		std::vector<Tensor<T>> parts;
		for (std::size_t j = 0; j < 4; ++j) parts.push_back(stage1.bands[group_order[4 * g + j]]);
		const Tensor<T> grouped = concat_channels(std::span<const Tensor<T>>(parts));
		const HaarPair<T> s2 = reference::haar_analysis_axis(grouped, Axis::time);
		const HaarPair<T> s3_low = reference::haar_analysis_axis(s2.low, Axis::time);
		const HaarPair<T> s3_high = reference::haar_analysis_axis(s2.high, Axis::time);
		out.bands[4 * g + 0] = s3_low.low;
		out.bands[4 * g + 1] = s3_low.high;
		out.bands[4 * g + 2] = s3_high.low;
		out.bands[4 * g + 3] = s3_high.high;
	}
	return out;
}

template <typename T>
Tensor<T> multi_iwt(const MultiWTSet<T>& m) {
	validate(m);
	SubbandSet<T> stage1;
	stage1.source_shape = m.source_shape;
	const std::size_t c = m.source_shape.c;
	const std::vector<std::size_t> sizes{c, c, c, c};
	for (std::size_t g = 0; g < 2; ++g) {
		const Tensor<T> lo = reference::haar_synthesis_axis(m.bands[4 * g + 0], m.bands[4 * g + 1], Axis::time);
		const Tensor<T> hi = reference::haar_synthesis_axis(m.bands[4 * g + 2], m.bands[4 * g + 3], Axis::time);
		auto parts = split_channels(reference::haar_synthesis_axis(lo, hi, Axis::time), sizes);
		for (std::size_t j = 0; j < 4; ++j) stage1.bands[m.group_order[4 * g + j]] = std::move(parts[j]);
	}
	return iwt3d_sequential(stage1);
}

#define LCOMP_INSTANTIATE(T)                                                                           \
	template HaarPair<T> haar_analysis_axis<T>(const Tensor<T>&, Axis);                                \
	template Tensor<T> haar_synthesis_axis<T>(const Tensor<T>&, const Tensor<T>&, Axis);               \
	template SubbandSet<T> wt3d_sequential<T>(const Tensor<T>&, std::array<Axis, 3>);                  \
	template SubbandSet<T> wt3d_direct<T>(const Tensor<T>&);                                           \
	template Tensor<T> iwt3d_sequential<T>(const SubbandSet<T>&);                                      \
	template MultiWTSet<T> multi_wt<T>(const Tensor<T>&, const GroupOrder&);                           \
	template Tensor<T> multi_iwt<T>(const MultiWTSet<T>&);

LCOMP_INSTANTIATE(float)
LCOMP_INSTANTIATE(double)
#undef LCOMP_INSTANTIATE

} // namespace lcomp::reference
