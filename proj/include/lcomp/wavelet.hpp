#pragma once

// Orthonormal Haar filter bank on VideoTensors.
//
// Single-level wt3d() produces eight subbands labelled by the filter chosen
// along (time, height, width). multi_wt() runs the three-stage schedule used
// for latent compression: one wt3d level, then channel-concatenation of the
// stage-1 subbands grouped by their temporal letter, then two temporal-only
// Haar levels. Its labels index stages, not axes, hence the separate
// StageLabel type.
//
// Kernels here are OpenMP-parallel; lcomp/reference.hpp holds the serial
// versions the tests compare against.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "lcomp/tensor.hpp"

namespace lcomp {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

struct HaarFilters {
	static constexpr std::array<double, 2> low{kInvSqrt2, kInvSqrt2};
	static constexpr std::array<double, 2> high{kInvSqrt2, -kInvSqrt2};
};

enum class Axis { time, height, width };
std::string_view axis_name(Axis a);

// Letter k is 'L' when bit (2-k) of the index is clear; LLL = 0 ... HHH = 7,
// which is also lexicographic order.
enum class SubbandLabel3D : std::uint8_t { LLL, LLH, LHL, LHH, HLL, HLH, HHL, HHH };
enum class StageLabel : std::uint8_t { LLL, LLH, LHL, LHH, HLL, HLH, HHL, HHH };

inline constexpr std::size_t kNumSubbands = 8;

std::string_view label_name(std::size_t index);
std::optional<std::size_t> parse_label(std::string_view name);

// Concatenation order of stage-1 subbands inside the two temporal groups.
// Entries 0..3 are a permutation of {LLL,LLH,LHL,LHH} (temporal L), entries
// 4..7 a permutation of {HLL,HLH,HHL,HHH} (temporal H).
using GroupOrder = std::array<std::uint8_t, 8>;
inline constexpr GroupOrder kLexicographicGroupOrder{0, 1, 2, 3, 4, 5, 6, 7};
void validate_group_order(const GroupOrder& g);

template <typename T>
struct HaarPair {
	Tensor<T> low;
	Tensor<T> high;
};

template <typename T>
struct SubbandSet {
	using Label = SubbandLabel3D;

	Shape source_shape{};
	std::array<Tensor<T>, kNumSubbands> bands;

	Tensor<T>& operator[](Label l) { return bands[static_cast<std::size_t>(l)]; }
	const Tensor<T>& operator[](Label l) const { return bands[static_cast<std::size_t>(l)]; }
	Shape band_shape() const { return {source_shape.c, source_shape.t / 2, source_shape.h / 2, source_shape.w / 2}; }
};

template <typename T>
struct MultiWTSet {
	using Label = StageLabel;

	Shape source_shape{};
	GroupOrder group_order = kLexicographicGroupOrder;
	std::array<Tensor<T>, kNumSubbands> bands;

	Tensor<T>& operator[](Label l) { return bands[static_cast<std::size_t>(l)]; }
	const Tensor<T>& operator[](Label l) const { return bands[static_cast<std::size_t>(l)]; }
	Shape band_shape() const {
		return {4 * source_shape.c, source_shape.t / 8, source_shape.h / 2, source_shape.w / 2};
	}
};

// Throws ShapeError unless all eight bands exist with band_shape().
template <typename T>
void validate(const SubbandSet<T>& s);
template <typename T>
void validate(const MultiWTSet<T>& m);

template <typename T>
HaarPair<T> haar_analysis_axis(const Tensor<T>& t, Axis axis);

template <typename T>
Tensor<T> haar_synthesis_axis(const Tensor<T>& low, const Tensor<T>& high, Axis axis);

template <typename T>
SubbandSet<T> wt3d(const Tensor<T>& t);

template <typename T>
Tensor<T> iwt3d(const SubbandSet<T>& s);

template <typename T>
MultiWTSet<T> multi_wt(const Tensor<T>& z, const GroupOrder& group_order = kLexicographicGroupOrder);

template <typename T>
Tensor<T> multi_iwt(const MultiWTSet<T>& m);

// Shape checks shared by the kernels and the CLI, throwing ShapeError.
void require_wt3d_shape(const Shape& s);
void require_multi_wt_shape(const Shape& s);

} // namespace lcomp
