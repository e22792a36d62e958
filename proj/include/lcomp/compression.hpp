#pragma once

// Subband zero-out masks and the LCP1 packed-latent container.
//
// A mask keeps a subset of the eight labels (optionally per channel) and
// replaces everything else with zeros. The canonical mask keeps
// {LLL, LLH, LHL, HLL}, which halves the stored volume. A PackedLatent
// stores only the kept samples; unpacking zero-pads the rest.

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "lcomp/wavelet.hpp"

namespace lcomp {

enum class MaskMode : std::uint8_t { multi = 0, single = 1 };

std::string mask_mode_name(MaskMode m);
MaskMode parse_mask_mode(const std::string& name);

class SubbandMask {
public:
	SubbandMask() = default;
	SubbandMask(MaskMode mode, std::bitset<kNumSubbands> labels) : mode_(mode), labels_(labels) {}

	// Keeps {LLL, LLH, LHL, HLL}.
	static SubbandMask fixed(MaskMode mode);
	static SubbandMask all(MaskMode mode) { return {mode, std::bitset<kNumSubbands>().set()}; }
	static SubbandMask none(MaskMode mode) { return {mode, {}}; }
	// slot(label, channel) = slots[label * channels + channel]
	static SubbandMask per_channel(MaskMode mode, std::size_t channels, std::vector<bool> slots);

	MaskMode mode() const noexcept { return mode_; }
	bool is_per_channel() const noexcept { return channels_ != 0; }
	bool is_fixed() const noexcept;
	std::size_t channels() const noexcept { return channels_; }
	// For per-channel masks a label is set if any of its channels is kept.
	std::bitset<kNumSubbands> labels() const noexcept { return labels_; }
	const std::vector<bool>& slots() const noexcept { return slots_; }

	bool keeps(std::size_t label, std::size_t channel) const {
		return is_per_channel() ? bool(slots_[label * channels_ + channel]) : labels_.test(label);
	}
	// Expands to a per-channel slot vector for bands of `channels` channels.
	std::vector<bool> expand(std::size_t channels) const;
	std::size_t kept_slots(std::size_t channels) const;

	bool operator==(const SubbandMask&) const = default;

private:
	MaskMode mode_ = MaskMode::multi;
	std::bitset<kNumSubbands> labels_;
	std::size_t channels_ = 0;
	std::vector<bool> slots_;
};

struct CompressionConfig {
	SubbandMask mask = SubbandMask::fixed(MaskMode::multi);
	MaskMode mode = MaskMode::multi;
	DType dtype = DType::f32;
};

template <typename Set>
constexpr MaskMode mode_of() {
	return std::is_same_v<typename Set::Label, StageLabel> ? MaskMode::multi : MaskMode::single;
}

// Mask descriptor kinds stored in LCP1 headers.
enum class MaskKind : std::uint8_t { fixed = 0, labels = 1, per_channel = 2 };

struct PackedHeader {
	MaskMode mode = MaskMode::multi;
	DType dtype = DType::f32;
	Shape source_shape{};
	GroupOrder group_order = kLexicographicGroupOrder;
	SubbandMask mask;

	Shape band_shape() const;
	// Samples the payload must hold.
	std::size_t payload_elements() const;
	bool operator==(const PackedHeader&) const = default;
};

struct PackedLatent {
	PackedHeader header;
	std::vector<std::uint8_t> payload;
};

inline constexpr std::uint8_t kPackedVersion = 1;

template <typename T>
SubbandSet<T> apply_mask(const SubbandSet<T>& s, const SubbandMask& mask);
template <typename T>
MultiWTSet<T> apply_mask(const MultiWTSet<T>& m, const SubbandMask& mask);

template <typename T>
PackedLatent pack(const MultiWTSet<T>& m, const SubbandMask& mask);
template <typename T>
PackedLatent pack(const SubbandSet<T>& s, const SubbandMask& mask);

// Throw FormatError("LCP1", ...) on dtype or mode mismatch with the header.
template <typename T>
MultiWTSet<T> unpack(const PackedLatent& p);
template <typename T>
SubbandSet<T> unpack_single(const PackedLatent& p);

template <typename T>
PackedLatent compress_latent(const Tensor<T>& z, const CompressionConfig& cfg);
template <typename T>
Tensor<T> decompress_latent(const PackedLatent& p);
AnyTensor decompress_latent(const PackedLatent& p);

// decompress_latent(compress_latent(z)) without the byte round trip.
template <typename T>
Tensor<T> project_latent(const Tensor<T>& z, const SubbandMask& mask);

std::vector<std::uint8_t> encode_packed(const PackedLatent& p);
PackedLatent decode_packed(std::span<const std::uint8_t> bytes);
void save_packed(const PackedLatent& p, const std::filesystem::path& path);
PackedLatent load_packed(const std::filesystem::path& path);

// Per-(label, channel) energy table: energy[label * channels + channel].
struct ChannelEnergies {
	MaskMode mode = MaskMode::multi;
	std::size_t channels = 0;
	std::vector<double> energy;
};

template <typename T>
ChannelEnergies channel_energies(const MultiWTSet<T>& m);
template <typename T>
ChannelEnergies channel_energies(const SubbandSet<T>& s);

// Keeps the ceil(keep_fraction * 8 * channels) highest-energy slots; ties go
// to the lower label, then the lower channel.
SubbandMask adaptive_select(const ChannelEnergies& e, double keep_fraction);
template <typename T>
SubbandMask adaptive_select(const MultiWTSet<T>& m, double keep_fraction);

} // namespace lcomp
