#include "lcomp/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "byteio.hpp"

namespace lcomp {

namespace {
constexpr std::uint8_t kPackedMagic[4] = {'L', 'C', 'P', '1'};
constexpr unsigned long kFixedLabels = 0b00010111; // LLL, LLH, LHL, HLL
} // namespace

std::string mask_mode_name(MaskMode m) { return m == MaskMode::multi ? "multi" : "single"; }

MaskMode parse_mask_mode(const std::string& name) {
	if (name == "multi") return MaskMode::multi;
	if (name == "single") return MaskMode::single;
	throw ShapeError("unknown mode '" + name + "' (expected multi or single)");
}

SubbandMask SubbandMask::fixed(MaskMode mode) { return {mode, std::bitset<kNumSubbands>(kFixedLabels)}; }

SubbandMask SubbandMask::per_channel(MaskMode mode, std::size_t channels, std::vector<bool> slots) {
	if (channels == 0) throw ShapeError("per-channel mask needs at least one channel");
	if (slots.size() != kNumSubbands * channels) {
		throw ShapeError("per-channel mask: " + std::to_string(slots.size()) + " slots for " +
		                 std::to_string(channels) + " channels");
	}
	SubbandMask m(mode, {});
	m.channels_ = channels;
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < channels; ++c) {
			if (slots[l * channels + c]) m.labels_.set(l);
		}
	}
	m.slots_ = std::move(slots);
	return m;
}

bool SubbandMask::is_fixed() const noexcept {
	return !is_per_channel() && labels_ == std::bitset<kNumSubbands>(kFixedLabels);
}

std::vector<bool> SubbandMask::expand(std::size_t channels) const {
	if (is_per_channel()) {
		if (channels != channels_) {
			throw ShapeError("mask has " + std::to_string(channels_) + " channels per label, bands have " +
			                 std::to_string(channels));
		}
		return slots_;
	}
	std::vector<bool> out(kNumSubbands * channels);
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < channels; ++c) out[l * channels + c] = labels_.test(l);
	}
	return out;
}

std::size_t SubbandMask::kept_slots(std::size_t channels) const {
	const auto e = expand(channels);
	return static_cast<std::size_t>(std::count(e.begin(), e.end(), true));
}

Shape PackedHeader::band_shape() const {
	const Shape& s = source_shape;
	if (mode == MaskMode::multi) return {4 * s.c, s.t / 8, s.h / 2, s.w / 2};
	return {s.c, s.t / 2, s.h / 2, s.w / 2};
}

std::size_t PackedHeader::payload_elements() const {
	const Shape b = band_shape();
	return mask.kept_slots(b.c) * b.channel_stride();
}

namespace {

template <typename Set>
void check_mode(const Set&, const SubbandMask& mask, const char* op) {
	if (mask.mode() != mode_of<Set>()) {
		throw ShapeError(std::string(op) + ": mask mode '" + mask_mode_name(mask.mode()) + "' does not match " +
		                 mask_mode_name(mode_of<Set>()) + " subband set");
	}
}

template <typename Set>
Set masked(const Set& in, const SubbandMask& mask) {
	validate(in);
	check_mode(in, mask, "apply_mask");
	const Shape bs = in.band_shape();
	const auto keep = mask.expand(bs.c);
	Set out = in;
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < bs.c; ++c) {
			if (!keep[l * bs.c + c]) {
				auto ch = out.bands[l].channel(c);
				std::fill(ch.begin(), ch.end(), 0);
			}
		}
	}
	return out;
}

template <typename Set>
PackedLatent pack_set(const Set& in, const SubbandMask& mask, const GroupOrder& group_order) {
	using T = typename std::remove_cvref_t<decltype(in.bands[0])>::value_type;
	validate(in);
	check_mode(in, mask, "pack");
	PackedLatent p;
	p.header.mode = mode_of<Set>();
	p.header.dtype = dtype_of<T>();
	p.header.source_shape = in.source_shape;
	p.header.group_order = group_order;
	p.header.mask = mask;

	const Shape bs = in.band_shape();
	const auto keep = mask.expand(bs.c);
	p.payload.reserve(p.header.payload_elements() * sizeof(T));
	detail::ByteWriter w(p.payload);
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < bs.c; ++c) {
			if (keep[l * bs.c + c]) w.samples(in.bands[l].channel(c));
		}
	}
	return p;
}

template <typename T, typename Set>
void unpack_into(const PackedLatent& p, Set& out) {
	const PackedHeader& h = p.header;
	if (h.dtype != dtype_of<T>()) {
		throw FormatError("LCP1", "dtype", "container holds " + dtype_name(h.dtype) + ", requested " + dtype_name(dtype_of<T>()));
	}
	if (h.mode != mode_of<Set>()) throw FormatError("LCP1", "mode", "container is " + mask_mode_name(h.mode));
	const Shape bs = h.band_shape();
	const auto keep = h.mask.expand(bs.c);
	if (p.payload.size() < h.payload_elements() * sizeof(T)) throw FormatError("LCP1", "truncated");
	if (p.payload.size() > h.payload_elements() * sizeof(T)) throw FormatError("LCP1", "trailing");

	out.source_shape = h.source_shape;
	detail::ByteReader r(p.payload, "LCP1");
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		out.bands[l] = Tensor<T>(bs);
		for (std::size_t c = 0; c < bs.c; ++c) {
			if (keep[l * bs.c + c]) r.samples(out.bands[l].channel(c), "truncated");
		}
	}
}

} // namespace

template <typename T>
SubbandSet<T> apply_mask(const SubbandSet<T>& s, const SubbandMask& mask) {
	return masked(s, mask);
}

template <typename T>
MultiWTSet<T> apply_mask(const MultiWTSet<T>& m, const SubbandMask& mask) {
	return masked(m, mask);
}

template <typename T>
PackedLatent pack(const MultiWTSet<T>& m, const SubbandMask& mask) {
	return pack_set(m, mask, m.group_order);
}

template <typename T>
PackedLatent pack(const SubbandSet<T>& s, const SubbandMask& mask) {
	return pack_set(s, mask, kLexicographicGroupOrder);
}

template <typename T>
MultiWTSet<T> unpack(const PackedLatent& p) {
	MultiWTSet<T> out;
	out.group_order = p.header.group_order;
	unpack_into<T>(p, out);
	return out;
}

template <typename T>
SubbandSet<T> unpack_single(const PackedLatent& p) {
	SubbandSet<T> out;
	unpack_into<T>(p, out);
	return out;
}

template <typename T>
PackedLatent compress_latent(const Tensor<T>& z, const CompressionConfig& cfg) {
	if (cfg.mode != cfg.mask.mode()) throw ShapeError("compress_latent: config mode and mask mode differ");
	if (cfg.dtype != dtype_of<T>()) {
		if constexpr (std::is_same_v<T, float>) return compress_latent(tensor_cast<double>(z), cfg);
		else return compress_latent(tensor_cast<float>(z), cfg);
	}
	if (cfg.mode == MaskMode::multi) return pack(multi_wt(z), cfg.mask);
	return pack(wt3d(z), cfg.mask);
}

AnyTensor decompress_latent(const PackedLatent& p) {
	auto run = [&](auto tag) -> AnyTensor {
		using T = decltype(tag);
		if (p.header.mode == MaskMode::multi) return multi_iwt(unpack<T>(p));
		return iwt3d(unpack_single<T>(p));
	};
	return p.header.dtype == DType::f32 ? run(float{}) : run(double{});
}

template <typename T>
Tensor<T> decompress_latent(const PackedLatent& p) {
	return as_tensor<T>(decompress_latent(p));
}

template <typename T>
Tensor<T> project_latent(const Tensor<T>& z, const SubbandMask& mask) {
	if (mask.mode() == MaskMode::multi) return multi_iwt(apply_mask(multi_wt(z), mask));
	return iwt3d(apply_mask(wt3d(z), mask));
}

std::vector<std::uint8_t> encode_packed(const PackedLatent& p) {
	const PackedHeader& h = p.header;
	std::vector<std::uint8_t> out;
	detail::ByteWriter w(out);
	w.bytes(kPackedMagic);
	w.u8(kPackedVersion);
	w.u8(static_cast<std::uint8_t>(h.mode));
	w.u8(static_cast<std::uint8_t>(h.dtype));
	for (auto d : {h.source_shape.c, h.source_shape.t, h.source_shape.h, h.source_shape.w}) w.u64(d);
	w.bytes(h.group_order);
	if (h.mask.is_per_channel()) {
		w.u8(static_cast<std::uint8_t>(MaskKind::per_channel));
		const auto& slots = h.mask.slots();
		std::vector<std::uint8_t> bitmap((slots.size() + 7) / 8, 0);
		for (std::size_t i = 0; i < slots.size(); ++i) {
			if (slots[i]) bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
		}
		w.bytes(bitmap);
	} else if (h.mask.is_fixed()) {
		w.u8(static_cast<std::uint8_t>(MaskKind::fixed));
	} else {
		w.u8(static_cast<std::uint8_t>(MaskKind::labels));
		w.u8(static_cast<std::uint8_t>(h.mask.labels().to_ulong()));
	}
	w.bytes(p.payload);
	return out;
}

PackedLatent decode_packed(std::span<const std::uint8_t> bytes) {
	detail::ByteReader r(bytes, "LCP1");
	auto magic = r.bytes(4, "magic");
	if (!std::equal(magic.begin(), magic.end(), kPackedMagic)) r.fail("magic");
	const std::uint8_t version = r.u8("version");
	if (version != kPackedVersion) r.fail("version", "got " + std::to_string(version));

	PackedLatent p;
	PackedHeader& h = p.header;
	const std::uint8_t mode = r.u8("mode");
	if (mode > 1) r.fail("mode", "unknown mode " + std::to_string(mode));
	h.mode = static_cast<MaskMode>(mode);
	const std::uint8_t dtype = r.u8("dtype");
	if (dtype > 1) r.fail("dtype", "tag " + std::to_string(dtype));
	h.dtype = static_cast<DType>(dtype);

	std::uint64_t dims[4];
	for (auto& d : dims) d = r.u64("dims");
	detail::checked_volume(r, dims);
	h.source_shape = Shape{dims[0], dims[1], dims[2], dims[3]};
	try {
		if (h.mode == MaskMode::multi) require_multi_wt_shape(h.source_shape);
		else require_wt3d_shape(h.source_shape);
	} catch (const ShapeError& e) {
		r.fail("dims", e.what());
	}

	auto order = r.bytes(8, "group_order");
	std::copy(order.begin(), order.end(), h.group_order.begin());
	try {
		validate_group_order(h.group_order);
	} catch (const ShapeError& e) {
		r.fail("group_order", e.what());
	}

	const std::uint8_t kind = r.u8("mask");
	switch (static_cast<MaskKind>(kind)) {
	case MaskKind::fixed: h.mask = SubbandMask::fixed(h.mode); break;
	case MaskKind::labels: h.mask = SubbandMask(h.mode, std::bitset<kNumSubbands>(r.u8("mask"))); break;
	case MaskKind::per_channel: {
		const std::size_t channels = h.band_shape().c;
		const std::size_t n = kNumSubbands * channels;
		auto bitmap = r.bytes((n + 7) / 8, "mask");
		std::vector<bool> slots(n);
		for (std::size_t i = 0; i < n; ++i) slots[i] = (bitmap[i / 8] >> (i % 8)) & 1u;
		for (std::size_t i = n; i < bitmap.size() * 8; ++i) {
			if ((bitmap[i / 8] >> (i % 8)) & 1u) r.fail("mask", "nonzero padding bits");
		}
		h.mask = SubbandMask::per_channel(h.mode, channels, std::move(slots));
		break;
	}
	default: r.fail("mask", "unknown mask kind " + std::to_string(kind));
	}

	const std::size_t expected = h.payload_elements() * dtype_size(h.dtype);
	if (r.remaining() < expected) r.fail("truncated", "payload shorter than retained subbands");
	if (r.remaining() > expected) r.fail("trailing", "bytes after payload");
	auto payload = r.bytes(expected, "truncated");
	p.payload.assign(payload.begin(), payload.end());
	return p;
}

void save_packed(const PackedLatent& p, const std::filesystem::path& path) { write_file(path, encode_packed(p)); }

PackedLatent load_packed(const std::filesystem::path& path) {
	auto bytes = read_file(path);
	try {
		return decode_packed(bytes);
	} catch (const FormatError& e) {
		throw FormatError("LCP1", e.field(), path.string());
	}
}

namespace {

template <typename Set>
ChannelEnergies energies_of(const Set& s) {
	validate(s);
	const Shape bs = s.band_shape();
	ChannelEnergies e;
	e.mode = mode_of<Set>();
	e.channels = bs.c;
	e.energy.resize(kNumSubbands * bs.c);
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < bs.c; ++c) {
			double acc = 0.0;
			for (auto v : s.bands[l].channel(c)) acc += static_cast<double>(v) * static_cast<double>(v);
			e.energy[l * bs.c + c] = acc / static_cast<double>(bs.channel_stride());
		}
	}
	return e;
}

} // namespace

template <typename T>
ChannelEnergies channel_energies(const MultiWTSet<T>& m) {
	return energies_of(m);
}

template <typename T>
ChannelEnergies channel_energies(const SubbandSet<T>& s) {
	return energies_of(s);
}

SubbandMask adaptive_select(const ChannelEnergies& e, double keep_fraction) {
	if (e.channels == 0 || e.energy.size() != kNumSubbands * e.channels) {
		throw ShapeError("adaptive_select: empty subband set");
	}
	if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
		throw ShapeError("adaptive_select: keep fraction must lie in (0, 1]");
	}
	const std::size_t total = e.energy.size();
	// 1e-9 absorbs representation error such as 0.3 * 10 = 3.0000000000000004
	const auto keep = std::min(total, static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(total) - 1e-9)));

	std::vector<std::size_t> order(total);
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return e.energy[a] > e.energy[b]; });
	std::vector<bool> slots(total, false);
	for (std::size_t i = 0; i < keep; ++i) slots[order[i]] = true;
	return SubbandMask::per_channel(e.mode, e.channels, std::move(slots));
}

template <typename T>
SubbandMask adaptive_select(const MultiWTSet<T>& m, double keep_fraction) {
	return adaptive_select(channel_energies(m), keep_fraction);
}

#define LCOMP_INSTANTIATE(T)                                                                 \
	template SubbandSet<T> apply_mask<T>(const SubbandSet<T>&, const SubbandMask&);          \
	template MultiWTSet<T> apply_mask<T>(const MultiWTSet<T>&, const SubbandMask&);          \
	template PackedLatent pack<T>(const MultiWTSet<T>&, const SubbandMask&);                 \
	template PackedLatent pack<T>(const SubbandSet<T>&, const SubbandMask&);                 \
	template MultiWTSet<T> unpack<T>(const PackedLatent&);                                   \
	template SubbandSet<T> unpack_single<T>(const PackedLatent&);                            \
	template PackedLatent compress_latent<T>(const Tensor<T>&, const CompressionConfig&);    \
	template Tensor<T> decompress_latent<T>(const PackedLatent&);                            \
	template Tensor<T> project_latent<T>(const Tensor<T>&, const SubbandMask&);              \
	template ChannelEnergies channel_energies<T>(const MultiWTSet<T>&);                      \
	template ChannelEnergies channel_energies<T>(const SubbandSet<T>&);                      \
	template SubbandMask adaptive_select<T>(const MultiWTSet<T>&, double);

LCOMP_INSTANTIATE(float)
LCOMP_INSTANTIATE(double)
#undef LCOMP_INSTANTIATE

} // namespace lcomp
