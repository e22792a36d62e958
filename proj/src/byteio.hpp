#pragma once

// Little-endian byte packing shared by the LCT1 and LCP1 codecs.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "lcomp/errors.hpp"

namespace lcomp::detail {

class ByteWriter {
public:
	explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

	void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
	void u8(std::uint8_t v) { out_.push_back(v); }
	void u32(std::uint32_t v) {
		for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
	}
	void u64(std::uint64_t v) {
		for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
	}
	void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
	void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

	template <typename T>
	void samples(std::span<const T> values) {
		out_.reserve(out_.size() + values.size() * sizeof(T));
		if constexpr (std::endian::native == std::endian::little) {
			const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
			out_.insert(out_.end(), p, p + values.size() * sizeof(T));
		} else {
			for (T v : values) {
				if constexpr (sizeof(T) == 4) f32(v);
				else f64(v);
			}
		}
	}

private:
	std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
	ByteReader(std::span<const std::uint8_t> in, std::string format) : in_(in), format_(std::move(format)) {}

	std::size_t remaining() const { return in_.size() - pos_; }
	std::size_t position() const { return pos_; }

	std::span<const std::uint8_t> bytes(std::size_t n, const char* field) {
		need(n, field);
		auto s = in_.subspan(pos_, n);
		pos_ += n;
		return s;
	}
	std::uint8_t u8(const char* field) { return bytes(1, field)[0]; }
	std::uint64_t u64(const char* field) {
		auto b = bytes(8, field);
		std::uint64_t v = 0;
		for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
		return v;
	}

	template <typename T>
	void samples(std::span<T> out, const char* field) {
		auto b = bytes(out.size() * sizeof(T), field);
		if constexpr (std::endian::native == std::endian::little) {
			std::memcpy(out.data(), b.data(), b.size());
		} else {
			using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
			for (std::size_t i = 0; i < out.size(); ++i) {
				U v = 0;
				for (int k = sizeof(T) - 1; k >= 0; --k) v = (v << 8) | b[i * sizeof(T) + static_cast<std::size_t>(k)];
				out[i] = std::bit_cast<T>(v);
			}
		}
	}

	[[noreturn]] void fail(const std::string& field, const std::string& detail = {}) const {
		throw FormatError(format_, field, detail);
	}

private:
	void need(std::size_t n, const char* field) const {
		if (remaining() < n) {
			fail("truncated", std::string(field) + ": need " + std::to_string(n) + " bytes, have " + std::to_string(remaining()));
		}
	}

	std::span<const std::uint8_t> in_;
	std::size_t pos_ = 0;
	std::string format_;
};

// Multiplies dims, reporting overflow as a "dims" format error.
inline std::uint64_t checked_volume(ByteReader& r, const std::uint64_t (&dims)[4]) {
	std::uint64_t v = 1;
	for (auto d : dims) {
		if (d == 0) r.fail("dims", "zero extent");
		if (v > UINT64_MAX / d) r.fail("dims", "element count overflows");
		v *= d;
	}
	return v;
}

} // namespace lcomp::detail
