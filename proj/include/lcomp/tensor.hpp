#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lcomp/errors.hpp"

namespace lcomp {

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

std::size_t dtype_size(DType d);
std::string dtype_name(DType d);
DType parse_dtype(const std::string& name);

template <typename T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<float>() { return DType::f32; }
template <>
constexpr DType dtype_of<double>() { return DType::f64; }

// (channels, time, height, width); samples are stored with W fastest.
struct Shape {
	std::size_t c = 0;
	std::size_t t = 0;
	std::size_t h = 0;
	std::size_t w = 0;

	constexpr std::size_t volume() const { return c * t * h * w; }
	constexpr std::size_t frame() const { return h * w; }
	constexpr std::size_t channel_stride() const { return t * h * w; }
	bool operator==(const Shape&) const = default;
	std::string str() const;
};

template <typename T>
class Tensor {
public:
	using value_type = T;

	Tensor() = default;
	explicit Tensor(Shape shape, T fill = T(0));
	Tensor(Shape shape, std::vector<T> data);

	const Shape& shape() const noexcept { return shape_; }
	std::size_t size() const noexcept { return data_.size(); }
	bool empty() const noexcept { return data_.empty(); }
	static constexpr DType dtype() { return dtype_of<T>(); }

	std::span<T> data() noexcept { return data_; }
	std::span<const T> data() const noexcept { return data_; }
	const std::vector<T>& values() const noexcept { return data_; }

	std::size_t index(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const {
		return ((c * shape_.t + t) * shape_.h + h) * shape_.w + w;
	}
	T& operator()(std::size_t c, std::size_t t, std::size_t h, std::size_t w) { return data_[index(c, t, h, w)]; }
	T operator()(std::size_t c, std::size_t t, std::size_t h, std::size_t w) const { return data_[index(c, t, h, w)]; }
	T& operator[](std::size_t i) { return data_[i]; }
	T operator[](std::size_t i) const { return data_[i]; }

	std::span<T> channel(std::size_t c) { return std::span<T>(data_).subspan(c * shape_.channel_stride(), shape_.channel_stride()); }
	std::span<const T> channel(std::size_t c) const {
		return std::span<const T>(data_).subspan(c * shape_.channel_stride(), shape_.channel_stride());
	}

	bool all_finite() const;
	bool operator==(const Tensor&) const = default;

private:
	Shape shape_{};
	std::vector<T> data_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;
using AnyTensor = std::variant<TensorF, TensorD>;

DType dtype_of(const AnyTensor& t);
const Shape& shape_of(const AnyTensor& t);

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& src);

template <typename T>
Tensor<T> as_tensor(const AnyTensor& t);

// Sum of squares accumulated in f64 in index order.
template <typename T>
double sum_squares(const Tensor<T>& t);

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b);

// LCT1: "LCT1" | dtype u8 | sample count u64 | C,T,H,W u64 | samples, all LE.
inline constexpr std::size_t kTensorHeaderBytes = 4 + 1 + 8 + 4 * 8;

template <typename T>
std::vector<std::uint8_t> encode_tensor(const Tensor<T>& t);
std::vector<std::uint8_t> encode_tensor(const AnyTensor& t);
AnyTensor decode_tensor(std::span<const std::uint8_t> bytes);

template <typename T>
void save_tensor(const Tensor<T>& t, const std::filesystem::path& path);
void save_tensor(const AnyTensor& t, const std::filesystem::path& path);
AnyTensor load_tensor(const std::filesystem::path& path);

// Loads and converts to T if the file holds the other dtype.
template <typename T>
Tensor<T> load_tensor_as(const std::filesystem::path& path);

template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>> parts);

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, std::span<const std::size_t> sizes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace lcomp
