#include "lcomp/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "byteio.hpp"

namespace lcomp {

namespace {
constexpr std::uint8_t kTensorMagic[4] = {'L', 'C', 'T', '1'};
} // namespace

std::size_t dtype_size(DType d) { return d == DType::f32 ? 4 : 8; }

std::string dtype_name(DType d) { return d == DType::f32 ? "f32" : "f64"; }

DType parse_dtype(const std::string& name) {
	if (name == "f32") return DType::f32;
	if (name == "f64") return DType::f64;
	throw ShapeError("unknown dtype '" + name + "' (expected f32 or f64)");
}

std::string Shape::str() const {
	return "(" + std::to_string(c) + "," + std::to_string(t) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : shape_(shape), data_(shape.volume(), fill) {}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
	if (data_.size() != shape_.volume()) {
		throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " + shape_.str());
	}
}

template <typename T>
bool Tensor<T>::all_finite() const {
	return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
}

template class Tensor<float>;
template class Tensor<double>;

DType dtype_of(const AnyTensor& t) {
	return std::visit([](const auto& x) { return x.dtype(); }, t);
}

const Shape& shape_of(const AnyTensor& t) {
	return std::visit([](const auto& x) -> const Shape& { return x.shape(); }, t);
}

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& src) {
	if constexpr (std::is_same_v<To, From>) {
		return src;
	} else {
		std::vector<To> out(src.size());
		std::transform(src.data().begin(), src.data().end(), out.begin(), [](From v) { return static_cast<To>(v); });
		return Tensor<To>(src.shape(), std::move(out));
	}
}

template <typename T>
Tensor<T> as_tensor(const AnyTensor& t) {
	return std::visit([](const auto& x) { return tensor_cast<T>(x); }, t);
}

template <typename T>
double sum_squares(const Tensor<T>& t) {
	double acc = 0.0;
	for (T v : t.data()) acc += static_cast<double>(v) * static_cast<double>(v);
	return acc;
}

template <typename T>
double max_abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
	if (a.shape() != b.shape()) throw ShapeError("max_abs_diff: shape " + a.shape().str() + " vs " + b.shape().str());
	double m = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
	}
	return m;
}

template <typename T>
std::vector<std::uint8_t> encode_tensor(const Tensor<T>& t) {
	std::vector<std::uint8_t> out;
	out.reserve(kTensorHeaderBytes + t.size() * sizeof(T));
	detail::ByteWriter w(out);
	w.bytes(kTensorMagic);
	w.u8(static_cast<std::uint8_t>(t.dtype()));
	w.u64(t.size());
	const Shape& s = t.shape();
	for (auto d : {s.c, s.t, s.h, s.w}) w.u64(d);
	w.samples(t.data());
	return out;
}

std::vector<std::uint8_t> encode_tensor(const AnyTensor& t) {
	return std::visit([](const auto& x) { return encode_tensor(x); }, t);
}

namespace {

template <typename T>
AnyTensor read_samples(detail::ByteReader& r, Shape shape) {
	std::vector<T> data(shape.volume());
	r.samples(std::span<T>(data), "truncated");
	return Tensor<T>(shape, std::move(data));
}

} // namespace

AnyTensor decode_tensor(std::span<const std::uint8_t> bytes) {
	detail::ByteReader r(bytes, "LCT1");
	auto magic = r.bytes(4, "magic");
	if (!std::equal(magic.begin(), magic.end(), kTensorMagic)) r.fail("magic");
	const std::uint8_t tag = r.u8("dtype");
	if (tag > 1) r.fail("dtype", "tag " + std::to_string(tag));
	const auto dtype = static_cast<DType>(tag);
	const std::uint64_t count = r.u64("count");
	std::uint64_t dims[4];
	for (auto& d : dims) d = r.u64("dims");
	const std::uint64_t volume = detail::checked_volume(r, dims);
	if (volume != count) r.fail("count", "header count " + std::to_string(count) + " != C*T*H*W " + std::to_string(volume));
	if (volume > r.remaining() / dtype_size(dtype)) r.fail("truncated", "payload shorter than C*T*H*W samples");
	if (volume * dtype_size(dtype) != r.remaining()) r.fail("trailing", "bytes after payload");

	const Shape shape{dims[0], dims[1], dims[2], dims[3]};
	return dtype == DType::f32 ? read_samples<float>(r, shape) : read_samples<double>(r, shape);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
	std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
	return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
	out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
	if (!out) throw IoError("write failed for '" + path.string() + "'");
}

template <typename T>
void save_tensor(const Tensor<T>& t, const std::filesystem::path& path) {
	write_file(path, encode_tensor(t));
}

void save_tensor(const AnyTensor& t, const std::filesystem::path& path) { write_file(path, encode_tensor(t)); }

AnyTensor load_tensor(const std::filesystem::path& path) {
	auto bytes = read_file(path);
	try {
		return decode_tensor(bytes);
	} catch (const FormatError& e) {
		throw FormatError("LCT1", e.field(), path.string());
	}
}

template <typename T>
Tensor<T> load_tensor_as(const std::filesystem::path& path) {
	return as_tensor<T>(load_tensor(path));
}

template <typename T>
Tensor<T> concat_channels(std::span<const Tensor<T>> parts) {
	if (parts.empty()) throw ShapeError("concat_channels: no parts");
	const Shape& first = parts[0].shape();
	std::size_t channels = 0;
	for (std::size_t k = 0; k < parts.size(); ++k) {
		const Shape& s = parts[k].shape();
		if (s.t != first.t || s.h != first.h || s.w != first.w) {
			throw ShapeError("concat_channels: part " + std::to_string(k) + " has shape " + s.str() +
			                 ", expected (*," + std::to_string(first.t) + "," + std::to_string(first.h) + "," +
			                 std::to_string(first.w) + ")");
		}
		channels += s.c;
	}
	std::vector<T> out;
	out.reserve(channels * first.channel_stride());
	for (const auto& p : parts) out.insert(out.end(), p.data().begin(), p.data().end());
	return Tensor<T>(Shape{channels, first.t, first.h, first.w}, std::move(out));
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& t, std::span<const std::size_t> sizes) {
	const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
	if (total != t.shape().c) {
		throw ShapeError("split_channels: sizes sum to " + std::to_string(total) + " but tensor has " +
		                 std::to_string(t.shape().c) + " channels");
	}
	std::vector<Tensor<T>> parts;
	parts.reserve(sizes.size());
	const std::size_t stride = t.shape().channel_stride();
	std::size_t offset = 0;
	for (std::size_t n : sizes) {
		if (n == 0) throw ShapeError("split_channels: zero-sized part");
		auto begin = t.data().begin() + static_cast<std::ptrdiff_t>(offset * stride);
		parts.emplace_back(Shape{n, t.shape().t, t.shape().h, t.shape().w},
		                   std::vector<T>(begin, begin + static_cast<std::ptrdiff_t>(n * stride)));
		offset += n;
	}
	return parts;
}

#define LCOMP_INSTANTIATE(T)                                                                        \
	template Tensor<T> as_tensor<T>(const AnyTensor&);                                              \
	template double sum_squares<T>(const Tensor<T>&);                                               \
	template double max_abs_diff<T>(const Tensor<T>&, const Tensor<T>&);                            \
	template std::vector<std::uint8_t> encode_tensor<T>(const Tensor<T>&);                          \
	template void save_tensor<T>(const Tensor<T>&, const std::filesystem::path&);                   \
	template Tensor<T> load_tensor_as<T>(const std::filesystem::path&);                             \
	template Tensor<T> concat_channels<T>(std::span<const Tensor<T>>);                              \
	template std::vector<Tensor<T>> split_channels<T>(const Tensor<T>&, std::span<const std::size_t>);

LCOMP_INSTANTIATE(float)
LCOMP_INSTANTIATE(double)
#undef LCOMP_INSTANTIATE

template Tensor<float> tensor_cast<float, float>(const Tensor<float>&);
template Tensor<float> tensor_cast<float, double>(const Tensor<double>&);
template Tensor<double> tensor_cast<double, float>(const Tensor<float>&);
template Tensor<double> tensor_cast<double, double>(const Tensor<double>&);

} // namespace lcomp
