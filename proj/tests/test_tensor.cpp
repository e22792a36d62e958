#include <doctest.h>

#include <filesystem>
#include <random>

#include "lcomp/tensor.hpp"
#include "oracles.hpp"

using namespace lcomp;

namespace {

std::filesystem::path scratch(const std::string& name) {
	auto dir = std::filesystem::temp_directory_path() / "lcomp_test_tensor";
	std::filesystem::create_directories(dir);
	return dir / name;
}

template <typename F>
std::string format_field(F&& f) {
	try {
		f();
	} catch (const FormatError& e) {
		return e.field();
	}
	return "<no error>";
}

} // namespace

TEST_CASE("LCT1 single zero sample is 49 bytes ending in zeros") {
	const TensorF t(Shape{1, 1, 1, 1}, 0.0f);
	const auto path = scratch("zero.lct");
	save_tensor(t, path);
	const auto bytes = read_file(path);
	REQUIRE(bytes.size() == 49);
	for (std::size_t i = 45; i < 49; ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("LCT1 (2,2,2,2) f32 file is 109 bytes") {
	const auto t = oracle::random_tensor<float>({2, 2, 2, 2}, 1);
	CHECK(encode_tensor(t).size() == 45 + 4 * 16);
}

TEST_CASE("LCT1 golden layout") {
	TensorF f(Shape{1, 1, 1, 2}, std::vector<float>{1.5f, -2.0f});
	oracle::Bytes gf;
	gf.str("LCT1").u8(0).u64(2).u64(1).u64(1).u64(1).u64(2).f32(1.5f).f32(-2.0f);
	CHECK(encode_tensor(f) == gf.v);

	TensorD d(Shape{2, 1, 1, 1}, std::vector<double>{0.25, 3.0});
	oracle::Bytes gd;
	gd.str("LCT1").u8(1).u64(2).u64(2).u64(1).u64(1).u64(1).f64(0.25).f64(3.0);
	CHECK(encode_tensor(d) == gd.v);
}

TEST_CASE("LCT1 round trips are bit-exact for both dtypes") {
	const auto f = oracle::random_tensor<float>({3, 4, 8, 8}, 2);
	const auto d = oracle::random_tensor<double>({3, 4, 8, 8}, 3);
	save_tensor(f, scratch("f.lct"));
	save_tensor(d, scratch("d.lct"));
	CHECK(load_tensor_as<float>(scratch("f.lct")) == f);
	CHECK(load_tensor_as<double>(scratch("d.lct")) == d);
	CHECK(dtype_of(load_tensor(scratch("d.lct"))) == DType::f64);
	// big shape from the invariant list
	const auto big = oracle::random_tensor<float>({16, 16, 64, 64}, 4);
	CHECK(std::get<TensorF>(decode_tensor(encode_tensor(big))) == big);
}

TEST_CASE("LCT1 file length law over random shapes") {
	std::mt19937_64 gen(5);
	std::uniform_int_distribution<std::size_t> dim(1, 9);
	for (int i = 0; i < 120; ++i) {
		const Shape s{dim(gen), dim(gen), dim(gen), dim(gen)};
		const bool f64 = i % 2;
		const auto bytes = f64 ? encode_tensor(TensorD(s, 1.0)) : encode_tensor(TensorF(s, 1.0f));
		CHECK(bytes.size() == 45 + (f64 ? 8 : 4) * s.volume());
	}
}

TEST_CASE("LCT1 decoder names the first violated field") {
	const auto good = encode_tensor(oracle::random_tensor<float>({1, 2, 2, 2}, 6));

	auto bad_magic = good;
	std::memcpy(bad_magic.data(), "XXXX", 4);
	CHECK(format_field([&] { decode_tensor(bad_magic); }) == "magic");

	auto bad_dtype = good;
	bad_dtype[4] = 7;
	CHECK(format_field([&] { decode_tensor(bad_dtype); }) == "dtype");

	auto truncated = good;
	truncated.resize(truncated.size() - 3);
	CHECK(format_field([&] { decode_tensor(truncated); }) == "truncated");

	// header claims more samples than present: grow dims and count together
	oracle::Bytes big;
	big.str("LCT1").u8(0).u64(64).u64(1).u64(4).u64(4).u64(4);
	for (int i = 0; i < 8; ++i) big.f32(0.0f);
	CHECK(format_field([&] { decode_tensor(big.v); }) == "truncated");

	auto trailing = good;
	trailing.push_back(0);
	CHECK(format_field([&] { decode_tensor(trailing); }) == "trailing");

	oracle::Bytes zero_dim;
	zero_dim.str("LCT1").u8(0).u64(0).u64(0).u64(1).u64(1).u64(1);
	CHECK(format_field([&] { decode_tensor(zero_dim.v); }) == "dims");

	oracle::Bytes overflow;
	overflow.str("LCT1").u8(0).u64(0).u64(1ull << 40).u64(1ull << 40).u64(1).u64(1);
	CHECK(format_field([&] { decode_tensor(overflow.v); }) == "dims");

	oracle::Bytes short_header;
	short_header.str("LCT1").u8(0);
	CHECK(format_field([&] { decode_tensor(short_header.v); }) == "truncated");

	auto bad_count = good;
	bad_count[5] = 9;
	CHECK(format_field([&] { decode_tensor(bad_count); }) == "count");
}

TEST_CASE("load_tensor reports missing files as I/O errors") {
	CHECK_THROWS_AS(load_tensor(scratch("does_not_exist.lct")), IoError);
}

TEST_CASE("concat_channels stacks parts in order") {
	const TensorF ones(Shape{1, 2, 2, 2}, 1.0f), zeros(Shape{1, 2, 2, 2}, 0.0f);
	const std::vector<TensorF> parts{ones, zeros};
	const auto c = concat_channels<float>(parts);
	REQUIRE(c.shape() == Shape{2, 2, 2, 2});
	for (auto v : c.channel(0)) CHECK(v == 1.0f);
	for (auto v : c.channel(1)) CHECK(v == 0.0f);

	std::vector<TensorF> four(4, TensorF(Shape{4, 8, 16, 16}));
	CHECK(concat_channels<float>(four).shape() == Shape{16, 8, 16, 16});
}

TEST_CASE("split_channels inverts concat_channels") {
	const auto a = oracle::random_tensor<double>({3, 2, 4, 2}, 7);
	const auto b = oracle::random_tensor<double>({2, 2, 4, 2}, 8);
	const std::vector<TensorD> parts{a, b};
	const std::size_t sizes[] = {3, 2};
	const auto back = split_channels(concat_channels<double>(parts), sizes);
	REQUIRE(back.size() == 2);
	CHECK(back[0] == a);
	CHECK(back[1] == b);

	const auto t = oracle::random_tensor<float>({2, 2, 2, 2}, 9);
	const std::size_t ones[] = {1, 1};
	const auto halves = split_channels(t, ones);
	CHECK(halves[0].shape() == Shape{1, 2, 2, 2});

	// every composition of 5 channels
	const auto five = oracle::random_tensor<float>({5, 1, 2, 2}, 10);
	for (unsigned mask = 0; mask < 16; ++mask) {
		std::vector<std::size_t> sz{1};
		for (int k = 0; k < 4; ++k) (mask >> k & 1) ? sz.push_back(1) : void(++sz.back());
		const auto pieces = split_channels(five, sz);
		CHECK(concat_channels<float>(pieces) == five);
	}
}

TEST_CASE("concat and split reject inconsistent shapes") {
	const std::vector<TensorF> parts{TensorF(Shape{1, 2, 2, 2}), TensorF(Shape{1, 2, 2, 4})};
	try {
		concat_channels<float>(parts);
		FAIL("expected a shape error");
	} catch (const ShapeError& e) {
		CHECK(std::string(e.what()).find("part 1") != std::string::npos);
	}
	const std::size_t three[] = {3};
	CHECK_THROWS_AS(split_channels(TensorF(Shape{2, 2, 2, 2}), three), ShapeError);
}

TEST_CASE("tensor construction checks data length") {
	CHECK_THROWS_AS(TensorF(Shape{1, 1, 1, 2}, std::vector<float>{1.0f}), ShapeError);
	CHECK(parse_dtype("f64") == DType::f64);
	CHECK_THROWS_AS(parse_dtype("f16"), ShapeError);
}
