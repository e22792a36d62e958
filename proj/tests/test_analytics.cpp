#include <doctest.h>

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "lcomp/analytics.hpp"
#include "oracles.hpp"

using namespace lcomp;

TEST_CASE("energy report of an all-zero set") {
	MultiWTSet<float> m;
	m.source_shape = {1, 8, 2, 2};
	for (auto& b : m.bands) b = TensorF(m.band_shape());
	const auto r = subband_energy(m);
	CHECK(r.grand_total_zero);
	CHECK(r.grand_sum_squares == 0.0);
	for (double f : r.label_fraction) CHECK(f == 0.0);
	for (double e : r.channel_energy) CHECK(e == 0.0);
	CHECK(r.retained_fraction(SubbandMask::fixed(MaskMode::multi)) == 0.0);
}

TEST_CASE("one nonzero subband holds the whole fraction") {
	MultiWTSet<double> m;
	m.source_shape = {1, 8, 4, 4};
	for (auto& b : m.bands) b = TensorD(m.band_shape());
	m.bands[5] = oracle::random_tensor<double>(m.band_shape(), 1);
	const auto r = subband_energy(m);
	CHECK(r.label_fraction[5] == doctest::Approx(1.0).epsilon(1e-15));
	CHECK(std::accumulate(r.label_fraction.begin(), r.label_fraction.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("energy report satisfies Parseval and its own definitions") {
	const auto z = oracle::random_tensor<double>({3, 8, 6, 4}, 2);
	for (int mode = 0; mode < 2; ++mode) {
		const auto r = mode ? subband_energy(wt3d(z)) : subband_energy(multi_wt(z));
		double total = 0.0;
		for (std::size_t l = 0; l < kNumSubbands; ++l) total += r.label_energy[l] * static_cast<double>(r.band_elements);
		CHECK(total == doctest::Approx(sum_squares(z)).epsilon(1e-6));
		CHECK(std::accumulate(r.label_fraction.begin(), r.label_fraction.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
		CHECK(std::accumulate(r.channel_fraction.begin(), r.channel_fraction.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
		for (double e : r.channel_energy) CHECK(e >= 0.0);
	}
	// per-channel mean of squares by hand
	const auto m = multi_wt(z);
	const auto r = subband_energy(m);
	const auto& band = m.bands[3];
	double acc = 0.0;
	for (auto v : band.channel(7)) acc += v * v;
	CHECK(r.channel_energy[3 * r.channels + 7] == doctest::Approx(acc / double(band.shape().channel_stride())).epsilon(1e-14));
}

TEST_CASE("energy report follows a channel permutation of the input") {
	const auto z = oracle::random_tensor<double>({2, 2, 4, 4}, 3);
	TensorD swapped(z.shape());
	std::copy(z.channel(0).begin(), z.channel(0).end(), swapped.channel(1).begin());
	std::copy(z.channel(1).begin(), z.channel(1).end(), swapped.channel(0).begin());
	const auto a = subband_energy(wt3d(z)), b = subband_energy(wt3d(swapped));
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		CHECK(a.channel_energy[l * 2] == b.channel_energy[l * 2 + 1]);
		CHECK(a.channel_energy[l * 2 + 1] == b.channel_energy[l * 2]);
		CHECK(a.label_energy[l] == doctest::Approx(b.label_energy[l]).epsilon(1e-15));
	}
}

TEST_CASE("lag-1 autocorrelation of a temporal ramp") {
	TensorD ramp(Shape{1, 8, 2, 3});
	for (std::size_t t = 0; t < 8; ++t)
		for (std::size_t h = 0; h < 2; ++h)
			for (std::size_t w = 0; w < 3; ++w) ramp(0, t, h, w) = double(t);
	const auto rho = lag1_autocorr(ramp);
	REQUIRE(rho.size() == 1);
	CHECK(std::abs(rho[0].rho - oracle::lag1(ramp, 0).rho) <= 0.05);
	CHECK(std::abs(rho[0].rho - oracle::lag1(ramp, 0).rho) <= 1e-12);
	CHECK(rho[0].rho > 0.5);
}

TEST_CASE("lag-1 autocorrelation of an alternating sequence is negative") {
	TensorD alt(Shape{1, 6, 1, 2});
	for (std::size_t t = 0; t < 6; ++t)
		for (std::size_t w = 0; w < 2; ++w) alt(0, t, 0, w) = t % 2 ? -1.0 : 1.0;
	const auto rho = lag1_autocorr(alt);
	CHECK(rho[0].rho == doctest::Approx(oracle::lag1(alt, 0).rho).epsilon(1e-12));
	CHECK(rho[0].rho < 0.0);
	CHECK(rho[0].rho >= -1.0);
	// 5 pairs of product -1 over 6 samples of variance 1
	CHECK(rho[0].rho == doctest::Approx(-5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("constant channels are flagged degenerate") {
	TensorF t(Shape{2, 4, 2, 2}, 3.0f);
	t(1, 2, 1, 1) = 4.0f;
	const auto rho = lag1_autocorr(t);
	CHECK(rho[0].degenerate);
	CHECK(rho[0].rho == 0.0);
	CHECK_FALSE(rho[1].degenerate);
	CHECK_THROWS_AS(lag1_autocorr(TensorF(Shape{1, 1, 2, 2})), ShapeError);
}

TEST_CASE("lag-1 autocorrelation matches the brute-force oracle") {
	for (int i = 0; i < 20; ++i) {
		const Shape s{1 + std::size_t(i % 4), 2 + std::size_t(i % 15), 1 + std::size_t(i % 8), 1 + std::size_t((i * 3) % 8)};
		const auto x = oracle::random_tensor<double>(s, 100 + i);
		const auto rho = lag1_autocorr(x);
		for (std::size_t c = 0; c < s.c; ++c) {
			CHECK(std::abs(rho[c].rho - oracle::lag1(x, c).rho) <= 1e-10);
			CHECK(std::abs(rho[c].rho) <= 1.0 + 1e-9);
		}
	}
}

TEST_CASE("subband autocorrelation report and label means") {
	const auto z = oracle::random_tensor<double>({2, 16, 4, 4}, 4);
	const auto m = multi_wt(z);
	const auto r = subband_autocorr(m);
	CHECK(r.channels == 8);
	CHECK(r.entries.size() == 64);
	const auto direct = lag1_autocorr(m.bands[2]);
	for (std::size_t c = 0; c < 8; ++c) CHECK(r.entries[2 * 8 + c].rho == direct[c].rho);
	double mean = 0.0;
	for (std::size_t c = 0; c < 8; ++c) mean += r.entries[c].rho + r.entries[8 + c].rho;
	CHECK(r.mean_rho(0b00000011) == doctest::Approx(mean / 16).epsilon(1e-14));
}

TEST_CASE("channel overlap is a Jaccard index") {
	const auto fixed = SubbandMask::fixed(MaskMode::multi);
	CHECK(channel_overlap(fixed, fixed) == 1.0);
	CHECK(channel_overlap(SubbandMask(MaskMode::multi, 0b0011), SubbandMask(MaskMode::multi, 0b1100)) == 0.0);
	CHECK(channel_overlap(SubbandMask(MaskMode::multi, 0b0011), SubbandMask(MaskMode::multi, 0b0110)) ==
	      doctest::Approx(1.0 / 3.0));

	std::vector<bool> slots(16, false);
	slots[0] = slots[1] = slots[2] = true; // labels 0 (both channels) and 1 (channel 0)
	const auto pc = SubbandMask::per_channel(MaskMode::multi, 2, slots);
	const SubbandMask two(MaskMode::multi, 0b0011);
	CHECK(channel_overlap(pc, two) == doctest::Approx(3.0 / 4.0));
	CHECK(channel_overlap(two, pc) == channel_overlap(pc, two));
	CHECK_THROWS_AS(channel_overlap(fixed, SubbandMask::fixed(MaskMode::single)), ShapeError);
	CHECK_THROWS_AS(channel_overlap(pc, SubbandMask::per_channel(MaskMode::multi, 1, std::vector<bool>(8))), ShapeError);
}

TEST_CASE("adaptive selection on a dominance-structured set overlaps the fixed mask fully") {
	MultiWTSet<float> m;
	m.source_shape = {2, 8, 2, 2};
	for (auto& b : m.bands) b = TensorF(m.band_shape());
	for (std::size_t l : {0, 1, 2, 4})
		for (auto& v : m.bands[l].data()) v = 1.0f + float(l);
	for (std::size_t l : {3, 5, 6, 7})
		for (auto& v : m.bands[l].data()) v = 0.1f;
	CHECK(channel_overlap(adaptive_select(m, 0.5), SubbandMask::fixed(MaskMode::multi)) == 1.0);
}

TEST_CASE("PSNR closed forms") {
	const auto a = oracle::random_tensor<double>({1, 2, 4, 4}, 5, 0.2, 0.8);
	CHECK(std::isinf(psnr(a, a)));
	CHECK(psnr(a, a) == kPsnrInfinity);
	CHECK(format_psnr(psnr(a, a)) == "inf");

	TensorD b = a;
	for (std::size_t i = 0; i < b.size(); ++i) b[i] += i % 2 ? 0.1 : -0.1; // MSE = 0.01
	CHECK(psnr(a, b, 1.0) == doctest::Approx(20.0).epsilon(1e-12));
	CHECK(psnr(a, b, 255.0) - psnr(a, b, 1.0) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
	CHECK(psnr(a, b, 255.0) - psnr(a, b, 1.0) == doctest::Approx(48.13).epsilon(1e-4));
	CHECK(format_psnr(20.0) == "20.000000");
	CHECK_THROWS_AS(psnr(a, TensorD(Shape{1, 2, 4, 2})), ShapeError);
	CHECK_THROWS_AS(psnr(a, b, 0.0), ShapeError);
}

TEST_CASE("CSV schemas") {
	TensorD z(Shape{1, 8, 2, 2});
	z(0, 0, 0, 0) = 2.0;
	const auto m = multi_wt(z);
	const auto csv = energy_report_csv(subband_energy(m));
	CHECK(csv.rfind("label,channel,energy,fraction\n", 0) == 0);
	// 8 labels x (4 channels + one summary row) + header
	CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 8 * 5);
	CHECK(csv.find("\nLLL,*,") != std::string::npos);

	const auto ac = autocorr_report_csv(subband_autocorr(multi_wt(oracle::random_tensor<double>({1, 16, 2, 2}, 6))));
	CHECK(ac.rfind("label,channel,rho,degenerate\n", 0) == 0);
	CHECK(std::count(ac.begin(), ac.end(), '\n') == 1 + 8 * 4);

	const std::string golden = "label,channel,rho,degenerate\n"
	                           "LLL,0,0,1\nLLH,0,0,1\nLHL,0,0,1\nLHH,0,0,1\nHLL,0,0,1\nHLH,0,0,1\nHHL,0,0,1\nHHH,0,0,1\n";
	CHECK(autocorr_report_csv(subband_autocorr(wt3d(TensorD(Shape{1, 4, 2, 2})))) == golden);
}

TEST_CASE("JSON reports parse and carry the label tables") {
	const auto z = oracle::random_tensor<double>({1, 8, 4, 4}, 7);
	const auto e = nlohmann::json::parse(energy_report_json(subband_energy(multi_wt(z))));
	CHECK(e["kind"] == "energy");
	CHECK(e["labels"].size() == 8);
	CHECK(e["labels"][4]["label"] == "HLL");
	CHECK(e["labels"][0]["channel_energy"].size() == 4);
	const auto a = nlohmann::json::parse(autocorr_report_json(subband_autocorr(wt3d(z))));
	CHECK(a["mode"] == "single");
	CHECK(a["labels"][7]["rho"].size() == 1);
}
