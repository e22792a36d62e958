// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: lcomp_acceptance [--only N ...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcomp/analytics.hpp"
#include "lcomp/compression.hpp"
#include "lcomp/synth.hpp"
#include "lcomp/toyae.hpp"
#include "lcomp/wavelet.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lcomp;

namespace {

struct Outcome {
	bool pass = false;
	std::string detail;
};

std::string fmt(const char* f, auto... args) {
	char buf[512];
	std::snprintf(buf, sizeof buf, f, args...);
	return buf;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Random shapes with every dimension even, bounded by (16, 16, 32, 32).
// `t_multiple` is 8 for Multi-WT inputs and 2 otherwise.
std::vector<Shape> shape_corpus(std::size_t n, std::size_t t_multiple, std::uint64_t seed) {
	std::mt19937_64 gen(seed);
	auto pick = [&](std::size_t step, std::size_t max) {
		return step * std::uniform_int_distribution<std::size_t>(1, max / step)(gen);
	};
	std::vector<Shape> out;
	for (std::size_t i = 0; i < n; ++i) out.push_back({pick(1, 16), pick(t_multiple, 16), pick(2, 32), pick(2, 32)});
	out.front() = {16, 16, 32, 32};
	return out;
}

// ---- 1 and 2 -------------------------------------------------------------

struct TransformStats {
	std::size_t tensors = 0;
	double worst_f32 = 0.0, worst_f64 = 0.0, worst_parseval = 0.0;
};

template <typename T>
void check_transforms(const Shape& s, std::uint64_t seed, bool multi, TransformStats& st) {
	const auto x = oracle::random_tensor<T>(s, seed);
	const double e = sum_squares(x);
	double err = 0.0, parseval = 0.0;
	if (multi) {
		const auto m = multi_wt(x);
		double bands = 0.0;
		for (const auto& b : m.bands) bands += sum_squares(b);
		parseval = rel_err(bands, e);
		err = max_abs_diff(multi_iwt(m), x);
	} else {
		const auto w = wt3d(x);
		double bands = 0.0;
		for (const auto& b : w.bands) bands += sum_squares(b);
		parseval = rel_err(bands, e);
		err = max_abs_diff(iwt3d(w), x);
	}
	(std::is_same_v<T, float> ? st.worst_f32 : st.worst_f64) =
	    std::max(std::is_same_v<T, float> ? st.worst_f32 : st.worst_f64, err);
	st.worst_parseval = std::max(st.worst_parseval, parseval);
	++st.tensors;
}

TransformStats transform_corpus() {
	static std::optional<TransformStats> cached;
	if (cached) return *cached;
	TransformStats st;
	const auto single = shape_corpus(120, 2, 1);
	const auto multi = shape_corpus(120, 8, 2);
	for (std::size_t i = 0; i < single.size(); ++i) {
		check_transforms<float>(single[i], 1000 + i, false, st);
		check_transforms<double>(single[i], 2000 + i, false, st);
	}
	for (std::size_t i = 0; i < multi.size(); ++i) {
		check_transforms<float>(multi[i], 3000 + i, true, st);
		check_transforms<double>(multi[i], 4000 + i, true, st);
	}
	cached = st;
	return st;
}

Outcome perfect_reconstruction() {
	const auto st = transform_corpus();
	return {st.tensors >= 200 && st.worst_f32 <= 1e-5 && st.worst_f64 <= 1e-10,
	        fmt("%zu tensors, max |err| f32 %.2e, f64 %.2e", st.tensors, st.worst_f32, st.worst_f64)};
}

Outcome parseval() {
	const auto st = transform_corpus();
	return {st.worst_parseval <= 1e-6, fmt("%zu tensors, max relative energy error %.2e", st.tensors, st.worst_parseval)};
}

// ---- 3 and 4 -------------------------------------------------------------

template <typename T>
Tensor<T> round_trip(const Tensor<T>& z) {
	CompressionConfig cfg;
	cfg.dtype = dtype_of<T>();
	return decompress_latent<T>(compress_latent(z, cfg));
}

Outcome projection_laws() {
	const auto shapes = shape_corpus(100, 8, 3);
	double worst_idem = 0.0, worst_ratio = 0.0;
	for (std::size_t i = 0; i < shapes.size(); ++i) {
		const Shape s{std::min<std::size_t>(shapes[i].c, 8), shapes[i].t, std::min<std::size_t>(shapes[i].h, 16),
		              std::min<std::size_t>(shapes[i].w, 16)};
		if (i % 2 == 0) {
			const auto z = oracle::random_tensor<double>(s, 5000 + i);
			const auto p = round_trip(z);
			worst_idem = std::max(worst_idem, max_abs_diff(round_trip(p), p));
			worst_ratio = std::max(worst_ratio, sum_squares(p) / sum_squares(z));
		} else {
			const auto z = oracle::random_tensor<float>(s, 5000 + i);
			const auto p = round_trip(z);
			worst_idem = std::max(worst_idem, max_abs_diff(round_trip(p), p));
			worst_ratio = std::max(worst_ratio, sum_squares(p) / sum_squares(z));
		}
	}
	return {worst_idem <= 1e-5 && worst_ratio <= 1.0 + 1e-6,
	        fmt("100 latents, max idempotence gap %.2e, max energy ratio %.6f", worst_idem, worst_ratio)};
}

Outcome compression_accounting() {
	bool ok = true;
	std::string detail;
	for (const Shape s : {Shape{16, 8, 16, 16}, Shape{8, 8, 16, 16}}) {
		const auto z = oracle::random_tensor<float>(s, 6);
		const auto p = compress_latent(z, CompressionConfig{});
		const std::size_t in_bytes = encode_tensor(z).size() - kTensorHeaderBytes;
		ok = ok && p.header.payload_elements() * 2 == s.volume() && p.payload.size() * 2 == in_bytes;
		detail += fmt("%s: %zu of %zu elements; ", s.str().c_str(), p.header.payload_elements(), s.volume());
	}
	detail.resize(detail.size() - 2);
	return {ok, detail};
}

// ---- 5 ---------------------------------------------------------------------

Outcome format_round_trips() {
	const fs::path dir = fs::temp_directory_path() / ("lcomp_acceptance_" + std::to_string(::getpid()));
	fs::create_directories(dir);
	bool ok = true;
	std::size_t checked = 0;

	for (std::size_t i = 0; i < 20; ++i) {
		const Shape s{1 + i % 3, 8 * (1 + i % 2), 2 + 2 * (i % 4), 2 + 2 * (i % 5)};
		const auto f = oracle::random_tensor<float>(s, 7000 + i);
		const auto d = oracle::random_tensor<double>(s, 8000 + i);
		save_tensor(f, dir / "f.lct");
		save_tensor(d, dir / "d.lct");
		ok = ok && load_tensor_as<float>(dir / "f.lct") == f && load_tensor_as<double>(dir / "d.lct") == d;

		const auto packed = compress_latent(f, CompressionConfig{});
		save_packed(packed, dir / "p.lcp");
		const auto bytes = encode_packed(packed);
		ok = ok && encode_packed(load_packed(dir / "p.lcp")) == bytes;
		ok = ok && encode_packed(pack(unpack<float>(packed), SubbandMask::fixed(MaskMode::multi))) == bytes;
		const auto adaptive = pack(multi_wt(d), adaptive_select(multi_wt(d), 0.5));
		ok = ok && encode_packed(pack(unpack<double>(adaptive), adaptive.header.mask)) == encode_packed(adaptive);
		checked += 2;
	}
	fs::remove_all(dir);

	// golden layouts assembled byte by byte
	oracle::Bytes lct;
	lct.str("LCT1").u8(0).u64(2).u64(1).u64(1).u64(1).u64(2).f32(1.5f).f32(-2.0f);
	const bool lct_golden = encode_tensor(TensorF(Shape{1, 1, 1, 2}, std::vector<float>{1.5f, -2.0f})) == lct.v;

	MultiWTSet<double> m;
	m.source_shape = {1, 8, 2, 2};
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		m.bands[l] = TensorD(m.band_shape());
		for (std::size_t c = 0; c < 4; ++c) m.bands[l][c] = double(10 * l + c);
	}
	oracle::Bytes lcp;
	lcp.str("LCP1").u8(1).u8(0).u8(1).u64(1).u64(8).u64(2).u64(2);
	for (std::uint8_t i = 0; i < 8; ++i) lcp.u8(i);
	lcp.u8(0);
	for (std::size_t l : {0, 1, 2, 4})
		for (std::size_t c = 0; c < 4; ++c) lcp.f64(double(10 * l + c));
	const bool lcp_golden = encode_packed(pack(m, SubbandMask::fixed(MaskMode::multi))) == lcp.v;

	return {ok && lct_golden && lcp_golden,
	        fmt("%zu tensors and %zu containers bit-exact; LCT1 golden %s, LCP1 golden %s", checked, checked,
	            lct_golden ? "match" : "MISMATCH", lcp_golden ? "match" : "MISMATCH")};
}

// ---- 6 ---------------------------------------------------------------------

Outcome autocorr_oracle() {
	double worst = 0.0;
	std::size_t channels = 0;
	for (std::size_t i = 0; i < 50; ++i) {
		const Shape s{1 + i % 4, 2 + i % 15, 1 + i % 9, 1 + (3 * i) % 10};
		const auto x = oracle::random_tensor<double>(s, 9000 + i);
		const auto rho = lag1_autocorr(x);
		for (std::size_t c = 0; c < s.c; ++c, ++channels) worst = std::max(worst, std::abs(rho[c].rho - oracle::lag1(x, c).rho));
	}
	return {worst <= 1e-10, fmt("50 tensors, %zu channels, max |diff| %.2e", channels, worst)};
}

// ---- 7 ---------------------------------------------------------------------

Outcome frequency_ordering() {
	SynthSpec spec; // smooth: no texture, no noise
	spec.clips = 64;
	const auto clips = synth_dataset(spec);
	const auto fixed = SubbandMask::fixed(MaskMode::single);
	const auto kept = fixed.labels(), zeroed = ~fixed.labels();
	double fraction = 0.0, rho_kept = 0.0, rho_zeroed = 0.0;
	double multi_fraction = 0.0, multi_kept = 0.0, multi_zeroed = 0.0;
	const auto multi_fixed = SubbandMask::fixed(MaskMode::multi);
	for (const auto& clip : clips) {
		const auto w = wt3d(clip);
		fraction += subband_energy(w).retained_fraction(fixed);
		const auto ac = subband_autocorr(w);
		rho_kept += ac.mean_rho(kept);
		rho_zeroed += ac.mean_rho(zeroed);
		const auto m = multi_wt(clip);
		multi_fraction += subband_energy(m).retained_fraction(multi_fixed);
		const auto mac = subband_autocorr(m);
		multi_kept += mac.mean_rho(multi_fixed.labels());
		multi_zeroed += mac.mean_rho(~multi_fixed.labels());
	}
	const double n = double(clips.size());
	fraction /= n, rho_kept /= n, rho_zeroed /= n, multi_fraction /= n, multi_kept /= n, multi_zeroed /= n;
	return {fraction >= 0.80 && rho_kept > rho_zeroed,
	        fmt("64 clips, retained energy %.4f, mean rho kept %.4f vs zeroed %.4f (multi-stage: %.4f, rho %.4f vs %.4f)",
	            fraction, rho_kept, rho_zeroed, multi_fraction, multi_kept, multi_zeroed)};
}

// ---- 8 ---------------------------------------------------------------------

double worst_gradient_error(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg) {
	const auto lg = loss_and_grad(p, batch, cfg, 7);
	std::vector<const Matrix*> grads;
	lg.grad.for_each([&](std::string_view, const Matrix& m) { grads.push_back(&m); });
	ToyAEParams q = p;
	double worst = 0.0;
	std::size_t k = 0;
	q.for_each([&](std::string_view, Matrix& m) {
		const Matrix& g = *grads[k++];
		for (std::size_t i = 0; i < m.v.size(); ++i) {
			const double orig = m.v[i], h = 1e-4;
			m.v[i] = orig + h;
			const double up = loss_only(q, batch, cfg, 7).total;
			m.v[i] = orig - h;
			const double down = loss_only(q, batch, cfg, 7).total;
			m.v[i] = orig;
			const double fd = (up - down) / (2 * h);
			worst = std::max(worst, std::abs(fd - g.v[i]) / std::max({std::abs(fd), std::abs(g.v[i]), 1e-6}));
		}
	});
	return worst;
}

Outcome gradient_gate() {
	SynthSpec spec;
	spec.clips = 2;
	spec.shape = {1, 16, 8, 8};
	spec.texture = 0.3;
	const auto batch = synth_dataset(spec);
	double worst = 0.0;
	std::size_t params = 0;
	for (std::uint64_t draw = 0; draw < 3; ++draw) {
		TrainConfig cfg;
		cfg.geometry.hidden = 8;
		cfg.geometry.latent_channels = 2;
		cfg.kl_weight = 0.1; // large enough that KL gradients are visible to finite differences
		const auto p = ToyAEParams::init(cfg.geometry, 40 + draw);
		params = p.parameter_count();
		for (auto mode : {TrainMode::none, TrainMode::joint}) {
			for (bool kl_after : {false, true}) {
				cfg.mode = mode;
				cfg.kl_after_compression = kl_after;
				worst = std::max(worst, worst_gradient_error(p, batch, cfg));
			}
		}
	}
	return {worst <= 1e-4, fmt("3 draws x %zu parameters x 4 loss variants, max relative error %.2e", params, worst)};
}

// ---- 9 and 10 --------------------------------------------------------------

struct Ablation {
	std::vector<double> joint, ptlc;
	std::vector<ToyAEParams> joint_models;
	std::vector<TensorD> val;
};

const Ablation& ablation() {
	static std::optional<Ablation> cached;
	if (cached) return *cached;
	Ablation a;
	SynthSpec spec;
	spec.texture = 0.3;
	spec.clips = 64;
	spec.seed = 1;
	const auto train_clips = synth_dataset(spec);
	spec.clips = 16;
	spec.seed = 2;
	a.val = synth_dataset(spec);
	for (std::uint64_t seed = 0; seed < 3; ++seed) {
		for (auto mode : {TrainMode::joint, TrainMode::ptlc_eval}) {
			TrainConfig cfg;
			cfg.seed = seed;
			cfg.mode = mode;
			cfg.steps = 5000;
			auto r = train(cfg, train_clips, a.val);
			(mode == TrainMode::joint ? a.joint : a.ptlc).push_back(r.log.evals.back().psnr_compressed);
			if (mode == TrainMode::joint) a.joint_models.push_back(std::move(r.params));
		}
	}
	cached = std::move(a);
	return *cached;
}

Outcome ptlc_mechanism() {
	const auto& a = ablation();
	bool ok = true;
	std::string detail = "compressed-path val PSNR joint vs ptlc-eval:";
	for (std::size_t s = 0; s < a.joint.size(); ++s) {
		ok = ok && a.joint[s] > a.ptlc[s];
		detail += fmt(" seed %zu %.2f vs %.2f dB;", s, a.joint[s], a.ptlc[s]);
	}
	detail.pop_back();
	return {ok, detail};
}

Outcome adaptive_overlap() {
	const auto& a = ablation(); // models come from the criterion 9 runs
	const auto fixed = SubbandMask::fixed(MaskMode::multi);
	std::string detail = "overlap(adaptive 0.5, fixed) on joint-model validation latents:";
	double worst = 1.0;
	for (std::size_t s = 0; s < a.joint_models.size(); ++s) {
		ChannelEnergies total;
		for (const auto& clip : a.val) {
			const auto e = channel_energies(multi_wt(encode(a.joint_models[s], clip, false).z));
			if (total.energy.empty()) total = e;
			else
				for (std::size_t i = 0; i < e.energy.size(); ++i) total.energy[i] += e.energy[i];
		}
		const double ov = channel_overlap(adaptive_select(total, 0.5), fixed);
		worst = std::min(worst, ov);
		detail += fmt(" seed %zu %.3f;", s, ov);
	}
	detail.pop_back();
	return {worst >= 0.75, detail};
}

// ---- 11 --------------------------------------------------------------------

Outcome determinism() {
	SynthSpec spec;
	spec.clips = 8;
	spec.texture = 0.3;
	spec.seed = 5;
	const auto d1 = synth_dataset(spec), d2 = synth_dataset(spec);
	bool data_ok = true;
	for (std::size_t i = 0; i < d1.size(); ++i) data_ok = data_ok && encode_tensor(d1[i]) == encode_tensor(d2[i]);

	TrainConfig cfg;
	cfg.mode = TrainMode::joint;
	cfg.steps = 300;
	cfg.eval_interval = 100;
	cfg.seed = 9;
	const std::span<const TensorD> train_clips(d1.data(), 6), val(d1.data() + 6, 2);
	const auto r1 = train(cfg, train_clips, val), r2 = train(cfg, train_clips, val);
	const bool train_ok = r1.params == r2.params && r1.log.to_csv() == r2.log.to_csv();

	const auto mask = SubbandMask::fixed(MaskMode::multi);
	bool eval_ok = true;
	for (const auto& clip : val) {
		eval_ok = eval_ok && encode_tensor(reconstruct(r1.params, clip, &mask)) == encode_tensor(reconstruct(r2.params, clip, &mask));
	}
	eval_ok = eval_ok && mean_psnr(r1.params, val, &mask, 1.0) == mean_psnr(r2.params, val, &mask, 1.0);
	return {data_ok && train_ok && eval_ok, fmt("gen-data %s, train %s, eval %s", data_ok ? "identical" : "DIFFERS",
	                                             train_ok ? "identical" : "DIFFERS", eval_ok ? "identical" : "DIFFERS")};
}

struct Criterion {
	int id;
	const char* name;
	double budget_s; // 0 = no runtime bound
	std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Acceptance checks for the lcomp library"};
	std::vector<int> only;
	app.add_option("--only", only, "Run only these criterion numbers");
	CLI11_PARSE(app, argc, argv);

	const std::vector<Criterion> criteria{
	    {1, "perfect reconstruction", 30, perfect_reconstruction},
	    {2, "energy conservation", 0, parseval},
	    {3, "projection laws", 0, projection_laws},
	    {4, "compression accounting", 0, compression_accounting},
	    {5, "format round trips", 0, format_round_trips},
	    {6, "autocorrelation oracle", 0, autocorr_oracle},
	    {7, "frequency ordering", 60, frequency_ordering},
	    {8, "gradient gate", 60, gradient_gate},
	    {9, "ptlc mechanism", 900, ptlc_mechanism},
	    {10, "adaptive vs fixed overlap", 60, adaptive_overlap},
	    {11, "determinism", 0, determinism},
	};

	const std::set<int> wanted(only.begin(), only.end());
	int failures = 0;
	for (const auto& c : criteria) {
		if (!wanted.empty() && !wanted.count(c.id)) continue;
		const auto t0 = std::chrono::steady_clock::now();
		Outcome o;
		try {
			o = c.run();
		} catch (const std::exception& e) {
			o = {false, std::string("exception: ") + e.what()};
		}
		const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		if (c.budget_s > 0 && secs > c.budget_s) {
			o.pass = false;
			o.detail += fmt("; over the %.0f s budget", c.budget_s);
		}
		failures += !o.pass;
		std::printf("criterion %2d %s: %s - %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
		std::fflush(stdout);
	}
	return failures == 0 ? 0 : 1;
}
