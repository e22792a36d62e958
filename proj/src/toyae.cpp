#include "lcomp/toyae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcomp/analytics.hpp"
#include "lcomp/rng.hpp"

namespace lcomp {

Shape ToyAEGeometry::latent_shape(const Shape& v) const {
	if (v.c != channels) {
		throw ShapeError("toy AE expects " + std::to_string(channels) + " video channels, got " + v.str());
	}
	if (v.t % patch_t || v.h % patch_h || v.w % patch_w || v.t == 0 || v.h == 0 || v.w == 0) {
		throw ShapeError("video shape " + v.str() + " is not divisible by patch (" + std::to_string(patch_t) + "," +
		                 std::to_string(patch_h) + "," + std::to_string(patch_w) + ")");
	}
	return {latent_channels, v.t / patch_t, v.h / patch_h, v.w / patch_w};
}

Shape ToyAEGeometry::video_shape(const Shape& z) const {
	if (z.c != latent_channels) {
		throw ShapeError("latent has " + std::to_string(z.c) + " channels, model expects " + std::to_string(latent_channels));
	}
	return {channels, z.t * patch_t, z.h * patch_h, z.w * patch_w};
}

void to_json(nlohmann::json& j, const ToyAEGeometry& g) {
	j = nlohmann::json{{"channels", g.channels}, {"patch", {g.patch_t, g.patch_h, g.patch_w}},
	                   {"hidden", g.hidden},     {"latent_channels", g.latent_channels}};
}

void from_json(const nlohmann::json& j, ToyAEGeometry& g) {
	ToyAEGeometry d;
	g.channels = j.value("channels", d.channels);
	if (j.contains("patch")) {
		const auto p = j.at("patch").get<std::vector<std::size_t>>();
		if (p.size() != 3) throw ShapeError("geometry: patch must be [t, h, w]");
		g.patch_t = p[0], g.patch_h = p[1], g.patch_w = p[2];
	}
	g.hidden = j.value("hidden", d.hidden);
	g.latent_channels = j.value("latent_channels", d.latent_channels);
	for (auto v : {g.channels, g.patch_t, g.patch_h, g.patch_w, g.hidden, g.latent_channels}) {
		if (v == 0) throw ShapeError("geometry: all sizes must be >= 1");
	}
}

ToyAEParams ToyAEParams::zeros(const ToyAEGeometry& g) {
	const std::size_t P = g.patch_dim(), H = g.hidden, Z = g.latent_channels;
	ToyAEParams p;
	p.geom = g;
	p.enc_w = Matrix(H, P), p.enc_b = Matrix(H, 1);
	p.mean_w = Matrix(Z, H), p.mean_b = Matrix(Z, 1);
	p.logvar_w = Matrix(Z, H), p.logvar_b = Matrix(Z, 1);
	p.dec_w = Matrix(H, Z), p.dec_b = Matrix(H, 1);
	p.out_w = Matrix(P, H), p.out_b = Matrix(P, 1);
	return p;
}

ToyAEParams ToyAEParams::init(const ToyAEGeometry& g, std::uint64_t seed) {
	ToyAEParams p = zeros(g);
	Rng rng(seed);
	p.for_each([&](std::string_view, Matrix& m) {
		if (m.cols == 1) return; // biases stay zero
		const double a = std::sqrt(1.0 / static_cast<double>(m.cols));
		for (auto& v : m.v) v = rng.uniform(-a, a);
	});
	return p;
}

std::size_t ToyAEParams::parameter_count() const {
	std::size_t n = 0;
	for_each([&](std::string_view, const Matrix& m) { n += m.v.size(); });
	return n;
}

bool ToyAEParams::all_finite() const {
	bool ok = true;
	for_each([&](std::string_view, const Matrix& m) {
		ok = ok && std::all_of(m.v.begin(), m.v.end(), [](double x) { return std::isfinite(x); });
	});
	return ok;
}

std::string train_mode_name(TrainMode m) {
	switch (m) {
	case TrainMode::none: return "none";
	case TrainMode::joint: return "joint";
	case TrainMode::ptlc_eval: return "ptlc-eval";
	}
	return "?";
}

TrainMode parse_train_mode(const std::string& name) {
	if (name == "none") return TrainMode::none;
	if (name == "joint") return TrainMode::joint;
	if (name == "ptlc-eval") return TrainMode::ptlc_eval;
	throw ShapeError("unknown training mode '" + name + "' (expected none, joint or ptlc-eval)");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
	nlohmann::json labels = nlohmann::json::array();
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		if (c.compression.mask.labels().test(l)) labels.push_back(label_name(l));
	}
	j = nlohmann::json{{"learning_rate", c.learning_rate},
	                   {"kl_weight", c.kl_weight},
	                   {"batch_size", c.batch_size},
	                   {"steps", c.steps},
	                   {"seed", c.seed},
	                   {"mode", train_mode_name(c.mode)},
	                   {"compression",
	                    {{"mode", mask_mode_name(c.compression.mode)},
	                     {"mask", c.compression.mask.is_fixed() ? nlohmann::json("fixed") : labels}}},
	                   {"kl_after_compression", c.kl_after_compression},
	                   {"sample_latent", c.sample_latent},
	                   {"eval_interval", c.eval_interval},
	                   {"psnr_peak", c.psnr_peak},
	                   {"geometry", c.geometry}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
	TrainConfig d;
	c.learning_rate = j.value("learning_rate", d.learning_rate);
	c.kl_weight = j.value("kl_weight", d.kl_weight);
	c.batch_size = j.value("batch_size", d.batch_size);
	c.steps = j.value("steps", d.steps);
	c.seed = j.value("seed", d.seed);
	c.mode = parse_train_mode(j.value("mode", std::string("none")));
	c.compression = d.compression;
	if (j.contains("compression")) {
		const auto& cj = j.at("compression");
		c.compression.mode = parse_mask_mode(cj.value("mode", std::string("multi")));
		const auto mask = cj.value("mask", nlohmann::json("fixed"));
		if (mask.is_string() && mask.get<std::string>() == "fixed") {
			c.compression.mask = SubbandMask::fixed(c.compression.mode);
		} else if (mask.is_array()) {
			std::bitset<kNumSubbands> bits;
			for (const auto& name : mask) {
				const auto l = parse_label(name.get<std::string>());
				if (!l) throw ShapeError("unknown subband label '" + name.get<std::string>() + "'");
				bits.set(*l);
			}
			c.compression.mask = SubbandMask(c.compression.mode, bits);
		} else {
			throw ShapeError("compression.mask must be \"fixed\" or a list of labels");
		}
	}
	c.kl_after_compression = j.value("kl_after_compression", d.kl_after_compression);
	c.sample_latent = j.value("sample_latent", d.sample_latent);
	c.eval_interval = j.value("eval_interval", d.eval_interval);
	c.psnr_peak = j.value("psnr_peak", d.psnr_peak);
	c.geometry = j.value("geometry", d.geometry);
}

namespace {

// out = W in + b
void affine(const Matrix& W, const Matrix& b, const double* in, double* out) {
	for (std::size_t r = 0; r < W.rows; ++r) {
		const double* row = &W.v[r * W.cols];
		double acc = b.v[r];
		for (std::size_t c = 0; c < W.cols; ++c) acc += row[c] * in[c];
		out[r] = acc;
	}
}

// dW += d in^T, db += d, din = W^T d (din may be null)
void affine_backward(const Matrix& W, const double* in, const double* d, Matrix& dW, Matrix& db, double* din) {
	for (std::size_t r = 0; r < W.rows; ++r) {
		const double dr = d[r];
		db.v[r] += dr;
		if (dr == 0.0) continue;
		double* grow = &dW.v[r * W.cols];
		for (std::size_t c = 0; c < W.cols; ++c) grow[c] += dr * in[c];
	}
	if (!din) return;
	std::fill(din, din + W.cols, 0.0);
	for (std::size_t r = 0; r < W.rows; ++r) {
		const double dr = d[r];
		if (dr == 0.0) continue;
		const double* row = &W.v[r * W.cols];
		for (std::size_t c = 0; c < W.cols; ++c) din[c] += row[c] * dr;
	}
}

struct PatchGrid {
	std::size_t count; // patch positions
	std::size_t dim;   // samples per patch
};

PatchGrid grid_of(const ToyAEGeometry& g, const Shape& latent) { return {latent.t * latent.h * latent.w, g.patch_dim()}; }

// patches[p * dim + q], p = (tz*Hz + hz)*Wz + wz, q = ((c*pt + dt)*ph + dh)*pw + dw
std::vector<double> gather_patches(const ToyAEGeometry& g, const TensorD& v, const Shape& z) {
	const PatchGrid grid = grid_of(g, z);
	std::vector<double> out(grid.count * grid.dim);
	std::size_t i = 0;
	for (std::size_t tz = 0; tz < z.t; ++tz)
		for (std::size_t hz = 0; hz < z.h; ++hz)
			for (std::size_t wz = 0; wz < z.w; ++wz)
				for (std::size_t c = 0; c < g.channels; ++c)
					for (std::size_t dt = 0; dt < g.patch_t; ++dt)
						for (std::size_t dh = 0; dh < g.patch_h; ++dh)
							for (std::size_t dw = 0; dw < g.patch_w; ++dw)
								out[i++] = v(c, tz * g.patch_t + dt, hz * g.patch_h + dh, wz * g.patch_w + dw);
	return out;
}

void scatter_patches(const ToyAEGeometry& g, const std::vector<double>& patches, const Shape& z, TensorD& v) {
	std::size_t i = 0;
	for (std::size_t tz = 0; tz < z.t; ++tz)
		for (std::size_t hz = 0; hz < z.h; ++hz)
			for (std::size_t wz = 0; wz < z.w; ++wz)
				for (std::size_t c = 0; c < g.channels; ++c)
					for (std::size_t dt = 0; dt < g.patch_t; ++dt)
						for (std::size_t dh = 0; dh < g.patch_h; ++dh)
							for (std::size_t dw = 0; dw < g.patch_w; ++dw)
								v(c, tz * g.patch_t + dt, hz * g.patch_h + dh, wz * g.patch_w + dw) = patches[i++];
}

// Column p of a latent tensor (one sample per latent channel).
void latent_column(const TensorD& z, std::size_t p, std::size_t count, double* out) {
	for (std::size_t k = 0; k < z.shape().c; ++k) out[k] = z[k * count + p];
}

struct EncoderPass {
	Shape latent;
	std::vector<double> x;      // patches
	std::vector<double> hidden; // tanh activations, count * hidden
	TensorD mean, logvar, eps, z;
};

struct DecoderPass {
	std::vector<double> hidden; // count * hidden
	std::vector<double> y;      // count * dim
};

EncoderPass run_encoder(const ToyAEParams& p, const TensorD& v, bool sample, Rng* rng) {
	const ToyAEGeometry& g = p.geom;
	EncoderPass e;
	e.latent = g.latent_shape(v.shape());
	const PatchGrid grid = grid_of(g, e.latent);
	e.x = gather_patches(g, v, e.latent);
	e.hidden.resize(grid.count * g.hidden);
	e.mean = TensorD(e.latent);
	e.logvar = TensorD(e.latent);
	std::vector<double> mu(g.latent_channels), lv(g.latent_channels);
	for (std::size_t q = 0; q < grid.count; ++q) {
		double* h = &e.hidden[q * g.hidden];
		affine(p.enc_w, p.enc_b, &e.x[q * grid.dim], h);
		for (std::size_t r = 0; r < g.hidden; ++r) h[r] = std::tanh(h[r]);
		affine(p.mean_w, p.mean_b, h, mu.data());
		affine(p.logvar_w, p.logvar_b, h, lv.data());
		for (std::size_t k = 0; k < g.latent_channels; ++k) {
			e.mean[k * grid.count + q] = mu[k];
			e.logvar[k * grid.count + q] = lv[k];
		}
	}
	e.z = e.mean;
	if (sample) {
		e.eps = TensorD(e.latent);
		for (std::size_t i = 0; i < e.z.size(); ++i) {
			e.eps[i] = rng->normal();
			e.z[i] = e.mean[i] + std::exp(0.5 * e.logvar[i]) * e.eps[i];
		}
	}
	return e;
}

DecoderPass run_decoder(const ToyAEParams& p, const TensorD& z) {
	const ToyAEGeometry& g = p.geom;
	const PatchGrid grid = grid_of(g, z.shape());
	DecoderPass d;
	d.hidden.resize(grid.count * g.hidden);
	d.y.resize(grid.count * grid.dim);
	std::vector<double> col(g.latent_channels);
	for (std::size_t q = 0; q < grid.count; ++q) {
		latent_column(z, q, grid.count, col.data());
		double* h = &d.hidden[q * g.hidden];
		affine(p.dec_w, p.dec_b, col.data(), h);
		for (std::size_t r = 0; r < g.hidden; ++r) h[r] = std::tanh(h[r]);
		affine(p.out_w, p.out_b, h, &d.y[q * grid.dim]);
	}
	return d;
}

void check_batch(const ToyAEParams& p, std::span<const TensorD> batch) {
	if (batch.empty()) throw ShapeError("empty batch");
	for (const auto& v : batch) {
		if (v.shape() != batch[0].shape()) throw ShapeError("batch clips differ in shape");
	}
	p.geom.latent_shape(batch[0].shape());
}

LossAndGrad forward_backward(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg,
                             std::uint64_t seed, bool want_grad) {
	check_batch(p, batch);
	const ToyAEGeometry& g = p.geom;
	const bool joint = cfg.mode == TrainMode::joint;
	const SubbandMask& mask = cfg.compression.mask;
	const double clips = static_cast<double>(batch.size());
	const double pixels = clips * static_cast<double>(batch[0].size());
	const double kl_scale = cfg.kl_weight / clips;

	LossAndGrad out;
	if (want_grad) out.grad = ToyAEParams::zeros(g);
	Rng rng(seed);

	for (const TensorD& v : batch) {
		EncoderPass enc = run_encoder(p, v, cfg.sample_latent, &rng);
		const TensorD z_dec = joint ? project_latent(enc.z, mask) : enc.z;
		const DecoderPass dec = run_decoder(p, z_dec);
		const PatchGrid grid = grid_of(g, enc.latent);

		const TensorD kl_mean = joint && cfg.kl_after_compression ? project_latent(enc.mean, mask) : enc.mean;
		double recon = 0.0;
		for (std::size_t i = 0; i < dec.y.size(); ++i) recon += std::abs(dec.y[i] - enc.x[i]);
		double kl = 0.0;
		for (std::size_t i = 0; i < enc.mean.size(); ++i) {
			const double lv = enc.logvar[i];
			kl += 0.5 * (kl_mean[i] * kl_mean[i] + std::exp(lv) - 1.0 - lv);
		}
		out.loss.recon += recon;
		out.loss.kl += kl;
		if (!want_grad) continue;

		ToyAEParams& G = out.grad;
		// decoder
		TensorD dz_dec(enc.latent);
		std::vector<double> dy(grid.dim), dg(g.hidden), col(g.latent_channels), dcol(g.latent_channels);
		for (std::size_t q = 0; q < grid.count; ++q) {
			for (std::size_t i = 0; i < grid.dim; ++i) {
				const double r = dec.y[q * grid.dim + i] - enc.x[q * grid.dim + i];
				dy[i] = (r > 0.0 ? 1.0 : r < 0.0 ? -1.0 : 0.0) / pixels;
			}
			const double* h = &dec.hidden[q * g.hidden];
			affine_backward(p.out_w, h, dy.data(), G.out_w, G.out_b, dg.data());
			for (std::size_t r = 0; r < g.hidden; ++r) dg[r] *= 1.0 - h[r] * h[r];
			latent_column(z_dec, q, grid.count, col.data());
			affine_backward(p.dec_w, col.data(), dg.data(), G.dec_w, G.dec_b, dcol.data());
			for (std::size_t k = 0; k < g.latent_channels; ++k) dz_dec[k * grid.count + q] = dcol[k];
		}
		const TensorD dz = joint ? project_latent(dz_dec, mask) : dz_dec;
		const TensorD dkl_mean = joint && cfg.kl_after_compression ? project_latent(kl_mean, mask) : kl_mean;

		// reparameterisation and KL
		TensorD dmean(enc.latent), dlogvar(enc.latent);
		for (std::size_t i = 0; i < dz.size(); ++i) {
			const double lv = enc.logvar[i];
			dmean[i] = dz[i] + kl_scale * dkl_mean[i];
			dlogvar[i] = kl_scale * 0.5 * (std::exp(lv) - 1.0);
			if (cfg.sample_latent) dlogvar[i] += dz[i] * enc.eps[i] * 0.5 * std::exp(0.5 * lv);
		}

		// encoder
		std::vector<double> dm(g.latent_channels), dl(g.latent_channels), dh(g.hidden), dh2(g.hidden);
		for (std::size_t q = 0; q < grid.count; ++q) {
			latent_column(dmean, q, grid.count, dm.data());
			latent_column(dlogvar, q, grid.count, dl.data());
			const double* h = &enc.hidden[q * g.hidden];
			affine_backward(p.mean_w, h, dm.data(), G.mean_w, G.mean_b, dh.data());
			affine_backward(p.logvar_w, h, dl.data(), G.logvar_w, G.logvar_b, dh2.data());
			for (std::size_t r = 0; r < g.hidden; ++r) dh[r] = (dh[r] + dh2[r]) * (1.0 - h[r] * h[r]);
			affine_backward(p.enc_w, &enc.x[q * grid.dim], dh.data(), G.enc_w, G.enc_b, nullptr);
		}
	}

	out.loss.recon /= pixels;
	out.loss.kl /= clips;
	out.loss.total = out.loss.recon + cfg.kl_weight * out.loss.kl;
	if (!std::isfinite(out.loss.total)) throw NumericError("non-finite loss");
	return out;
}

std::string fmt(double v) {
	if (std::isnan(v)) return "";
	if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

} // namespace

Encoded encode(const ToyAEParams& p, const TensorD& video, bool sample, std::uint64_t seed) {
	Rng rng(seed);
	EncoderPass e = run_encoder(p, video, sample, &rng);
	return {std::move(e.z), std::move(e.mean), std::move(e.logvar)};
}

TensorD decode(const ToyAEParams& p, const TensorD& latent) {
	const Shape vs = p.geom.video_shape(latent.shape());
	const DecoderPass d = run_decoder(p, latent);
	TensorD v(vs);
	scatter_patches(p.geom, d.y, latent.shape(), v);
	return v;
}

TensorD reconstruct(const ToyAEParams& p, const TensorD& video, const SubbandMask* mask) {
	TensorD z = encode(p, video, false).z;
	if (mask) z = project_latent(z, *mask);
	return decode(p, z);
}

LossAndGrad loss_and_grad(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg,
                          std::uint64_t seed) {
	return forward_backward(p, batch, cfg, seed, true);
}

LossBreakdown loss_only(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg,
                        std::uint64_t seed) {
	return forward_backward(p, batch, cfg, seed, false).loss;
}

std::string TrainLog::to_csv() const {
	std::ostringstream os;
	os << "step,recon,kl,total,val_psnr_clean,val_psnr_compressed\n";
	std::size_t e = 0;
	for (const auto& s : steps) {
		os << s.step << ',' << fmt(s.loss.recon) << ',' << fmt(s.loss.kl) << ',' << fmt(s.loss.total) << ',';
		if (e < evals.size() && evals[e].step == s.step) {
			os << fmt(evals[e].psnr_clean) << ',' << fmt(evals[e].psnr_compressed);
			++e;
		} else {
			os << ',';
		}
		os << '\n';
	}
	return os.str();
}

double mean_psnr(const ToyAEParams& p, std::span<const TensorD> clips, const SubbandMask* mask, double peak) {
	if (clips.empty()) throw ShapeError("mean_psnr: no clips");
	double sum = 0.0;
	for (const auto& v : clips) sum += psnr(v, reconstruct(p, v, mask), peak);
	return sum / static_cast<double>(clips.size());
}

TrainResult train(const TrainConfig& cfg, std::span<const TensorD> train_clips, std::span<const TensorD> val_clips) {
	if (!(cfg.learning_rate > 0.0)) throw ShapeError("train: learning rate must be positive");
	if (!(cfg.kl_weight >= 0.0)) throw ShapeError("train: KL weight must be non-negative");
	if (cfg.batch_size == 0) throw ShapeError("train: batch size must be >= 1");
	if (cfg.eval_interval == 0) throw ShapeError("train: eval interval must be >= 1");
	if (train_clips.empty() || val_clips.empty()) throw ShapeError("train: empty training or validation set");
	if (cfg.compression.mode != cfg.compression.mask.mode()) throw ShapeError("train: compression mode and mask mode differ");
	const Shape latent = cfg.geometry.latent_shape(train_clips[0].shape());
	if (cfg.mode != TrainMode::none) {
		if (cfg.compression.mode == MaskMode::multi) require_multi_wt_shape(latent);
		else require_wt3d_shape(latent);
	}

	TrainResult res;
	res.params = ToyAEParams::init(cfg.geometry, cfg.seed);
	const SubbandMask& mask = cfg.compression.mask;
	std::vector<TensorD> batch(cfg.batch_size);

	for (std::size_t step = 0; step < cfg.steps; ++step) {
		for (std::size_t i = 0; i < cfg.batch_size; ++i) batch[i] = train_clips[(step * cfg.batch_size + i) % train_clips.size()];
		LossAndGrad lg;
		try {
			lg = loss_and_grad(res.params, batch, cfg, mix_seed(cfg.seed, step + 1));
		} catch (const NumericError&) {
			throw NumericError("training diverged at step " + std::to_string(step) + " (non-finite loss)\n" + res.log.to_csv());
		}
		res.log.steps.push_back({step, lg.loss});

		auto update = [&](Matrix& w, const Matrix& gw) {
			for (std::size_t i = 0; i < w.v.size(); ++i) w.v[i] -= cfg.learning_rate * gw.v[i];
		};
		update(res.params.enc_w, lg.grad.enc_w), update(res.params.enc_b, lg.grad.enc_b);
		update(res.params.mean_w, lg.grad.mean_w), update(res.params.mean_b, lg.grad.mean_b);
		update(res.params.logvar_w, lg.grad.logvar_w), update(res.params.logvar_b, lg.grad.logvar_b);
		update(res.params.dec_w, lg.grad.dec_w), update(res.params.dec_b, lg.grad.dec_b);
		update(res.params.out_w, lg.grad.out_w), update(res.params.out_b, lg.grad.out_b);
		if (!res.params.all_finite()) {
			throw NumericError("training diverged at step " + std::to_string(step) + " (non-finite parameters)\n" + res.log.to_csv());
		}

		if ((step + 1) % cfg.eval_interval == 0 || step + 1 == cfg.steps) {
			EvalRecord e;
			e.step = step;
			e.psnr_clean = mean_psnr(res.params, val_clips, nullptr, cfg.psnr_peak);
			e.psnr_compressed = cfg.mode == TrainMode::none ? std::numeric_limits<double>::quiet_NaN()
			                                                : mean_psnr(res.params, val_clips, &mask, cfg.psnr_peak);
			res.log.evals.push_back(e);
		}
	}
	return res;
}

void save_params(const ToyAEParams& p, const std::filesystem::path& dir, const nlohmann::json& extra) {
	std::filesystem::create_directories(dir);
	nlohmann::ordered_json manifest;
	manifest["format"] = "lcomp-toyae-params";
	manifest["version"] = 1;
	manifest["geometry"] = nlohmann::json(p.geom);
	auto& tensors = manifest["tensors"] = nlohmann::ordered_json::array();
	p.for_each([&](std::string_view name, const Matrix& m) {
		const std::string file = std::string(name) + ".lct";
		save_tensor(TensorD(Shape{1, 1, m.rows, m.cols}, m.v), dir / file);
		tensors.push_back({{"name", name}, {"file", file}, {"rows", m.rows}, {"cols", m.cols}});
	});
	if (!extra.is_null()) manifest["extra"] = extra;
	const std::string text = manifest.dump(2) + "\n";
	write_file(dir / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ToyAEParams load_params(const std::filesystem::path& dir) {
	const auto bytes = read_file(dir / "manifest.json");
	nlohmann::json manifest;
	try {
		manifest = nlohmann::json::parse(bytes.begin(), bytes.end());
	} catch (const nlohmann::json::exception& e) {
		throw FormatError("params manifest", "json", e.what());
	}
	if (manifest.value("format", std::string()) != "lcomp-toyae-params") throw FormatError("params manifest", "format");
	ToyAEParams p = ToyAEParams::zeros(manifest.at("geometry").get<ToyAEGeometry>());
	const auto& tensors = manifest.at("tensors");
	p.for_each([&](std::string_view name, Matrix& m) {
		auto it = std::find_if(tensors.begin(), tensors.end(), [&](const auto& t) { return t.at("name") == name; });
		if (it == tensors.end()) throw FormatError("params manifest", std::string(name), "missing tensor");
		const TensorD t = load_tensor_as<double>(dir / it->at("file").template get<std::string>());
		if (t.shape() != Shape{1, 1, m.rows, m.cols}) {
			throw FormatError("params manifest", std::string(name), "shape " + t.shape().str() + " does not match geometry");
		}
		m.v = t.values();
	});
	return p;
}

} // namespace lcomp
