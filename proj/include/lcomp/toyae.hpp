#pragma once

// Small variational autoencoder with hand-derived gradients.
//
// The video is cut into non-overlapping (patch_t, patch_h, patch_w) patches.
// Each patch x goes through
//   h = tanh(enc_w x + enc_b),  mean = mean_w h + mean_b,  logvar = logvar_w h + logvar_b
// and every patch position contributes `latent_channels` samples to a latent
// tensor of shape (C_z, T/patch_t, H/patch_h, W/patch_w). The decoder maps
// each latent column back with
//   g = tanh(dec_w z + dec_b),  y = out_w g + out_b.
//
// In joint mode the latent passes through the subband projection (multi_wt,
// mask, multi_iwt) before decoding. The projection is linear and symmetric,
// so its backward pass is the same projection.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lcomp/compression.hpp"

namespace lcomp {

struct ToyAEGeometry {
	std::size_t channels = 1;
	std::size_t patch_t = 2;
	std::size_t patch_h = 4;
	std::size_t patch_w = 4;
	std::size_t hidden = 32;
	std::size_t latent_channels = 4;

	std::size_t patch_dim() const { return channels * patch_t * patch_h * patch_w; }
	Shape latent_shape(const Shape& video) const;
	Shape video_shape(const Shape& latent) const;
	bool operator==(const ToyAEGeometry&) const = default;
};

void to_json(nlohmann::json& j, const ToyAEGeometry& g);
void from_json(const nlohmann::json& j, ToyAEGeometry& g);

// Row-major dense matrix; biases are single-column matrices.
struct Matrix {
	std::size_t rows = 0;
	std::size_t cols = 0;
	std::vector<double> v;

	Matrix() = default;
	Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
	double& operator()(std::size_t r, std::size_t c) { return v[r * cols + c]; }
	double operator()(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
	bool operator==(const Matrix&) const = default;
};

struct ToyAEParams {
	ToyAEGeometry geom;
	Matrix enc_w, enc_b;
	Matrix mean_w, mean_b;
	Matrix logvar_w, logvar_b;
	Matrix dec_w, dec_b;
	Matrix out_w, out_b;

	// All-zero parameters (and gradient buffers) for `g`.
	static ToyAEParams zeros(const ToyAEGeometry& g);
	// Weights uniform(-a, a) with a = sqrt(1 / fan_in); biases zero.
	static ToyAEParams init(const ToyAEGeometry& g, std::uint64_t seed);

	template <typename F>
	void for_each(F&& f) {
		f("enc_w", enc_w), f("enc_b", enc_b), f("mean_w", mean_w), f("mean_b", mean_b);
		f("logvar_w", logvar_w), f("logvar_b", logvar_b), f("dec_w", dec_w), f("dec_b", dec_b);
		f("out_w", out_w), f("out_b", out_b);
	}
	template <typename F>
	void for_each(F&& f) const {
		const_cast<ToyAEParams*>(this)->for_each([&](std::string_view n, const Matrix& m) { f(n, m); });
	}

	std::size_t parameter_count() const;
	bool all_finite() const;
	bool operator==(const ToyAEParams&) const = default;
};

enum class TrainMode { none, joint, ptlc_eval };
std::string train_mode_name(TrainMode m);
TrainMode parse_train_mode(const std::string& name);

struct TrainConfig {
	// Reference values of the full-scale recipe; the toy's own defaults differ
	// where noted.
	static constexpr double kReferenceLearningRate = 1e-5;
	static constexpr double kReferenceKlWeight = 1e-6;

	double learning_rate = 1.0; // plain SGD at the toy scale
	double kl_weight = kReferenceKlWeight;
	std::size_t batch_size = 4;
	std::size_t steps = 5000;
	std::uint64_t seed = 0;
	TrainMode mode = TrainMode::none;
	CompressionConfig compression;
	bool kl_after_compression = false;
	bool sample_latent = true;
	std::size_t eval_interval = 500;
	double psnr_peak = 1.0;
	ToyAEGeometry geometry;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct Encoded {
	TensorD z;
	TensorD mean;
	TensorD logvar;
};

// sample=false returns the mean as z; sample=true adds exp(logvar/2)*eps
// with eps drawn from Rng(seed).
Encoded encode(const ToyAEParams& p, const TensorD& video, bool sample, std::uint64_t seed = 0);
TensorD decode(const ToyAEParams& p, const TensorD& latent);

// decode(encode_mean(video)), optionally with the latent projected by `mask`.
TensorD reconstruct(const ToyAEParams& p, const TensorD& video, const SubbandMask* mask = nullptr);

struct LossBreakdown {
	double recon = 0.0; // mean |v - v~| over every pixel of the batch
	double kl = 0.0;    // KL(N(mean, exp(logvar)) || N(0, 1)) summed over latent samples, averaged over clips
	double total = 0.0; // recon + kl_weight * kl
};

struct LossAndGrad {
	LossBreakdown loss;
	ToyAEParams grad;
};

// Forward and backward pass over a batch. `seed` drives the reparameterisation
// noise; a fixed seed makes the loss a deterministic function of `p`.
// Compression is routed through the forward pass only for TrainMode::joint.
LossAndGrad loss_and_grad(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg,
                          std::uint64_t seed);
LossBreakdown loss_only(const ToyAEParams& p, std::span<const TensorD> batch, const TrainConfig& cfg,
                        std::uint64_t seed);

struct StepRecord {
	std::size_t step = 0;
	LossBreakdown loss;
};

struct EvalRecord {
	std::size_t step = 0;
	double psnr_clean = 0.0;
	double psnr_compressed = 0.0; // NaN when the mode does not report it
};

struct TrainLog {
	std::vector<StepRecord> steps;
	std::vector<EvalRecord> evals;

	// step,recon,kl,total,val_psnr_clean,val_psnr_compressed
	std::string to_csv() const;
	bool operator==(const TrainLog& o) const { return to_csv() == o.to_csv(); }
};

struct TrainResult {
	ToyAEParams params;
	TrainLog log;
};

// Mean PSNR over clips of reconstruct(p, clip, mask).
double mean_psnr(const ToyAEParams& p, std::span<const TensorD> clips, const SubbandMask* mask, double peak);

// Plain gradient descent. Batches cycle through `train` in order; validation
// runs every eval_interval steps and after the last step.
TrainResult train(const TrainConfig& cfg, std::span<const TensorD> train_clips, std::span<const TensorD> val_clips);

// Directory checkpoint: manifest.json plus one LCT1 (f64) file per matrix.
void save_params(const ToyAEParams& p, const std::filesystem::path& dir, const nlohmann::json& extra = {});
ToyAEParams load_params(const std::filesystem::path& dir);

} // namespace lcomp
