#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcomp/analytics.hpp"
#include "lcomp/compression.hpp"
#include "lcomp/synth.hpp"
#include "lcomp/toyae.hpp"
#include "lcomp/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace lcomp;

namespace {

// Exit codes: 0 success, 1 runtime / I/O / numeric failure, 2 usage, format or shape error.
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Globals {
	std::string dtype;
	std::optional<std::uint64_t> seed;
	bool quiet = false;
};

Globals g_opts;

void say(const std::string& line) {
	if (!g_opts.quiet) std::cout << line << '\n';
}

std::optional<DType> requested_dtype() {
	if (g_opts.dtype.empty()) return std::nullopt;
	return parse_dtype(g_opts.dtype);
}

// The input's own dtype unless --dtype asks for another.
AnyTensor with_dtype(AnyTensor t, std::optional<DType> want) {
	if (!want || *want == dtype_of(t)) return t;
	if (*want == DType::f32) return as_tensor<float>(t);
	return as_tensor<double>(t);
}

void write_text(const fs::path& path, const std::string& text) {
	if (path.has_parent_path()) fs::create_directories(path.parent_path());
	write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

nlohmann::json read_json(const fs::path& path, const char* what) {
	const auto bytes = read_file(path);
	try {
		return nlohmann::json::parse(bytes.begin(), bytes.end());
	} catch (const nlohmann::json::exception& e) {
		throw FormatError(what, "json", path.string() + ": " + e.what());
	}
}

ordered_json shape_json(const Shape& s) { return ordered_json::array({s.c, s.t, s.h, s.w}); }

Shape shape_from(const nlohmann::json& j, const char* what) {
	const auto v = j.get<std::vector<std::size_t>>();
	if (v.size() != 4) throw FormatError(what, "shape", "expected four dims");
	return {v[0], v[1], v[2], v[3]};
}

std::string extension(const fs::path& p) {
	std::string e = p.extension().string();
	for (auto& ch : e) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
	return e;
}

// ---- wt / iwt ------------------------------------------------------------

struct WtArgs {
	std::string in, out_dir, mode = "multi";
};

template <typename T>
void write_bands(const std::array<Tensor<T>, kNumSubbands>& bands, const fs::path& dir, ordered_json& manifest) {
	auto& list = manifest["bands"] = ordered_json::array();
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		const std::string file = std::string(label_name(l)) + ".lct";
		save_tensor(bands[l], dir / file);
		list.push_back({{"label", label_name(l)}, {"file", file}, {"shape", shape_json(bands[l].shape())}});
	}
}

int cmd_wt(const WtArgs& a) {
	const MaskMode mode = parse_mask_mode(a.mode);
	const AnyTensor in = with_dtype(load_tensor(a.in), requested_dtype());
	const fs::path dir(a.out_dir);
	fs::create_directories(dir);

	ordered_json manifest;
	manifest["format"] = "lcomp-subbands";
	manifest["version"] = 1;
	manifest["mode"] = mask_mode_name(mode);
	manifest["labels"] = mode == MaskMode::multi ? "stage" : "axis";
	manifest["dtype"] = dtype_name(dtype_of(in));
	manifest["source_shape"] = shape_json(shape_of(in));
	std::visit(
	    [&](const auto& t) {
		    if (mode == MaskMode::multi) {
			    const auto m = multi_wt(t);
			    manifest["group_order"] = m.group_order;
			    write_bands(m.bands, dir, manifest);
		    } else {
			    manifest["group_order"] = nullptr;
			    write_bands(wt3d(t).bands, dir, manifest);
		    }
	    },
	    in);
	write_text(dir / "manifest.json", manifest.dump(2) + "\n");
	say("wrote 8 " + mask_mode_name(mode) + " subbands to " + dir.string());
	return 0;
}

template <typename T, typename Set>
Set read_bands(const nlohmann::json& manifest, const fs::path& dir, Shape source) {
	Set s;
	s.source_shape = source;
	const auto& bands = manifest.at("bands");
	if (bands.size() != kNumSubbands) throw FormatError("subband manifest", "bands", "expected 8 entries");
	for (const auto& b : bands) {
		const auto label = parse_label(b.at("label").get<std::string>());
		if (!label) throw FormatError("subband manifest", "label", b.at("label").get<std::string>());
		const fs::path file = dir / b.at("file").get<std::string>();
		if (!fs::exists(file)) throw FormatError("subband manifest", "bands", "missing subband file " + file.string());
		s.bands[*label] = load_tensor_as<T>(file);
	}
	return s;
}

int cmd_iwt(const std::string& manifest_path, const std::string& out) {
	const fs::path mpath(manifest_path);
	const auto manifest = read_json(mpath, "subband manifest");
	if (manifest.value("format", "") != "lcomp-subbands") throw FormatError("subband manifest", "format");
	const MaskMode mode = parse_mask_mode(manifest.at("mode").get<std::string>());
	const Shape source = shape_from(manifest.at("source_shape"), "subband manifest");
	const DType dtype = requested_dtype().value_or(parse_dtype(manifest.at("dtype").get<std::string>()));
	const fs::path dir = mpath.parent_path();

	auto run = [&](auto tag) -> AnyTensor {
		using T = decltype(tag);
		if (mode == MaskMode::multi) {
			auto m = read_bands<T, MultiWTSet<T>>(manifest, dir, source);
			m.group_order = manifest.at("group_order").get<GroupOrder>();
			validate_group_order(m.group_order);
			return multi_iwt(m);
		}
		return iwt3d(read_bands<T, SubbandSet<T>>(manifest, dir, source));
	};
	const AnyTensor t = dtype == DType::f32 ? run(float{}) : run(double{});
	save_tensor(t, out);
	say("reconstructed " + shape_of(t).str() + " to " + out);
	return 0;
}

// ---- compress / decompress ---------------------------------------------

struct CompressArgs {
	std::string in, out, mask = "fixed", mode = "multi";
};

int cmd_compress(const CompressArgs& a) {
	const MaskMode mode = parse_mask_mode(a.mode);
	const AnyTensor z = with_dtype(load_tensor(a.in), requested_dtype());
	PackedLatent p = std::visit(
	    [&](const auto& t) -> PackedLatent {
		    CompressionConfig cfg;
		    cfg.mode = mode;
		    cfg.dtype = dtype_of(z);
		    if (a.mask == "fixed") {
			    cfg.mask = SubbandMask::fixed(mode);
		    } else if (a.mask.rfind("adaptive:", 0) == 0) {
			    if (mode != MaskMode::multi) throw ShapeError("adaptive masks need --mode multi");
			    double fraction = 0.0;
			    try {
				    fraction = std::stod(a.mask.substr(9));
			    } catch (const std::exception&) {
				    throw ShapeError("bad adaptive fraction in '" + a.mask + "'");
			    }
			    cfg.mask = adaptive_select(multi_wt(t), fraction);
		    } else {
			    throw ShapeError("unknown mask '" + a.mask + "' (expected fixed or adaptive:FRACTION)");
		    }
		    return compress_latent(t, cfg);
	    },
	    z);
	save_packed(p, a.out);
	say("packed " + std::to_string(p.header.payload_elements()) + " of " + std::to_string(shape_of(z).volume()) +
	    " samples into " + a.out);
	return 0;
}

int cmd_decompress(const std::string& in, const std::string& out) {
	AnyTensor t = with_dtype(decompress_latent(load_packed(in)), requested_dtype());
	save_tensor(t, out);
	say("decompressed " + shape_of(t).str() + " to " + out);
	return 0;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
	std::string in, kind = "energy", out, mode = "multi";
};

int cmd_analyze(const AnalyzeArgs& a) {
	const MaskMode mode = parse_mask_mode(a.mode);
	const AnyTensor in = with_dtype(load_tensor(a.in), requested_dtype());
	const std::string ext = extension(a.out);
	if (ext != ".json" && ext != ".csv") throw ShapeError("--out must end in .json or .csv");
	const bool json = ext == ".json";
	std::string text;
	std::visit(
	    [&](const auto& t) {
		    if (a.kind == "energy") {
			    const EnergyReport r = mode == MaskMode::multi ? subband_energy(multi_wt(t)) : subband_energy(wt3d(t));
			    text = json ? energy_report_json(r) : energy_report_csv(r);
		    } else if (a.kind == "autocorr") {
			    const AutocorrReport r = mode == MaskMode::multi ? subband_autocorr(multi_wt(t)) : subband_autocorr(wt3d(t));
			    text = json ? autocorr_report_json(r) : autocorr_report_csv(r);
		    } else {
			    throw ShapeError("unknown --kind '" + a.kind + "' (expected energy or autocorr)");
		    }
	    },
	    in);
	write_text(a.out, text);
	say("wrote " + a.kind + " report to " + a.out);
	return 0;
}

// ---- datasets --------------------------------------------------------------

std::string clip_name(std::size_t i) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "clip_%05zu.lct", i);
	return buf;
}

int cmd_gen_data(const std::string& spec_path, const std::string& out_dir) {
	SynthSpec spec;
	try {
		spec = read_json(spec_path, "synth spec").get<SynthSpec>();
	} catch (const nlohmann::json::exception& e) {
		throw FormatError("synth spec", "json", e.what());
	}
	if (g_opts.seed) spec.seed = *g_opts.seed;
	const DType dtype = requested_dtype().value_or(DType::f32);
	const fs::path dir(out_dir);
	fs::create_directories(dir);

	ordered_json manifest;
	manifest["format"] = "lcomp-dataset";
	manifest["version"] = 1;
	manifest["dtype"] = dtype_name(dtype);
	manifest["spec"] = nlohmann::json(spec);
	auto& clips = manifest["clips"] = ordered_json::array();
	for (std::size_t i = 0; i < spec.clips; ++i) {
		const TensorD clip = synth_clip(spec, i);
		const std::string file = clip_name(i);
		if (dtype == DType::f32) save_tensor(tensor_cast<float>(clip), dir / file);
		else save_tensor(clip, dir / file);
		clips.push_back(file);
	}
	write_text(dir / "manifest.json", manifest.dump(2) + "\n");
	say("wrote " + std::to_string(spec.clips) + " clips to " + dir.string());
	return 0;
}

std::vector<TensorD> load_dataset(const fs::path& dir) {
	const auto manifest = read_json(dir / "manifest.json", "dataset manifest");
	if (manifest.value("format", "") != "lcomp-dataset") throw FormatError("dataset manifest", "format");
	std::vector<TensorD> clips;
	for (const auto& f : manifest.at("clips")) clips.push_back(load_tensor_as<double>(dir / f.get<std::string>()));
	if (clips.empty()) throw ShapeError("dataset " + dir.string() + " has no clips");
	return clips;
}

// ---- train / eval ----------------------------------------------------------

struct TrainArgs {
	std::string config, data_dir, val_dir, out_dir;
};

int cmd_train(const TrainArgs& a) {
	TrainConfig cfg;
	try {
		cfg = read_json(a.config, "train config").get<TrainConfig>();
	} catch (const nlohmann::json::exception& e) {
		throw FormatError("train config", "json", e.what());
	}
	if (g_opts.seed) cfg.seed = *g_opts.seed;

	std::vector<TensorD> train_clips = load_dataset(a.data_dir), val_clips;
	if (!a.val_dir.empty()) {
		val_clips = load_dataset(a.val_dir);
	} else {
		// hold out the last eighth (at least one clip) for validation
		const std::size_t held = std::max<std::size_t>(1, train_clips.size() / 8);
		if (train_clips.size() <= held) throw ShapeError("need at least two clips when --val-dir is not given");
		val_clips.assign(train_clips.end() - static_cast<std::ptrdiff_t>(held), train_clips.end());
		train_clips.resize(train_clips.size() - held);
	}

	const fs::path out(a.out_dir);
	fs::create_directories(out);
	TrainResult r;
	try {
		r = train(cfg, train_clips, val_clips);
	} catch (const NumericError& e) {
		// the message carries the log up to the failing step after its first line
		const std::string what = e.what();
		const auto nl = what.find('\n');
		if (nl != std::string::npos) write_text(out / "train_log.csv", what.substr(nl + 1));
		throw NumericError(what.substr(0, nl));
	}
	save_params(r.params, out / "params", {{"config", nlohmann::json(cfg)}});
	write_text(out / "train_log.csv", r.log.to_csv());
	write_text(out / "config.json", nlohmann::json(cfg).dump(2) + "\n");
	const auto& last = r.log.evals.back();
	std::string line = "trained " + std::to_string(cfg.steps) + " steps (" + train_mode_name(cfg.mode) +
	                   "), val PSNR clean " + format_psnr(last.psnr_clean);
	if (!std::isnan(last.psnr_compressed)) line += ", compressed " + format_psnr(last.psnr_compressed);
	say(line);
	return 0;
}

struct EvalArgs {
	std::string params, data_dir, compression = "none", out;
	double peak = 1.0;
};

int cmd_eval(const EvalArgs& a) {
	const fs::path pdir(a.params);
	const ToyAEParams p = load_params(pdir);
	MaskMode mode = MaskMode::multi;
	const auto manifest = read_json(pdir / "manifest.json", "params manifest");
	if (manifest.contains("extra") && manifest["extra"].contains("config")) {
		mode = manifest["extra"]["config"].get<TrainConfig>().compression.mode;
	}
	std::optional<SubbandMask> mask;
	if (a.compression == "fixed") mask = SubbandMask::fixed(mode);
	else if (a.compression != "none") throw ShapeError("--compression must be none or fixed");

	const fs::path ddir(a.data_dir);
	const auto dm = read_json(ddir / "manifest.json", "dataset manifest");
	if (dm.value("format", "") != "lcomp-dataset") throw FormatError("dataset manifest", "format");
	std::ostringstream csv;
	csv << "clip,psnr\n";
	double sum = 0.0;
	std::size_t n = 0;
	for (const auto& f : dm.at("clips")) {
		const TensorD clip = load_tensor_as<double>(ddir / f.get<std::string>());
		const double db = psnr(clip, reconstruct(p, clip, mask ? &*mask : nullptr), a.peak);
		csv << f.get<std::string>() << ',' << format_psnr(db) << '\n';
		sum += db;
		++n;
	}
	csv << "mean," << format_psnr(sum / static_cast<double>(n)) << '\n';
	if (a.out.empty()) std::cout << csv.str();
	else write_text(a.out, csv.str());
	if (!a.out.empty()) say("mean PSNR " + format_psnr(sum / static_cast<double>(n)) + " dB over " + std::to_string(n) + " clips");
	return 0;
}

int cmd_psnr(const std::string& ref, const std::string& test, double peak) {
	const AnyTensor a = load_tensor(ref);
	const AnyTensor b = load_tensor(test);
	const double db = std::visit([&](const auto& x) { return psnr(x, as_tensor<typename std::decay_t<decltype(x)>::value_type>(b), peak); }, a);
	std::cout << format_psnr(db) << '\n';
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"lcomp: wavelet latent compression toolkit"};
	app.require_subcommand(1);
	app.fallthrough(); // global flags may follow the subcommand
	app.add_option("--dtype", g_opts.dtype, "Working dtype (f32 or f64); defaults to the input's")
	    ->check(CLI::IsMember({"f32", "f64"}));
	app.add_option("--seed", g_opts.seed, "Seed overriding the one in spec or config files");
	app.add_flag("--quiet", g_opts.quiet, "Suppress progress output");

	WtArgs wt;
	auto* wt_cmd = app.add_subcommand("wt", "Wavelet-decompose a tensor into subband files");
	wt_cmd->add_option("--in", wt.in, "Input LCT1 tensor")->required();
	wt_cmd->add_option("--out-dir", wt.out_dir, "Output directory")->required();
	wt_cmd->add_option("--mode", wt.mode, "multi (three-stage) or single (one 3D level)")->check(CLI::IsMember({"multi", "single"}));

	std::string iwt_manifest, iwt_out;
	auto* iwt_cmd = app.add_subcommand("iwt", "Reconstruct a tensor from a subband directory");
	iwt_cmd->add_option("--manifest", iwt_manifest, "manifest.json written by wt")->required();
	iwt_cmd->add_option("--out", iwt_out, "Output LCT1 tensor")->required();

	CompressArgs comp;
	auto* comp_cmd = app.add_subcommand("compress", "Pack a latent into an LCP1 container");
	comp_cmd->add_option("--in", comp.in, "Input LCT1 latent")->required();
	comp_cmd->add_option("--out", comp.out, "Output LCP1 file")->required();
	comp_cmd->add_option("--mask", comp.mask, "fixed or adaptive:FRACTION");
	comp_cmd->add_option("--mode", comp.mode, "multi or single")->check(CLI::IsMember({"multi", "single"}));

	std::string dec_in, dec_out;
	auto* dec_cmd = app.add_subcommand("decompress", "Zero-pad and inverse-transform an LCP1 container");
	dec_cmd->add_option("--in", dec_in, "Input LCP1 file")->required();
	dec_cmd->add_option("--out", dec_out, "Output LCT1 tensor")->required();

	AnalyzeArgs an;
	auto* an_cmd = app.add_subcommand("analyze", "Subband energy or lag-1 autocorrelation report");
	an_cmd->add_option("--in", an.in, "Input LCT1 tensor")->required();
	an_cmd->add_option("--kind", an.kind, "energy or autocorr")->check(CLI::IsMember({"energy", "autocorr"}));
	an_cmd->add_option("--out", an.out, "Report path; .json or .csv")->required();
	an_cmd->add_option("--mode", an.mode, "multi or single")->check(CLI::IsMember({"multi", "single"}));

	std::string gen_spec, gen_out;
	auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic clip corpus");
	gen_cmd->add_option("--spec", gen_spec, "SynthSpec JSON")->required();
	gen_cmd->add_option("--out-dir", gen_out, "Output directory")->required();

	TrainArgs tr;
	auto* tr_cmd = app.add_subcommand("train", "Train the toy autoencoder");
	tr_cmd->add_option("--config", tr.config, "TrainConfig JSON")->required();
	tr_cmd->add_option("--data-dir", tr.data_dir, "Training corpus from gen-data")->required();
	tr_cmd->add_option("--val-dir", tr.val_dir, "Validation corpus (default: hold out the last eighth)");
	tr_cmd->add_option("--out-dir", tr.out_dir, "Output directory")->required();

	EvalArgs ev;
	auto* ev_cmd = app.add_subcommand("eval", "Per-clip PSNR of a trained model");
	ev_cmd->add_option("--params", ev.params, "Parameter directory written by train")->required();
	ev_cmd->add_option("--data-dir", ev.data_dir, "Corpus from gen-data")->required();
	ev_cmd->add_option("--compression", ev.compression, "none or fixed")->check(CLI::IsMember({"none", "fixed"}));
	ev_cmd->add_option("--out", ev.out, "CSV path (default: stdout)");
	ev_cmd->add_option("--peak", ev.peak, "PSNR peak value")->check(CLI::PositiveNumber);

	std::string ps_ref, ps_test;
	double ps_peak = 1.0;
	auto* ps_cmd = app.add_subcommand("psnr", "PSNR between two tensors");
	ps_cmd->add_option("--ref", ps_ref, "Reference LCT1 tensor")->required();
	ps_cmd->add_option("--test", ps_test, "Test LCT1 tensor")->required();
	ps_cmd->add_option("--peak", ps_peak, "PSNR peak value")->check(CLI::PositiveNumber);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e);
		return code == 0 ? 0 : kExitUsage;
	}

	try {
		if (*wt_cmd) return cmd_wt(wt);
		if (*iwt_cmd) return cmd_iwt(iwt_manifest, iwt_out);
		if (*comp_cmd) return cmd_compress(comp);
		if (*dec_cmd) return cmd_decompress(dec_in, dec_out);
		if (*an_cmd) return cmd_analyze(an);
		if (*gen_cmd) return cmd_gen_data(gen_spec, gen_out);
		if (*tr_cmd) return cmd_train(tr);
		if (*ev_cmd) return cmd_eval(ev);
		if (*ps_cmd) return cmd_psnr(ps_ref, ps_test, ps_peak);
	} catch (const FormatError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitUsage;
	} catch (const ShapeError& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitUsage;
	} catch (const nlohmann::json::exception& e) {
		std::cerr << "error: malformed JSON input: " << e.what() << '\n';
		return kExitUsage;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return kExitRuntime;
	}
	return kExitUsage;
}
