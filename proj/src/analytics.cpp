#include "lcomp/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace lcomp {

namespace {

std::string num(double v) {
	if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.17g", v);
	return buf;
}

template <typename Set>
EnergyReport energy_of(const Set& s) {
	const ChannelEnergies e = channel_energies(s);
	const Shape bs = s.band_shape();
	EnergyReport r;
	r.mode = e.mode;
	r.channels = e.channels;
	r.band_elements = bs.volume();
	r.channel_energy = e.energy;
	r.channel_fraction.assign(e.energy.size(), 0.0);

	const auto per_channel = static_cast<double>(bs.channel_stride());
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		double sum = 0.0;
		for (std::size_t c = 0; c < r.channels; ++c) sum += r.channel_energy[l * r.channels + c] * per_channel;
		r.label_sum_squares[l] = sum;
		r.label_energy[l] = sum / static_cast<double>(r.band_elements);
		r.grand_sum_squares += sum;
	}
	r.grand_total_zero = r.grand_sum_squares == 0.0;
	if (!r.grand_total_zero) {
		for (std::size_t l = 0; l < kNumSubbands; ++l) r.label_fraction[l] = r.label_sum_squares[l] / r.grand_sum_squares;
		for (std::size_t i = 0; i < r.channel_energy.size(); ++i) {
			r.channel_fraction[i] = r.channel_energy[i] * per_channel / r.grand_sum_squares;
		}
	}
	return r;
}

template <typename Set>
AutocorrReport autocorr_of(const Set& s) {
	validate(s);
	AutocorrReport r;
	r.mode = mode_of<Set>();
	r.channels = s.band_shape().c;
	r.entries.reserve(kNumSubbands * r.channels);
	for (const auto& band : s.bands) {
		const auto e = lag1_autocorr(band);
		r.entries.insert(r.entries.end(), e.begin(), e.end());
	}
	return r;
}

} // namespace

double EnergyReport::retained_fraction(const SubbandMask& mask) const {
	if (grand_total_zero) return 0.0;
	const auto keep = mask.expand(channels);
	double f = 0.0;
	for (std::size_t i = 0; i < keep.size(); ++i) {
		if (keep[i]) f += channel_fraction[i];
	}
	return f;
}

template <typename T>
EnergyReport subband_energy(const MultiWTSet<T>& m) {
	return energy_of(m);
}

template <typename T>
EnergyReport subband_energy(const SubbandSet<T>& s) {
	return energy_of(s);
}

template <typename T>
std::vector<AutocorrEntry> lag1_autocorr(const Tensor<T>& x) {
	const Shape& s = x.shape();
	if (s.t < 2) throw ShapeError("lag1_autocorr: needs T >= 2 (got T=" + std::to_string(s.t) + ")");
	std::vector<AutocorrEntry> out(s.c);
	const std::size_t frame = s.frame();
	const auto n = static_cast<double>(s.channel_stride());
	const auto channels = static_cast<std::ptrdiff_t>(s.c);

#pragma omp parallel for schedule(static)
	for (std::ptrdiff_t ci = 0; ci < channels; ++ci) {
		const auto ch = x.channel(static_cast<std::size_t>(ci));
		const auto [lo, hi] = std::minmax_element(ch.begin(), ch.end());
		if (*lo == *hi) {
			out[static_cast<std::size_t>(ci)] = {0.0, true};
			continue;
		}
		double mean = 0.0;
		for (T v : ch) mean += static_cast<double>(v);
		mean /= n;
		double var = 0.0;
		for (T v : ch) var += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
		double lagged = 0.0;
		for (std::size_t i = 0; i + frame < ch.size(); ++i) {
			lagged += (static_cast<double>(ch[i]) - mean) * (static_cast<double>(ch[i + frame]) - mean);
		}
		out[static_cast<std::size_t>(ci)] = {(lagged / n) / (var / n), false};
	}
	return out;
}

double AutocorrReport::mean_rho(std::bitset<kNumSubbands> labels) const {
	double sum = 0.0;
	std::size_t n = 0;
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		if (!labels.test(l)) continue;
		for (std::size_t c = 0; c < channels; ++c) {
			const auto& e = entries[l * channels + c];
			if (e.degenerate) continue;
			sum += e.rho;
			++n;
		}
	}
	return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

template <typename T>
AutocorrReport subband_autocorr(const MultiWTSet<T>& m) {
	return autocorr_of(m);
}

template <typename T>
AutocorrReport subband_autocorr(const SubbandSet<T>& s) {
	return autocorr_of(s);
}

double channel_overlap(const SubbandMask& a, const SubbandMask& b) {
	if (a.mode() != b.mode()) throw ShapeError("channel_overlap: masks have different modes");
	std::vector<bool> sa, sb;
	if (!a.is_per_channel() && !b.is_per_channel()) {
		sa = a.expand(1);
		sb = b.expand(1);
	} else {
		if (a.is_per_channel() && b.is_per_channel() && a.channels() != b.channels()) {
			throw ShapeError("channel_overlap: masks cover " + std::to_string(a.channels()) + " and " +
			                 std::to_string(b.channels()) + " channels");
		}
		const std::size_t channels = a.is_per_channel() ? a.channels() : b.channels();
		sa = a.expand(channels);
		sb = b.expand(channels);
	}
	std::size_t inter = 0, uni = 0;
	for (std::size_t i = 0; i < sa.size(); ++i) {
		inter += sa[i] && sb[i];
		uni += sa[i] || sb[i];
	}
	return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

template <typename T>
double psnr(const Tensor<T>& reference, const Tensor<T>& test, double peak) {
	if (reference.shape() != test.shape()) {
		throw ShapeError("psnr: shape " + reference.shape().str() + " vs " + test.shape().str());
	}
	if (!(peak > 0.0)) throw ShapeError("psnr: peak must be positive");
	if (reference.empty()) throw ShapeError("psnr: empty tensors");
	double se = 0.0;
	for (std::size_t i = 0; i < reference.size(); ++i) {
		const double d = static_cast<double>(reference[i]) - static_cast<double>(test[i]);
		se += d * d;
	}
	const double mse = se / static_cast<double>(reference.size());
	if (mse == 0.0) return kPsnrInfinity;
	return 10.0 * std::log10(peak * peak / mse);
}

std::string format_psnr(double db) {
	if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.6f", db);
	return buf;
}

std::string energy_report_json(const EnergyReport& r) {
	nlohmann::ordered_json j;
	j["kind"] = "energy";
	j["mode"] = mask_mode_name(r.mode);
	j["channels"] = r.channels;
	j["band_elements"] = r.band_elements;
	j["grand_sum_squares"] = r.grand_sum_squares;
	j["grand_total_zero"] = r.grand_total_zero;
	auto& labels = j["labels"] = nlohmann::ordered_json::array();
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		nlohmann::ordered_json e;
		e["label"] = label_name(l);
		e["energy"] = r.label_energy[l];
		e["sum_squares"] = r.label_sum_squares[l];
		e["fraction"] = r.label_fraction[l];
		auto first = r.channel_energy.begin() + static_cast<std::ptrdiff_t>(l * r.channels);
		e["channel_energy"] = std::vector<double>(first, first + static_cast<std::ptrdiff_t>(r.channels));
		auto ff = r.channel_fraction.begin() + static_cast<std::ptrdiff_t>(l * r.channels);
		e["channel_fraction"] = std::vector<double>(ff, ff + static_cast<std::ptrdiff_t>(r.channels));
		labels.push_back(std::move(e));
	}
	return j.dump(2) + "\n";
}

std::string energy_report_csv(const EnergyReport& r) {
	std::ostringstream os;
	os << "label,channel,energy,fraction\n";
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < r.channels; ++c) {
			const std::size_t i = l * r.channels + c;
			os << label_name(l) << ',' << c << ',' << num(r.channel_energy[i]) << ',' << num(r.channel_fraction[i]) << '\n';
		}
		os << label_name(l) << ",*," << num(r.label_energy[l]) << ',' << num(r.label_fraction[l]) << '\n';
	}
	return os.str();
}

std::string autocorr_report_json(const AutocorrReport& r) {
	nlohmann::ordered_json j;
	j["kind"] = "autocorr";
	j["mode"] = mask_mode_name(r.mode);
	j["channels"] = r.channels;
	auto& labels = j["labels"] = nlohmann::ordered_json::array();
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		std::vector<double> rho;
		std::vector<bool> degenerate;
		for (std::size_t c = 0; c < r.channels; ++c) {
			rho.push_back(r.entries[l * r.channels + c].rho);
			degenerate.push_back(r.entries[l * r.channels + c].degenerate);
		}
		labels.push_back({{"label", label_name(l)}, {"rho", rho}, {"degenerate", degenerate}});
	}
	return j.dump(2) + "\n";
}

std::string autocorr_report_csv(const AutocorrReport& r) {
	std::ostringstream os;
	os << "label,channel,rho,degenerate\n";
	for (std::size_t l = 0; l < kNumSubbands; ++l) {
		for (std::size_t c = 0; c < r.channels; ++c) {
			const auto& e = r.entries[l * r.channels + c];
			os << label_name(l) << ',' << c << ',' << num(e.rho) << ',' << (e.degenerate ? 1 : 0) << '\n';
		}
	}
	return os.str();
}

#define LCOMP_INSTANTIATE(T)                                                         \
	template EnergyReport subband_energy<T>(const MultiWTSet<T>&);                   \
	template EnergyReport subband_energy<T>(const SubbandSet<T>&);                   \
	template std::vector<AutocorrEntry> lag1_autocorr<T>(const Tensor<T>&);          \
	template AutocorrReport subband_autocorr<T>(const MultiWTSet<T>&);               \
	template AutocorrReport subband_autocorr<T>(const SubbandSet<T>&);               \
	template double psnr<T>(const Tensor<T>&, const Tensor<T>&, double);

LCOMP_INSTANTIATE(float)
LCOMP_INSTANTIATE(double)
#undef LCOMP_INSTANTIATE

} // namespace lcomp
