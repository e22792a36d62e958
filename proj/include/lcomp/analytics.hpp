#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "lcomp/compression.hpp"

namespace lcomp {

// Mean squared energy per (label, channel), label totals and the fraction of
// the grand total held by each label. Accumulated in f64.
struct EnergyReport {
	MaskMode mode = MaskMode::multi;
	std::size_t channels = 0;
	std::size_t band_elements = 0;                     // samples per subband
	std::vector<double> channel_energy;                // [label * channels + channel]
	std::vector<double> channel_fraction;              // channel sum of squares / grand sum
	std::array<double, kNumSubbands> label_energy{};   // mean square over the whole subband
	std::array<double, kNumSubbands> label_sum_squares{};
	std::array<double, kNumSubbands> label_fraction{};
	double grand_sum_squares = 0.0;
	bool grand_total_zero = true;

	double retained_fraction(const SubbandMask& mask) const;
};

template <typename T>
EnergyReport subband_energy(const MultiWTSet<T>& m);
template <typename T>
EnergyReport subband_energy(const SubbandSet<T>& s);

struct AutocorrEntry {
	double rho = 0.0;
	bool degenerate = false; // zero variance; rho reported as 0
};

// Lag-1 temporal autocorrelation per channel. Mean and variance run over
// every (t, h, w) of the channel; the lagged products over the T-1 adjacent
// frame pairs are normalised by the same T*H*W sample count, which bounds
// |rho| by 1.
template <typename T>
std::vector<AutocorrEntry> lag1_autocorr(const Tensor<T>& t);

struct AutocorrReport {
	MaskMode mode = MaskMode::multi;
	std::size_t channels = 0;
	std::vector<AutocorrEntry> entries; // [label * channels + channel]

	// Mean rho over non-degenerate slots of the labels selected by `labels`.
	double mean_rho(std::bitset<kNumSubbands> labels) const;
};

template <typename T>
AutocorrReport subband_autocorr(const MultiWTSet<T>& m);
template <typename T>
AutocorrReport subband_autocorr(const SubbandSet<T>& s);

// Jaccard index over (label, channel) slots. Two label-level masks compare
// label sets; a label-level mask is expanded to the other's channel count.
double channel_overlap(const SubbandMask& a, const SubbandMask& b);

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

template <typename T>
double psnr(const Tensor<T>& reference, const Tensor<T>& test, double peak = 1.0);

// "inf" for the identical-input sentinel, fixed 6 decimals otherwise.
std::string format_psnr(double db);

// JSON and CSV renderings used by `lcomp analyze`.
std::string energy_report_json(const EnergyReport& r);
std::string energy_report_csv(const EnergyReport& r);
std::string autocorr_report_json(const AutocorrReport& r);
std::string autocorr_report_csv(const AutocorrReport& r);

} // namespace lcomp
