#pragma once

// Biased grid-code (GKP) qubit under Gaussian displacement noise, plus the
// mapping from lattice squeezing to the effective displacement spread.
//
// A qubit with aspect ratio R uses rectangular bins: logical spacing
// sqrt(pi/R) in x and sqrt(pi R) in p. A Gaussian shift is decoded to the
// nearest lattice point; it flips the logical value exactly when it lands in
// an odd bin. With A_x (A_p) the even-bin mass of the x (p) shift,
//   p_success = A_x A_p,   p_X = (1-A_x) A_p,
//   p_Z = (1-A_p) A_x,     p_Y = (1-A_x)(1-A_p).
// Swapping (R, sigma_x, sigma_p) -> (1/R, sigma_p, sigma_x) exchanges the
// roles of X and Z exactly.
//
// Noise models for the displacement spread after one gate:
//   gate_noise:     sigma_x^2 = delta_in + Nx sech(2r)/2 + ... (see below)
//   resource_only:  sigma^2 tracks the raw squeezer quality only.
// Each model is evaluated under one of two bookkeeping conventions for the
// measurement spikes. half_shot charges e^{-2r}/2 per input/output spike and
// N_q sech(2r)/2 for the gate segment; full_shot doubles all three terms.

#include <cvqc/gates.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvqc {

// Probability mass of N(0, sigma^2) inside bin n: [(n-1/2)s, (n+1/2)s].
// Far bins go through erfc to dodge the cancellation of two near-unit erfs.
inline double gaussian_bin_mass(double sigma, double spacing, long n) {
    if (!(spacing > 0.0)) throw std::invalid_argument("gaussian_bin_mass: spacing must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("gaussian_bin_mass: sigma must be >= 0");
    if (sigma == 0.0) return (n == 0) ? 1.0 : 0.0;
    const double w = sigma * std::numbers::sqrt2;
    const double a = (static_cast<double>(n) - 0.5) * spacing / w;
    const double b = (static_cast<double>(n) + 0.5) * spacing / w;
    if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
    if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
    return 0.5 * (std::erf(b) - std::erf(a));
}

namespace detail {

// Truncation radius: generous 10-sigma window, never below 8 bins, so that
// doubling it moves the result by far less than 1e-12.
inline long gkp_bin_cutoff(double sigma, double spacing) {
    const long by_sigma = static_cast<long>(std::ceil(10.0 * sigma / spacing));
    return std::max<long>(8, by_sigma);
}

inline double parity_mass(double sigma, double spacing, bool even, long cutoff) {
    if (sigma == 0.0) return even ? 1.0 : 0.0;
    double total = even ? gaussian_bin_mass(sigma, spacing, 0) : 0.0;
    for (long m = even ? 2 : 1; m <= cutoff; m += 2)
        total += 2.0 * gaussian_bin_mass(sigma, spacing, m);
    return total;
}

}  // namespace detail

// Total mass of the even bins (no logical flip). cutoff_override > 0 forces a
// specific truncation radius; used to certify convergence.
inline double gkp_even_mass(double sigma, double spacing, long cutoff_override = 0) {
    if (!(spacing > 0.0)) throw std::invalid_argument("gkp_even_mass: spacing must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("gkp_even_mass: sigma must be >= 0");
    const long cutoff =
        cutoff_override > 0 ? cutoff_override : detail::gkp_bin_cutoff(sigma, spacing);
    return detail::parity_mass(sigma, spacing, true, cutoff);
}

inline double gkp_odd_mass(double sigma, double spacing, long cutoff_override = 0) {
    if (!(spacing > 0.0)) throw std::invalid_argument("gkp_odd_mass: spacing must be > 0");
    if (sigma < 0.0) throw std::invalid_argument("gkp_odd_mass: sigma must be >= 0");
    const long cutoff =
        cutoff_override > 0 ? cutoff_override : detail::gkp_bin_cutoff(sigma, spacing);
    return detail::parity_mass(sigma, spacing, false, cutoff);
}

struct GkpOutcome {
    double success;  // no logical error
    double px;       // X flip only
    double pz;       // Z flip only
    double py;       // both
};

inline GkpOutcome gkp_error_probs(double aspect_ratio, double sigma_x, double sigma_p) {
    if (!(aspect_ratio > 0.0))
        throw std::invalid_argument("gkp_error_probs: aspect ratio must be > 0");
    const double sx = std::sqrt(pi / aspect_ratio);
    const double sp = std::sqrt(pi * aspect_ratio);
    const double ax = gkp_even_mass(sigma_x, sx);
    const double ap = gkp_even_mass(sigma_p, sp);
    return {ax * ap, (1.0 - ax) * ap, (1.0 - ap) * ax, (1.0 - ax) * (1.0 - ap)};
}

// ---------------------------------------------------------------------------
// Squeezing -> displacement spread
// ---------------------------------------------------------------------------

enum class NoiseModel { gate_noise, resource_only };
enum class SpikeConvention { half_shot, full_shot };

// The convention under which each model reproduces its published operating
// points; both conventions remain selectable everywhere.
inline SpikeConvention default_convention(NoiseModel model) {
    return model == NoiseModel::gate_noise ? SpikeConvention::half_shot
                                           : SpikeConvention::full_shot;
}

struct QuadratureSigmas {
    double sigma_x;
    double sigma_p;
};

// Effective displacement spread after one lattice gate at the given
// squeezing. Under half_shot the three segments contribute
//   e^{-2r}/2 (input spike) + N_q sech(2r)/2 (gate) + e^{-2r}/2 (output),
// with N_q the gate noise factor of the matching quadrature; full_shot
// doubles every segment. resource_only replaces the gate segment by a bare
// e^{-2r} spike (half: /2), giving 3 e^{-2r} (full) or 3 e^{-2r}/2 (half).
inline QuadratureSigmas quadrature_sigmas(NoiseModel model, double squeezing_db,
                                          SpikeConvention convention) {
    if (!(squeezing_db > 0.0))
        throw std::invalid_argument("quadrature_sigmas: squeezing_db must be positive");
    const double r = db_to_r(squeezing_db);
    const double delta = std::exp(-2.0 * r);
    const double scale = (convention == SpikeConvention::half_shot) ? 0.5 : 1.0;
    if (model == NoiseModel::resource_only) {
        const double s2 = 3.0 * delta * scale;
        return {std::sqrt(s2), std::sqrt(s2)};
    }
    const double sech = 1.0 / std::cosh(2.0 * r);
    const auto nf = gate_noise_factors(r);
    const double sx2 = scale * (2.0 * delta + nf.nx * sech);
    const double sp2 = scale * (2.0 * delta + nf.np * sech);
    return {std::sqrt(sx2), std::sqrt(sp2)};
}

inline QuadratureSigmas quadrature_sigmas(NoiseModel model, double squeezing_db) {
    return quadrature_sigmas(model, squeezing_db, default_convention(model));
}

inline std::string to_string(NoiseModel m) {
    return m == NoiseModel::gate_noise ? "gate-noise" : "resource-only";
}
inline std::string to_string(SpikeConvention c) {
    return c == SpikeConvention::half_shot ? "half-shot" : "full-shot";
}

}  // namespace cvqc
