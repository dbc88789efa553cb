#pragma once

// Repetition-coded grid qubits: logical error rates, aspect-ratio
// optimization, and the squeezing threshold where encoding starts to pay.
//
// A length-n repetition code (n odd) majority-corrects X flips and leaves Z
// flips to parity accounting:
//   success_X = sum_{j <= (n-1)/2} C(n,j) p^j (1-p)^{n-j},
//   success_Z = (1 + (1-2p)^n) / 2.
// Because the x and p displacements are independent, the X and Z flip
// processes of the underlying grid qubits are independent too, so
//   Pe = 1 - success_X(n, 1-A_x) * success_Z(n, 1-A_p)
// holds exactly. Widening the aspect ratio R trades cheap (correctable) X
// flips for rare (uncorrectable) Z flips, so the optimal R grows with n.

#include <cvqc/gkp.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cvqc {

namespace detail {

inline void check_rep_args(int n, double p) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("repetition code length must be odd and positive");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("flip probability must lie in [0, 1]");
}

}  // namespace detail

// Probability that at most (n-1)/2 of n independent p-flips occur, i.e. the
// majority vote decodes correctly. Evaluated by a running-term recurrence on
// the binomial pmf to stay stable for large n.
inline double repetition_success_x(int n, double p) {
    detail::check_rep_args(n, p);
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    const double ratio = p / (1.0 - p);
    double term = std::pow(1.0 - p, n);
    double total = term;
    for (int j = 0; j < (n - 1) / 2; ++j) {
        term *= ratio * static_cast<double>(n - j) / static_cast<double>(j + 1);
        total += term;
    }
    return std::min(total, 1.0);
}

// Probability that an even number of n independent p-flips occur, in closed
// form via the parity-generating identity.
inline double repetition_success_z(int n, double p) {
    detail::check_rep_args(n, p);
    return 0.5 * (1.0 + std::pow(1.0 - 2.0 * p, n));
}

// Logical failure of the length-n repetition code over grid qubits with the
// given physical flip probabilities (qx for X, qz for Z).
inline double logical_error_from_flip_probs(int n, double qx, double qz) {
    return 1.0 - repetition_success_x(n, qx) * repetition_success_z(n, qz);
}

// Logical failure at one operating point: aspect-ratio-R grid qubits under
// the given displacement spread, wrapped in a length-n repetition code.
inline double logical_error(int n, double aspect_ratio, const QuadratureSigmas& sigmas) {
    const double sx = std::sqrt(pi / aspect_ratio);
    const double sp = std::sqrt(pi * aspect_ratio);
    if (!(aspect_ratio > 0.0)) throw std::invalid_argument("logical_error: aspect ratio must be > 0");
    const double qx = gkp_odd_mass(sigmas.sigma_x, sx);
    const double qz = gkp_odd_mass(sigmas.sigma_p, sp);
    return logical_error_from_flip_probs(n, qx, qz);
}

struct OptimalAspect {
    double aspect_ratio = 1.0;
    double pe = 0.0;
    bool flat = false;       // objective indistinguishable from constant
    bool saturated = false;  // optimum pinned at the scan boundary
};

// Minimize the logical error over aspect ratios in [1, 50]: coarse
// log-spaced scan, then golden-section refinement to |dR| < 1e-4.
inline OptimalAspect optimize_aspect(int n, const QuadratureSigmas& sigmas) {
    const double r_lo = 1.0, r_hi = 50.0;
    const int coarse = 81;
    auto pe_at = [&](double ratio) { return logical_error(n, ratio, sigmas); };

    std::vector<double> grid(coarse), val(coarse);
    int best = 0;
    for (int i = 0; i < coarse; ++i) {
        grid[i] = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (coarse - 1));
        val[i] = pe_at(grid[i]);
        if (val[i] < val[best]) best = i;
    }

    OptimalAspect out;
    const double spread =
        *std::max_element(val.begin(), val.end()) - *std::min_element(val.begin(), val.end());
    if (spread < 1e-14) {
        out.flat = true;
        out.aspect_ratio = 1.0;
        out.pe = val[0];
        return out;
    }

    double a = grid[std::max(0, best - 1)];
    double b = grid[std::min(coarse - 1, best + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = pe_at(x1), f2 = pe_at(x2);
    while (b - a > 1e-4) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = pe_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = pe_at(x2);
        }
    }
    out.aspect_ratio = 0.5 * (a + b);
    out.pe = pe_at(out.aspect_ratio);
    if (out.pe > val[best]) {  // refinement never worsens the coarse optimum
        out.aspect_ratio = grid[best];
        out.pe = val[best];
    }
    // The boundary is as good as the located optimum: the true optimum sits
    // on (or beyond) the edge of the scan window.
    out.saturated = (val[coarse - 1] - out.pe) < 1e-12;
    return out;
}

// Advantage of the length-n optimized code over a bare square-code qubit at
// the same operating point: Pe(encoded) - Pe(single). Negative means the
// encoding wins.
inline double encoded_minus_single(NoiseModel model, SpikeConvention convention,
                                   double squeezing_db, int n = 101) {
    const auto sig = quadrature_sigmas(model, squeezing_db, convention);
    const double single = logical_error(1, 1.0, sig);
    return optimize_aspect(n, sig).pe - single;
}

// Squeezing (dB, resolved to 0.01) above which the length-n optimized code
// beats the bare qubit and keeps beating it. In the deeply noisy regime both
// error rates saturate near their ceiling and the comparison is spurious, so
// the scan walks down from scan_hi in 0.1 dB steps to the last squeezing at
// which the encoding still loses, then bisects that bracket. Throws if the
// encoding never wins at the top of the range or never loses inside it.
inline double threshold_db(NoiseModel model, SpikeConvention convention, int n = 101,
                           double scan_lo = 2.0, double scan_hi = 25.0) {
    if (!(scan_lo > 0.0 && scan_hi > scan_lo))
        throw std::invalid_argument("threshold_db: bad scan range");
    auto f = [&](double db) { return encoded_minus_single(model, convention, db, n); };

    if (f(scan_hi) > 0.0)
        throw std::runtime_error("threshold_db: encoding still loses at the top of the scan");
    const int steps = static_cast<int>(std::floor((scan_hi - scan_lo) / 0.1));
    double hi = scan_hi;
    for (int i = 1; i <= steps; ++i) {
        const double db = scan_hi - 0.1 * i;
        if (f(db) > 0.0) {
            double lo = db;
            while (hi - lo > 0.005) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) <= 0.0 ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        hi = db;
    }
    throw std::runtime_error("threshold_db: encoding never loses inside the scan range");
}

inline double threshold_db(NoiseModel model) {
    return threshold_db(model, default_convention(model));
}

}  // namespace cvqc
