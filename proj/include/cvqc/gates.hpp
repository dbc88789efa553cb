#pragma once

// Measurement-based two-qubit gate schedules on the bilayer lattice, and the
// residual Gaussian noise they imprint on the logical quadratures.
//
// A gate consumes a six-site wire segment plus a control register. The wire
// is measured at fixed angles; the final pair of angles is steered by the
// gate weight g. Byproduct phases that a downstream decoder would undo are
// reported but never applied here.
//
// Noise accounting: with t = tanh(2r) the teleportation chain multiplies the
// residual cluster noise by
//   Nx = (5/2) (t^-4 + t^-2),   Np = (5/2) (t^2 + 1),
// so Nx = Np / t^4 >= Np, Nx falls toward 5 and Np rises toward 5 as the
// squeezing grows. The per-quadrature budget in dB stacks the resource
// squeezing, the cluster-quality term sech(2r), and these gate factors.

#include <cvqc/core.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace cvqc {

enum class GateKind { cz, cx };

struct GateAngles {
    std::array<double, 6> wire;       // measurement angles along the wire
    double control;                   // control-register angle, alternating by bin parity
    std::array<double, 2> byproduct;  // corrective phases (recorded, not applied)
};

// Measurement schedule for a weight-g gate anchored at bin k.
inline GateAngles gate_angles(GateKind kind, double g, int k) {
    if (!(g > 0.0)) throw std::invalid_argument("gate_angles: weight g must be positive");
    const double sgn = (kind == GateKind::cz) ? 1.0 : -1.0;
    const double steer = std::atan(2.0 / g);
    GateAngles out{};
    out.wire = {-pi / 8.0, 3.0 * pi / 8.0, -pi / 8.0, 3.0 * pi / 8.0, pi / 4.0 + sgn * steer,
                pi / 4.0 - sgn * steer};
    out.control = ((k % 2 == 0) ? 1.0 : -1.0) * pi / 4.0;
    out.byproduct = (kind == GateKind::cz) ? std::array<double, 2>{-3.0 * pi / 4.0, pi / 4.0}
                                           : std::array<double, 2>{3.0 * pi / 4.0, -pi / 4.0};
    return out;
}

// Linear response of the four output quadratures (x1, x2, p1, p2) to the
// eight measurement-noise channels, with Gamma = tanh(2r)/sqrt(2).
inline Eigen::Matrix<double, 4, 8> gate_noise_matrix(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("gate_noise_matrix: r must be positive");
    const double gam = std::tanh(2.0 * r) / std::numbers::sqrt2;
    const double s2 = std::numbers::sqrt2;
    const double g2 = gam * gam;
    Eigen::Matrix<double, 4, 8> e;
    e.row(0) << -s2 / g2, s2 / (2.0 * g2), -3.0 * s2 / (4.0 * gam), -s2 / (4.0 * gam), -1.0 / gam,
        -1.0 / (2.0 * gam), 0.0, 0.0;
    e.row(1) << -s2 / (2.0 * g2), s2 / g2, 3.0 * s2 / (4.0 * gam), -s2 / (4.0 * gam),
        -1.0 / (2.0 * gam), -1.0 / gam, 0.0, 0.0;
    e.row(2) << 0.0, -s2 / 2.0, s2 * gam / 4.0, s2 * gam / 4.0, -gam, gam / 2.0, s2, 0.0;
    e.row(3) << s2 / 2.0, 0.0, -s2 * gam / 4.0, s2 * gam / 4.0, gam / 2.0, -gam, 0.0, s2;
    return e;
}

struct NoiseFactors {
    double nx;  // x-quadrature amplification of the residual cluster noise
    double np;  // p-quadrature amplification
};

inline NoiseFactors gate_noise_factors(double r) {
    if (!(r > 0.0)) throw std::invalid_argument("gate_noise_factors: r must be positive");
    const double t2 = std::tanh(2.0 * r) * std::tanh(2.0 * r);
    return {2.5 * (1.0 / (t2 * t2) + 1.0 / t2), 2.5 * (t2 + 1.0)};
}

// Squeezing budget, all entries in dB (larger = quieter).
struct NoiseBudget {
    double resource_db;    // -10 log10 e^{-2r}: the raw squeezer quality
    double cluster_db;     // -10 log10 sech(2r): lattice nullifier quality
    double residual_x_db;  // -10 log10 (Nx sech 2r): after the gate, x side
    double residual_p_db;  // -10 log10 (Np sech 2r): after the gate, p side
};

inline NoiseBudget noise_budget(double squeezing_db) {
    if (!(squeezing_db > 0.0))
        throw std::invalid_argument("noise_budget: squeezing_db must be positive");
    const double r = db_to_r(squeezing_db);
    const double sech = 1.0 / std::cosh(2.0 * r);
    const auto nf = gate_noise_factors(r);
    NoiseBudget out{};
    out.resource_db = squeezing_db;
    out.cluster_db = -10.0 * std::log10(sech);
    out.residual_x_db = -10.0 * std::log10(nf.nx * sech);
    out.residual_p_db = -10.0 * std::log10(nf.np * sech);
    return out;
}

}  // namespace cvqc
