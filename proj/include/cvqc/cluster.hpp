#pragma once

// Construction and verification of a temporally multiplexed bilayer cluster
// lattice.
//
// The source emits, in every time bin k, two two-mode-squeezed pairs:
// (s10, i10) and (s01, i01), where s/i names the signal/idler beam and
// 10/01 the spatial rail. The lattice is woven from these pairs in four
// steps:
//
//   I.   K independent bins of two pairs each (4K modes in total).
//   II.  A balanced coupler mixes the two signal rails inside each bin.
//   III. The 01 rails are delayed: the signal one by a single bin, the idler
//        one by n bins (the lattice "height").
//   IV.  Balanced couplers mix the rails of each beam again; the i10 rail
//        passes a reflection (pi rotation) before its coupler.
//
// All couplers use angle -pi/4, i.e. (a, b) -> ((a+b)/sqrt2, (b-a)/sqrt2).
//
// Nullifiers: the lattice is certified through four quadrature combinations
// anchored at bin k (two x-type, two p-type). Their printed coefficient
// vectors have squared norm 4, so quoted variances are reported on the
// unit-normalized scale variance(printed)/4: vacuum inputs read 1/2 and an
// ideal lattice reads e^{-2r}/2. Half-sums of x1/x2 (and p1/p2) nullifiers
// at anchors n bins apart collapse onto a single idler mode plus signal
// corrections; their quoted variance is e^{-2r}/4.

#include <cvqc/core.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvqc {

// Quoted-variance threshold for the inseparability gate: 1/(4 sqrt 2).
inline const double vlf_threshold = 0.25 / std::numbers::sqrt2;

struct LatticeSpec {
    int n = 10;        // delay ratio: long-delay length in bins (lattice height)
    int k_bins = 24;   // number of emitted time bins K
    double squeezing_db = 10.0;
    bool wrap = false;  // periodic boundary (delays wrap modulo K)

    void validate() const {
        if (n < 2) throw std::invalid_argument("LatticeSpec: n must be >= 2");
        if (k_bins < 2 * n + 4)
            throw std::invalid_argument("LatticeSpec: k_bins must be >= 2n + 4");
        if (squeezing_db < 0.0)
            throw std::invalid_argument("LatticeSpec: squeezing_db must be >= 0");
    }
};

struct NullifierVariances {
    double x1, x2, p1, p2;  // quoted scale (variance of printed form / 4)
};

// One bipartition of the six-mode certification unit, with the best
// inseparability witness found for it. margin = rhs - lhs of the separability
// bound, so margin > 0 certifies entanglement across the cut.
struct BipartitionMargin {
    std::uint32_t mask = 0;  // bit j set <=> unit mode j on side 1
    double lhs = 0.0;        // Var(u) + Var(v) for the best witness pair
    double rhs = 0.0;        // separability bound for that pair
    double margin = 0.0;     // rhs - lhs, maximized over witness pairs
};

struct VlfResult {
    double quoted_var_x = 0.0;  // quoted Var of the x1 nullifier
    double quoted_var_p = 0.0;  // quoted Var of the p1 nullifier
    double threshold = 0.0;     // 1/(4 sqrt 2)
    bool pass = false;          // both quoted variances strictly below threshold
    std::vector<BipartitionMargin> bipartitions;  // diagnostics, 31 cuts
    double worst_margin = 0.0;  // min over bipartitions of the best margin
};

class ClusterLattice {
  public:
    explicit ClusterLattice(LatticeSpec spec) : spec_(spec), state_(build(spec)) {}

    const LatticeSpec& spec() const { return spec_; }
    const GaussianState& state() const { return state_; }

    // Printed-form nullifiers anchored at bin k, order {x1, x2, p1, p2}.
    std::array<QuadratureForm, 4> nullifier_set(int k) const {
        auto forms = make_forms(k);
        for (const auto& f : forms) require_supported(f, k);
        return forms;
    }

    // Half-sum combinations (x1 at k+n with x2 at k, likewise for p); the
    // shared idler pair at bin k+n collapses onto a single mode.
    std::pair<QuadratureForm, QuadratureForm> combined_nullifiers(int k) const {
        auto upper = make_forms(k + spec_.n);
        auto lower = make_forms(k);
        QuadratureForm cx = (upper[0] + lower[1]).scaled(0.5);
        QuadratureForm cp = (upper[2] + lower[3]).scaled(0.5);
        prune(cx);
        prune(cp);
        require_supported(cx, k);
        require_supported(cp, k);
        return {std::move(cx), std::move(cp)};
    }

  private:
    std::array<QuadratureForm, 4> make_forms(int k) const {
        const int k0 = wrap_bin(k);
        const int k1 = wrap_bin(k + 1);
        const int kn = wrap_bin(k + spec_.n);
        const double c = 1.0 / std::numbers::sqrt2;

        const ModeId i10k{Beam::idler, Rail::hg10, k0};
        const ModeId i01k{Beam::idler, Rail::hg01, k0};
        const ModeId i10n{Beam::idler, Rail::hg10, kn};
        const ModeId i01n{Beam::idler, Rail::hg01, kn};
        const ModeId s10k{Beam::signal, Rail::hg10, k0};
        const ModeId s01k{Beam::signal, Rail::hg01, k0};
        const ModeId s10k1{Beam::signal, Rail::hg10, k1};
        const ModeId s01k1{Beam::signal, Rail::hg01, k1};

        QuadratureForm x1, x2, p1, p2;
        x1.add_h(i10k, 1.0).add_h(i01k, -1.0);
        x1.add_h(s10k1, -c).add_h(s01k1, -c);
        x1.add_h(s10k, c).add_h(s01k, -c);

        x2.add_h(i10n, 1.0).add_h(i01n, 1.0);
        x2.add_h(s10k1, -c).add_h(s01k1, -c);
        x2.add_h(s10k, -c).add_h(s01k, c);

        p1.add_g(i10k, 1.0).add_g(i01k, -1.0);
        p1.add_g(s10k1, c).add_g(s01k1, c);
        p1.add_g(s10k, -c).add_g(s01k, c);

        p2.add_g(i10n, 1.0).add_g(i01n, 1.0);
        p2.add_g(s10k1, c).add_g(s01k1, c);
        p2.add_g(s10k, c).add_g(s01k, -c);

        return {x1, x2, p1, p2};
    }

  public:
    NullifierVariances nullifier_variances(int k) const {
        auto forms = nullifier_set(k);
        NullifierVariances out{};
        out.x1 = variance_of(state_, forms[0]).first / 4.0;
        out.x2 = variance_of(state_, forms[1]).first / 4.0;
        out.p1 = variance_of(state_, forms[2]).second / 4.0;
        out.p2 = variance_of(state_, forms[3]).second / 4.0;
        return out;
    }

    // Quoted variances of the half-sum combinations (vacuum reads 1/4).
    std::pair<double, double> combined_variances(int k) const {
        auto [cx, cp] = combined_nullifiers(k);
        return {variance_of(state_, cx).first / 4.0, variance_of(state_, cp).second / 4.0};
    }

    // Anchors whose full nullifier set is supported by existing modes.
    std::vector<int> interior_bins() const {
        std::vector<int> bins;
        for (int k = 0; k < spec_.k_bins; ++k) {
            if (nullifier_set_valid(k)) bins.push_back(k);
        }
        return bins;
    }

    bool nullifier_set_valid(int k) const {
        try {
            (void)nullifier_set(k);
        } catch (const std::invalid_argument&) {
            return false;
        }
        return true;
    }

    // Inseparability check at anchor k. The pass verdict uses the quoted x1
    // and p1 variances against 1/(4 sqrt 2); the 31 bipartition margins of
    // the six-mode unit are attached as diagnostics.
    VlfResult vlf_check(int k) const;

  private:
    static GaussianState build(const LatticeSpec& spec) {
        spec.validate();
        const double r = db_to_r(spec.squeezing_db);
        const int kb = spec.k_bins;

        // Step I: two squeezed pairs per bin, 4K modes, one H-graph.
        std::vector<ModeId> labels;
        std::vector<std::pair<int, int>> edges;
        labels.reserve(4 * kb);
        for (int k = 0; k < kb; ++k) {
            labels.push_back({Beam::signal, Rail::hg10, k});
            labels.push_back({Beam::idler, Rail::hg10, k});
            labels.push_back({Beam::signal, Rail::hg01, k});
            labels.push_back({Beam::idler, Rail::hg01, k});
            edges.push_back({4 * k, 4 * k + 1});
            edges.push_back({4 * k + 2, 4 * k + 3});
        }
        auto g = AdjacencyGraph::from_edges(4 * kb, edges);
        GaussianState state = covariance_of(hgraph_state(g, r), std::move(labels));

        // Step II: intra-bin coupler between the two signal rails.
        for (int k = 0; k < kb; ++k) {
            state = apply_beamsplitter(state, {Beam::signal, Rail::hg01, k},
                                       {Beam::signal, Rail::hg10, k}, pi / 4.0);
        }

        // Step III: rail delays (short on signal-01, long on idler-01).
        std::optional<int> modulus = spec.wrap ? std::optional<int>(kb) : std::nullopt;
        state = relabel_delay(state, Beam::signal, Rail::hg01, 1, modulus);
        state = relabel_delay(state, Beam::idler, Rail::hg01, spec.n, modulus);

        // Step IV: per-beam couplers wherever both rails exist; the i10 rail
        // is reflected first.
        const int last_bin = spec.wrap ? kb : kb + spec.n;
        for (int j = 0; j < last_bin; ++j) {
            const ModeId s10{Beam::signal, Rail::hg10, j};
            const ModeId s01{Beam::signal, Rail::hg01, j};
            if (state.has_mode(s10) && state.has_mode(s01))
                state = apply_beamsplitter(state, s01, s10, pi / 4.0);
        }
        for (int j = 0; j < last_bin; ++j) {
            const ModeId i10{Beam::idler, Rail::hg10, j};
            const ModeId i01{Beam::idler, Rail::hg01, j};
            if (state.has_mode(i10) && state.has_mode(i01)) {
                state = apply_rotation(state, i10, pi);
                state = apply_beamsplitter(state, i01, i10, pi / 4.0);
            }
        }
        return state;
    }

    int wrap_bin(int k) const {
        if (!spec_.wrap) return k;
        const int kb = spec_.k_bins;
        return ((k % kb) + kb) % kb;
    }

    void require_supported(const QuadratureForm& f, int anchor) const {
        for (const auto& [m, c] : f.h)
            if (!state_.has_mode(m))
                throw std::invalid_argument("nullifier anchored at bin " +
                                            std::to_string(anchor) + " needs missing mode " +
                                            to_string(m));
        for (const auto& [m, c] : f.g)
            if (!state_.has_mode(m))
                throw std::invalid_argument("nullifier anchored at bin " +
                                            std::to_string(anchor) + " needs missing mode " +
                                            to_string(m));
    }

    static void prune(QuadratureForm& f, double tol = 1e-15) {
        for (auto it = f.h.begin(); it != f.h.end();)
            it = (std::abs(it->second) < tol) ? f.h.erase(it) : std::next(it);
        for (auto it = f.g.begin(); it != f.g.end();)
            it = (std::abs(it->second) < tol) ? f.g.erase(it) : std::next(it);
    }

    LatticeSpec spec_;
    GaussianState state_;
};

inline VlfResult ClusterLattice::vlf_check(int k) const {
    auto here = make_forms(k);             // x1, p1 of anchor k are gated
    auto below = make_forms(k - spec().n);  // its x2/p2 share the idler pair at bin k
    require_supported(here[0], k);
    require_supported(here[2], k);
    require_supported(below[1], k - spec().n);
    require_supported(below[3], k - spec().n);

    VlfResult out;
    out.threshold = vlf_threshold;
    out.quoted_var_x = variance_of(state_, here[0]).first / 4.0;
    out.quoted_var_p = variance_of(state_, here[2]).second / 4.0;
    out.pass = (out.quoted_var_x < out.threshold) && (out.quoted_var_p < out.threshold);

    // Six-mode certification unit of anchor k.
    const int k0 = wrap_bin(k), k1 = wrap_bin(k + 1);
    const std::array<ModeId, 6> unit = {
        ModeId{Beam::idler, Rail::hg10, k0},  ModeId{Beam::idler, Rail::hg01, k0},
        ModeId{Beam::signal, Rail::hg10, k0}, ModeId{Beam::signal, Rail::hg01, k0},
        ModeId{Beam::signal, Rail::hg10, k1}, ModeId{Beam::signal, Rail::hg01, k1}};

    // Unit-normalized witness candidates: the two x-type nullifiers touching
    // the unit's idler pair, and their balanced sums/differences (which stay
    // unit-norm because the parents have disjoint-or-orthogonal support).
    const double inv2 = 0.5, invs2 = 1.0 / std::numbers::sqrt2;
    QuadratureForm n1 = here[0].scaled(inv2), n2 = below[1].scaled(inv2);
    QuadratureForm m1 = here[2].scaled(inv2), m2 = below[3].scaled(inv2);
    std::vector<QuadratureForm> us = {n1, n2, (n1 + n2).scaled(invs2), (n1 - n2).scaled(invs2)};
    std::vector<QuadratureForm> vs = {m1, m2, (m1 + m2).scaled(invs2), (m1 - m2).scaled(invs2)};

    std::vector<double> var_u(us.size()), var_v(vs.size());
    for (std::size_t i = 0; i < us.size(); ++i) var_u[i] = variance_of(state_, us[i]).first;
    for (std::size_t i = 0; i < vs.size(); ++i) var_v[i] = variance_of(state_, vs[i]).second;

    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask < 63; mask += 2) {  // mode 0 fixed on side 1
        BipartitionMargin best;
        best.mask = mask;
        best.margin = -std::numeric_limits<double>::infinity();
        for (std::size_t iu = 0; iu < us.size(); ++iu) {
            for (std::size_t iv = 0; iv < vs.size(); ++iv) {
                double s1 = 0.0, s2 = 0.0;
                for (int j = 0; j < 6; ++j) {
                    auto ith = us[iu].h.find(unit[j]);
                    auto itg = vs[iv].g.find(unit[j]);
                    if (ith == us[iu].h.end() || itg == vs[iv].g.end()) continue;
                    const double prod = ith->second * itg->second;
                    ((mask >> j) & 1u) ? s1 += prod : s2 += prod;
                }
                const double rhs = std::abs(s1) + std::abs(s2);
                const double lhs = var_u[iu] + var_v[iv];
                if (rhs - lhs > best.margin) {
                    best.margin = rhs - lhs;
                    best.lhs = lhs;
                    best.rhs = rhs;
                }
            }
        }
        out.worst_margin = std::min(out.worst_margin, best.margin);
        out.bipartitions.push_back(best);
    }
    return out;
}

// Smallest squeezing (in dB, to 0.01 dB) for which the lattice built with the
// given geometry passes the quoted-variance inseparability gate.
inline double min_inseparability_squeezing(int n = 10, int k_bins = 24, bool wrap = false) {
    auto passes = [&](double db) {
        ClusterLattice lattice({n, k_bins, db, wrap});
        auto v = lattice.nullifier_variances(wrap ? 0 : n);
        return v.x1 < vlf_threshold && v.p1 < vlf_threshold;
    };
    double lo = 0.0, hi = 8.0;
    if (passes(lo)) return lo;
    if (!passes(hi)) throw std::runtime_error("min_inseparability_squeezing: no pass by 8 dB");
    while (hi - lo > 0.005) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cvqc
