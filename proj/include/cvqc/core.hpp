#pragma once

// Gaussian-state engine for temporally multiplexed two-beam optical setups.
//
// Conventions, fixed once for the whole library:
//   * hbar = 1 and the vacuum variance is Var(x) = Var(p) = 1/2.
//   * Covariance matrices use xxpp ordering: for n modes, rows [0, n) are x
//     quadratures and rows [n, 2n) are p quadratures, so
//     Sigma = [[Sxx, Sxp], [Sxp^T, Spp]] and the symplectic form is
//     Omega = [[0, I], [-I, 0]].
//   * A beam splitter of angle theta acts on an ordered mode pair (a, b) as
//     the rotation [[cos, -sin], [sin, cos]], applied identically to the x
//     and p blocks; theta = +-pi/4 realises (a -+ b)/sqrt(2).
//   * A phase rotation of angle phi mixes (x_a, p_a) with the same 2x2
//     rotation; phi = pi/2 exchanges x and p up to sign, phi = pi negates
//     the mode.
//   * Squeezing quoted in dB refers to the quadrature noise reduction of a
//     single squeezed mode: db = -10*log10(e^{-2r}), so 10 dB <=> e^{-2r} = 0.1.
//
// A Gaussian pure state is described by its complex adjacency matrix
// Z = V + iU (U symmetric positive definite); the wavefunction is
// psi(x) ~ exp(i x^T Z x / 2) and the covariance matrix follows as
//   Sxx = U^{-1}/2,  Sxp = U^{-1} V / 2,  Spp = (U + V U^{-1} V)/2.

#include <Eigen/Dense>

#include <cmath>
#include <compare>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvqc {

inline constexpr double pi = std::numbers::pi;

// dB of squeezing -> squeezing parameter r, via e^{-2r} = 10^{-db/10}.
inline double db_to_r(double db) { return db * std::numbers::ln10 / 20.0; }
inline double r_to_db(double r) { return 20.0 * r / std::numbers::ln10; }

// ---------------------------------------------------------------------------
// Mode labels
// ---------------------------------------------------------------------------

enum class Beam { idler, signal };
enum class Rail { hg10, hg01 };  // spatial Hermite-Gauss mode of the beam

struct ModeId {
    Beam beam;
    Rail rail;
    int timebin;

    friend auto operator<=>(const ModeId&, const ModeId&) = default;
};

inline std::string to_string(const ModeId& m) {
    std::string s = (m.beam == Beam::idler) ? "i" : "s";
    s += (m.rail == Rail::hg10) ? "10" : "01";
    s += "@" + std::to_string(m.timebin);
    return s;
}

// ---------------------------------------------------------------------------
// Graph descriptions of Gaussian pure states
// ---------------------------------------------------------------------------

// Unweighted interaction graph of a two-mode-squeezing Hamiltonian.
// Entries are 0/1, symmetric, zero diagonal.
struct AdjacencyGraph {
    Eigen::MatrixXd entries;
    bool self_inverse = false;  // G * G == I
    bool bipartite = false;     // vertex set splits into two independent sets

    explicit AdjacencyGraph(Eigen::MatrixXd g) : entries(std::move(g)) {
        const auto n = entries.rows();
        if (entries.cols() != n)
            throw std::invalid_argument("AdjacencyGraph: matrix must be square");
        for (Eigen::Index i = 0; i < n; ++i) {
            if (entries(i, i) != 0.0)
                throw std::invalid_argument("AdjacencyGraph: diagonal must be zero");
            for (Eigen::Index j = 0; j < n; ++j) {
                const double v = entries(i, j);
                if (v != 0.0 && v != 1.0)
                    throw std::invalid_argument("AdjacencyGraph: entries must be 0 or 1");
                if (v != entries(j, i))
                    throw std::invalid_argument("AdjacencyGraph: matrix must be symmetric");
            }
        }
        self_inverse = (entries * entries - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0;
        bipartite = check_bipartite();
    }

    static AdjacencyGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
        for (auto [a, b] : edges) {
            if (a < 0 || b < 0 || a >= n || b >= n || a == b)
                throw std::invalid_argument("AdjacencyGraph: bad edge");
            g(a, b) = g(b, a) = 1.0;
        }
        return AdjacencyGraph(std::move(g));
    }

    int n() const { return static_cast<int>(entries.rows()); }

  private:
    // Two-coloring by breadth-first search over every connected component.
    bool check_bipartite() const {
        const int n = this->n();
        std::vector<int> color(n, -1);
        std::vector<int> queue;
        for (int start = 0; start < n; ++start) {
            if (color[start] != -1) continue;
            color[start] = 0;
            queue.assign(1, start);
            while (!queue.empty()) {
                const int v = queue.back();
                queue.pop_back();
                for (int w = 0; w < n; ++w) {
                    if (entries(v, w) == 0.0) continue;
                    if (color[w] == -1) {
                        color[w] = 1 - color[v];
                        queue.push_back(w);
                    } else if (color[w] == color[v]) {
                        return false;
                    }
                }
            }
        }
        return true;
    }
};

// Complex adjacency matrix Z = V + iU of a Gaussian pure state.
struct ComplexGraph {
    Eigen::MatrixXd V;  // real part (correlation weights)
    Eigen::MatrixXd U;  // imaginary part, positive definite

    ComplexGraph(Eigen::MatrixXd v, Eigen::MatrixXd u) : V(std::move(v)), U(std::move(u)) {
        if (V.rows() != V.cols() || U.rows() != U.cols() || V.rows() != U.rows())
            throw std::invalid_argument("ComplexGraph: V and U must be square and same size");
    }

    int n() const { return static_cast<int>(U.rows()); }

    // Symmetry of both parts plus positive definiteness of U.
    bool physical(double tol = 1e-10) const {
        if ((U - U.transpose()).cwiseAbs().maxCoeff() > tol) return false;
        if ((V - V.transpose()).cwiseAbs().maxCoeff() > tol) return false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff() > tol;
    }
};

// H-graph state of squeezing parameter r over interaction graph G:
//   Z = i cosh(2r) I - i sinh(2r) G,
// i.e. V = 0 and U = cosh(2r) I - sinh(2r) G. Requires G self-inverse and
// bipartite so that U stays positive definite (eigenvalues e^{+-2r}).
inline ComplexGraph hgraph_state(const AdjacencyGraph& g, double r) {
    if (!g.self_inverse)
        throw std::invalid_argument("hgraph_state: graph must be self-inverse (G*G = I)");
    if (!g.bipartite)
        throw std::invalid_argument("hgraph_state: graph must be bipartite");
    if (r < 0.0)
        throw std::invalid_argument("hgraph_state: r must be non-negative");
    const int n = g.n();
    Eigen::MatrixXd u =
        std::cosh(2.0 * r) * Eigen::MatrixXd::Identity(n, n) - std::sinh(2.0 * r) * g.entries;
    return ComplexGraph(Eigen::MatrixXd::Zero(n, n), std::move(u));
}

// ---------------------------------------------------------------------------
// Gaussian states
// ---------------------------------------------------------------------------

class GaussianState {
  public:
    GaussianState(std::vector<ModeId> labels, Eigen::MatrixXd sigma)
        : labels_(std::move(labels)), sigma_(std::move(sigma)) {
        const int n = static_cast<int>(labels_.size());
        if (sigma_.rows() != 2 * n || sigma_.cols() != 2 * n)
            throw std::invalid_argument("GaussianState: covariance must be 2n x 2n");
        rebuild_index();
    }

    static GaussianState vacuum(std::vector<ModeId> labels) {
        const int n = static_cast<int>(labels.size());
        return GaussianState(std::move(labels), 0.5 * Eigen::MatrixXd::Identity(2 * n, 2 * n));
    }

    int n_modes() const { return static_cast<int>(labels_.size()); }
    const std::vector<ModeId>& labels() const { return labels_; }
    const Eigen::MatrixXd& sigma() const { return sigma_; }

    bool has_mode(const ModeId& m) const { return index_.count(m) != 0; }

    int mode_index(const ModeId& m) const {
        auto it = index_.find(m);
        if (it == index_.end())
            throw std::invalid_argument("GaussianState: unknown mode " + to_string(m));
        return it->second;
    }

    double x_variance(const ModeId& m) const {
        const int i = mode_index(m);
        return sigma_(i, i);
    }
    double p_variance(const ModeId& m) const {
        const int i = mode_index(m) + n_modes();
        return sigma_(i, i);
    }

    // In-place helpers used by the operation functions below.
    Eigen::MatrixXd& mutable_sigma() { return sigma_; }
    void set_labels(std::vector<ModeId> labels) {
        if (static_cast<int>(labels.size()) != n_modes())
            throw std::invalid_argument("GaussianState: label count mismatch");
        labels_ = std::move(labels);
        rebuild_index();
    }

  private:
    void rebuild_index() {
        index_.clear();
        for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
            if (!index_.emplace(labels_[i], i).second)
                throw std::invalid_argument("GaussianState: duplicate mode label " +
                                            to_string(labels_[i]));
        }
    }

    std::vector<ModeId> labels_;
    Eigen::MatrixXd sigma_;  // xxpp ordering
    std::map<ModeId, int> index_;
};

// Covariance matrix of the pure state described by Z = V + iU.
inline GaussianState covariance_of(const ComplexGraph& z, std::vector<ModeId> labels) {
    const int n = z.n();
    if (static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("covariance_of: label count must match graph size");
    if (!z.physical())
        throw std::invalid_argument("covariance_of: U must be symmetric positive definite");
    Eigen::LLT<Eigen::MatrixXd> llt(z.U);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("covariance_of: U is not positive definite");
    const Eigen::MatrixXd uinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd sigma(2 * n, 2 * n);
    sigma.topLeftCorner(n, n) = 0.5 * uinv;
    sigma.topRightCorner(n, n) = 0.5 * uinv * z.V;
    sigma.bottomLeftCorner(n, n) = sigma.topRightCorner(n, n).transpose();
    sigma.bottomRightCorner(n, n) = 0.5 * (z.U + z.V * uinv * z.V);
    // Symmetrize to wash out round-off from the solves.
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return GaussianState(std::move(labels), std::move(sigma));
}

// ---------------------------------------------------------------------------
// Symplectic operations
// ---------------------------------------------------------------------------

namespace detail {

// Sigma <- S Sigma S^T where S is a plane rotation of rows (i, j):
// row_i' = c row_i - s row_j, row_j' = s row_i + c row_j.
inline void conjugate_pair_rotation(Eigen::MatrixXd& m, int i, int j, double c, double s) {
    Eigen::RowVectorXd ri = m.row(i), rj = m.row(j);
    m.row(i) = c * ri - s * rj;
    m.row(j) = s * ri + c * rj;
    Eigen::VectorXd ci = m.col(i), cj = m.col(j);
    m.col(i) = c * ci - s * cj;
    m.col(j) = s * ci + c * cj;
}

}  // namespace detail

// Beam splitter of angle theta on ordered pair (a, b); x and p blocks rotate
// identically, so the operation is passive (photon-number preserving).
inline GaussianState apply_beamsplitter(const GaussianState& state, const ModeId& a,
                                        const ModeId& b, double theta) {
    if (a == b) throw std::invalid_argument("apply_beamsplitter: modes must differ");
    const int n = state.n_modes();
    const int ia = state.mode_index(a), ib = state.mode_index(b);
    GaussianState out = state;
    const double c = std::cos(theta), s = std::sin(theta);
    detail::conjugate_pair_rotation(out.mutable_sigma(), ia, ib, c, s);
    detail::conjugate_pair_rotation(out.mutable_sigma(), n + ia, n + ib, c, s);
    return out;
}

// Phase rotation of angle phi on mode a: (x_a, p_a) rotate into each other.
inline GaussianState apply_rotation(const GaussianState& state, const ModeId& a, double phi) {
    const int n = state.n_modes();
    const int ia = state.mode_index(a);
    GaussianState out = state;
    detail::conjugate_pair_rotation(out.mutable_sigma(), ia, n + ia, std::cos(phi), std::sin(phi));
    return out;
}

// Retimes every (beam, rail) mode by +delta time bins; purely a relabeling.
// With a wrap modulus K the new bin is (k + delta) mod K, otherwise unbounded.
inline GaussianState relabel_delay(const GaussianState& state, Beam beam, Rail rail, int delta,
                                   std::optional<int> wrap_modulus = std::nullopt) {
    if (delta < 0) throw std::invalid_argument("relabel_delay: delta must be non-negative");
    if (wrap_modulus && *wrap_modulus <= 0)
        throw std::invalid_argument("relabel_delay: wrap modulus must be positive");
    std::vector<ModeId> labels = state.labels();
    for (auto& m : labels) {
        if (m.beam != beam || m.rail != rail) continue;
        m.timebin += delta;
        if (wrap_modulus) m.timebin = ((m.timebin % *wrap_modulus) + *wrap_modulus) % *wrap_modulus;
    }
    GaussianState out = state;
    out.set_labels(std::move(labels));
    return out;
}

// Tensor product, keeping label order (a's modes first).
inline GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const int na = a.n_modes(), nb = b.n_modes(), n = na + nb;
    std::vector<ModeId> labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    const auto& sa = a.sigma();
    const auto& sb = b.sigma();
    sigma.block(0, 0, na, na) = sa.topLeftCorner(na, na);
    sigma.block(na, na, nb, nb) = sb.topLeftCorner(nb, nb);
    sigma.block(n, n, na, na) = sa.bottomRightCorner(na, na);
    sigma.block(n + na, n + na, nb, nb) = sb.bottomRightCorner(nb, nb);
    sigma.block(0, n, na, na) = sa.topRightCorner(na, na);
    sigma.block(na, n + na, nb, nb) = sb.topRightCorner(nb, nb);
    sigma.block(n, 0, na, na) = sa.bottomLeftCorner(na, na);
    sigma.block(n + na, na, nb, nb) = sb.bottomLeftCorner(nb, nb);
    return GaussianState(std::move(labels), std::move(sigma));
}

// ---------------------------------------------------------------------------
// Quadrature forms and variances
// ---------------------------------------------------------------------------

// Linear quadrature combination pair u = sum h_j x_j, v = sum g_j p_j.
struct QuadratureForm {
    std::map<ModeId, double> h;  // x coefficients
    std::map<ModeId, double> g;  // p coefficients

    QuadratureForm& add_h(const ModeId& m, double c) {
        h[m] += c;
        return *this;
    }
    QuadratureForm& add_g(const ModeId& m, double c) {
        g[m] += c;
        return *this;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [m, c] : h) s += c * c;
        for (const auto& [m, c] : g) s += c * c;
        return s;
    }

    QuadratureForm scaled(double c) const {
        QuadratureForm out = *this;
        for (auto& [m, v] : out.h) v *= c;
        for (auto& [m, v] : out.g) v *= c;
        return out;
    }

    friend QuadratureForm operator+(const QuadratureForm& a, const QuadratureForm& b) {
        QuadratureForm out = a;
        for (const auto& [m, c] : b.h) out.h[m] += c;
        for (const auto& [m, c] : b.g) out.g[m] += c;
        return out;
    }
    friend QuadratureForm operator-(const QuadratureForm& a, const QuadratureForm& b) {
        return a + b.scaled(-1.0);
    }
};

// Variances (Var u, Var v) of the form on the state: h^T Sxx h and g^T Spp g.
inline std::pair<double, double> variance_of(const GaussianState& state,
                                             const QuadratureForm& form) {
    const int n = state.n_modes();
    double var_u = 0.0, var_v = 0.0;
    const auto& sigma = state.sigma();
    for (const auto& [ma, ca] : form.h) {
        const int ia = state.mode_index(ma);
        for (const auto& [mb, cb] : form.h) var_u += ca * cb * sigma(ia, state.mode_index(mb));
    }
    for (const auto& [ma, ca] : form.g) {
        const int ia = n + state.mode_index(ma);
        for (const auto& [mb, cb] : form.g) var_v += ca * cb * sigma(ia, n + state.mode_index(mb));
    }
    return {var_u, var_v};
}

// |log det(2 Sigma)|; zero for a pure state. Evaluated in log space so large
// registers do not overflow.
inline double purity_log_defect(const GaussianState& state) {
    Eigen::MatrixXd m = 2.0 * state.sigma();
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("purity_log_defect: covariance not positive definite");
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < m.rows(); ++i) logdet += 2.0 * std::log(l(i, i));
    return std::abs(logdet);
}

// ---------------------------------------------------------------------------
// Explicit symplectic matrices (used by property tests)
// ---------------------------------------------------------------------------

inline Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return omega;
}

inline Eigen::MatrixXd beamsplitter_matrix(int n, int ia, int ib, double theta) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double c = std::cos(theta), sn = std::sin(theta);
    for (int off : {0, n}) {
        s(off + ia, off + ia) = c;
        s(off + ia, off + ib) = -sn;
        s(off + ib, off + ia) = sn;
        s(off + ib, off + ib) = c;
    }
    return s;
}

inline Eigen::MatrixXd rotation_matrix(int n, int ia, double phi) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const double c = std::cos(phi), sn = std::sin(phi);
    s(ia, ia) = c;
    s(ia, n + ia) = -sn;
    s(n + ia, ia) = sn;
    s(n + ia, n + ia) = c;
    return s;
}

inline Eigen::MatrixXd squeeze_matrix(int n, int ia, double r) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    s(ia, ia) = std::exp(-r);
    s(n + ia, n + ia) = std::exp(r);
    return s;
}

}  // namespace cvqc
