#include <catch2/catch_amalgamated.hpp>

#include <cvqc/core.hpp>

#include <cmath>
#include <vector>

using namespace cvqc;
using Catch::Approx;
using Eigen::MatrixXd;

namespace {

const ModeId m0{Beam::signal, Rail::hg10, 0};
const ModeId m1{Beam::idler, Rail::hg10, 0};
const ModeId m2{Beam::signal, Rail::hg01, 0};
const ModeId m3{Beam::idler, Rail::hg01, 0};

// Two-mode squeezing interaction graph: one edge.
AdjacencyGraph tms_graph() { return AdjacencyGraph::from_edges(2, {{0, 1}}); }

// Pre-computed anchors for r = 1/2 (so 2r = 1).
constexpr double kCosh1 = 1.5430806348152437;
constexpr double kSinh1 = 1.1752011936438014;
constexpr double kHalfExpM1 = 0.18393972058572117;  // e^{-1}/2

}  // namespace

TEST_CASE("vacuum state has unit-purity covariance I/2") {
    auto st = GaussianState::vacuum({m0, m1, m2});
    REQUIRE(st.n_modes() == 3);
    REQUIRE((st.sigma() - 0.5 * MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(st.x_variance(m1) == 0.5);
    REQUIRE(st.p_variance(m2) == 0.5);
    REQUIRE(purity_log_defect(st) < 1e-12);
}

TEST_CASE("squeezing dB conversions") {
    REQUIRE(std::exp(-2.0 * db_to_r(10.0)) == Approx(0.1).epsilon(1e-14));
    REQUIRE(r_to_db(db_to_r(7.3)) == Approx(7.3).epsilon(1e-14));
    REQUIRE(db_to_r(0.0) == 0.0);
}

TEST_CASE("adjacency graph classification") {
    SECTION("perfect matching is self-inverse and bipartite") {
        auto g = AdjacencyGraph::from_edges(4, {{0, 1}, {2, 3}});
        REQUIRE(g.self_inverse);
        REQUIRE(g.bipartite);
    }
    SECTION("4-cycle is bipartite but not self-inverse") {
        auto g = AdjacencyGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
        REQUIRE_FALSE(g.self_inverse);
        REQUIRE(g.bipartite);
    }
    SECTION("triangle is neither") {
        auto g = AdjacencyGraph::from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
        REQUIRE_FALSE(g.self_inverse);
        REQUIRE_FALSE(g.bipartite);
    }
    SECTION("validation rejects malformed matrices") {
        MatrixXd bad = MatrixXd::Zero(2, 2);
        bad(0, 1) = 0.5;
        bad(1, 0) = 0.5;
        REQUIRE_THROWS_AS(AdjacencyGraph(bad), std::invalid_argument);
        MatrixXd asym = MatrixXd::Zero(2, 2);
        asym(0, 1) = 1.0;
        REQUIRE_THROWS_AS(AdjacencyGraph(asym), std::invalid_argument);
        MatrixXd diag = MatrixXd::Identity(2, 2);
        REQUIRE_THROWS_AS(AdjacencyGraph(diag), std::invalid_argument);
        REQUIRE_THROWS_AS(AdjacencyGraph::from_edges(2, {{0, 0}}), std::invalid_argument);
    }
    SECTION("hgraph_state rejects graphs that are not self-inverse") {
        auto c4 = AdjacencyGraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
        REQUIRE_THROWS_AS(hgraph_state(c4, 0.5), std::invalid_argument);
    }
}

TEST_CASE("two-mode squeezed state matches an independent symplectic construction") {
    const double r = 0.5;
    auto st = covariance_of(hgraph_state(tms_graph(), r), {m0, m1});

    SECTION("frozen covariance entries at 2r = 1") {
        const auto& s = st.sigma();
        REQUIRE(s(0, 0) == Approx(kCosh1 / 2.0).epsilon(1e-14));
        REQUIRE(s(1, 1) == Approx(kCosh1 / 2.0).epsilon(1e-14));
        REQUIRE(s(0, 1) == Approx(kSinh1 / 2.0).epsilon(1e-14));
        REQUIRE(s(2, 2) == Approx(kCosh1 / 2.0).epsilon(1e-14));
        REQUIRE(s(2, 3) == Approx(-kSinh1 / 2.0).epsilon(1e-14));
        REQUIRE(s.topRightCorner(2, 2).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("oracle: two orthogonally squeezed vacua mixed on a balanced splitter") {
        // Mode 0 squeezed in x, mode 1 squeezed in p, combined with theta = -pi/4.
        MatrixXd s_total = beamsplitter_matrix(2, 0, 1, -pi / 4.0) * squeeze_matrix(2, 0, r) *
                           squeeze_matrix(2, 1, -r);
        MatrixXd sigma_oracle = s_total * (0.5 * MatrixXd::Identity(4, 4)) * s_total.transpose();
        REQUIRE((st.sigma() - sigma_oracle).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("difference / sum quadratures are squeezed to e^{-2r}/2") {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        QuadratureForm f;
        f.add_h(m0, inv_sqrt2).add_h(m1, -inv_sqrt2);
        f.add_g(m0, inv_sqrt2).add_g(m1, inv_sqrt2);
        auto [vu, vv] = variance_of(st, f);
        REQUIRE(vu == Approx(kHalfExpM1).epsilon(1e-13));
        REQUIRE(vv == Approx(kHalfExpM1).epsilon(1e-13));
    }

    SECTION("purity") { REQUIRE(purity_log_defect(st) < 1e-12); }
}

TEST_CASE("explicit symplectic matrices satisfy S Omega S^T = Omega") {
    const MatrixXd omega = symplectic_form(3);
    for (double angle : {0.3, -0.7, pi / 4.0, pi}) {
        MatrixXd bs = beamsplitter_matrix(3, 0, 2, angle);
        MatrixXd rot = rotation_matrix(3, 1, angle);
        MatrixXd sq = squeeze_matrix(3, 2, angle);
        REQUIRE((bs * omega * bs.transpose() - omega).cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE((rot * omega * rot.transpose() - omega).cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE((sq * omega * sq.transpose() - omega).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("beam splitters compose additively in the angle") {
        MatrixXd lhs = beamsplitter_matrix(2, 0, 1, 0.3) * beamsplitter_matrix(2, 0, 1, 0.4);
        REQUIRE((lhs - beamsplitter_matrix(2, 0, 1, 0.7)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("rotation by pi negates the mode") {
        MatrixXd rot = rotation_matrix(2, 0, pi);
        MatrixXd expect = MatrixXd::Identity(4, 4);
        expect(0, 0) = expect(2, 2) = -1.0;
        REQUIRE((rot - expect).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("in-place operations agree with full-matrix conjugation") {
    // A pure state with nonzero V exercises all covariance blocks.
    MatrixXd u(3, 3), v(3, 3);
    u << 2.0, 0.3, 0.0, 0.3, 1.5, 0.2, 0.0, 0.2, 1.0;
    v << 0.1, 0.4, -0.2, 0.4, 0.0, 0.5, -0.2, 0.5, 0.3;
    ComplexGraph z(v, u);
    REQUIRE(z.physical());
    auto st = covariance_of(z, {m0, m1, m2});
    REQUIRE(purity_log_defect(st) < 1e-10);

    SECTION("beam splitter") {
        auto moved = apply_beamsplitter(st, m0, m2, 0.7);
        MatrixXd s = beamsplitter_matrix(3, 0, 2, 0.7);
        REQUIRE((moved.sigma() - s * st.sigma() * s.transpose()).cwiseAbs().maxCoeff() < 1e-13);
        REQUIRE(purity_log_defect(moved) < 1e-10);
    }
    SECTION("rotation") {
        auto moved = apply_rotation(st, m1, -1.1);
        MatrixXd s = rotation_matrix(3, 1, -1.1);
        REQUIRE((moved.sigma() - s * st.sigma() * s.transpose()).cwiseAbs().maxCoeff() < 1e-13);
        REQUIRE(purity_log_defect(moved) < 1e-10);
    }
    SECTION("operations return copies and leave the input untouched") {
        MatrixXd before = st.sigma();
        (void)apply_beamsplitter(st, m0, m1, 0.5);
        (void)apply_rotation(st, m2, 0.5);
        REQUIRE((st.sigma() - before).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("unknown modes are rejected") {
        const ModeId ghost{Beam::idler, Rail::hg01, 99};
        REQUIRE_THROWS_AS(apply_rotation(st, ghost, 0.1), std::invalid_argument);
        REQUIRE_THROWS_AS(apply_beamsplitter(st, m0, ghost, 0.1), std::invalid_argument);
        REQUIRE_THROWS_AS(apply_beamsplitter(st, m0, m0, 0.1), std::invalid_argument);
    }
}

TEST_CASE("rotating every mode by pi/4 turns an H-graph state into a cluster state") {
    // Z = i e^{-2rG} maps to Z' = tanh(2r) G + i sech(2r) I under a global
    // quarter rotation; this exact equivalence pins both the rotation sign
    // convention and the covariance reconstruction.
    const double r = 0.62;
    for (int n_pairs : {1, 2}) {
        std::vector<std::pair<int, int>> edges;
        std::vector<ModeId> labels;
        for (int k = 0; k < n_pairs; ++k) {
            edges.push_back({2 * k, 2 * k + 1});
            labels.push_back({Beam::signal, Rail::hg10, k});
            labels.push_back({Beam::idler, Rail::hg10, k});
        }
        auto g = AdjacencyGraph::from_edges(2 * n_pairs, edges);
        auto st = covariance_of(hgraph_state(g, r), labels);
        for (const auto& m : labels) st = apply_rotation(st, m, pi / 4.0);

        const int n = 2 * n_pairs;
        ComplexGraph cluster(std::tanh(2.0 * r) * g.entries,
                             (1.0 / std::cosh(2.0 * r)) * Eigen::MatrixXd::Identity(n, n));
        auto expect = covariance_of(cluster, labels);
        REQUIRE((st.sigma() - expect.sigma()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("covariance_of rejects unphysical graphs") {
    MatrixXd u = MatrixXd::Identity(2, 2);
    u(1, 1) = -1.0;
    REQUIRE_THROWS_AS(covariance_of(ComplexGraph(MatrixXd::Zero(2, 2), u), {m0, m1}),
                      std::invalid_argument);
    MatrixXd asym = MatrixXd::Identity(2, 2);
    asym(0, 1) = 0.3;
    REQUIRE_THROWS_AS(covariance_of(ComplexGraph(asym, MatrixXd::Identity(2, 2)), {m0, m1}),
                      std::invalid_argument);
}

TEST_CASE("relabel_delay retimes one rail and nothing else") {
    auto st = covariance_of(hgraph_state(tms_graph(), 0.4),
                            {ModeId{Beam::signal, Rail::hg01, 0}, ModeId{Beam::idler, Rail::hg01, 0}});
    MatrixXd before = st.sigma();

    auto moved = relabel_delay(st, Beam::idler, Rail::hg01, 3);
    REQUIRE(moved.has_mode({Beam::idler, Rail::hg01, 3}));
    REQUIRE_FALSE(moved.has_mode({Beam::idler, Rail::hg01, 0}));
    REQUIRE(moved.has_mode({Beam::signal, Rail::hg01, 0}));
    REQUIRE((moved.sigma() - before).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(moved.mode_index({Beam::idler, Rail::hg01, 3}) ==
            st.mode_index({Beam::idler, Rail::hg01, 0}));

    SECTION("wrap modulus folds the bin index") {
        auto wrapped = relabel_delay(st, Beam::idler, Rail::hg01, 5, 4);
        REQUIRE(wrapped.has_mode({Beam::idler, Rail::hg01, 1}));
    }
    SECTION("negative shifts are rejected") {
        REQUIRE_THROWS_AS(relabel_delay(st, Beam::idler, Rail::hg01, -1), std::invalid_argument);
    }
    SECTION("label collisions after wrapping are detected") {
        auto two = tensor(GaussianState::vacuum({ModeId{Beam::signal, Rail::hg01, 0}}),
                          GaussianState::vacuum({ModeId{Beam::signal, Rail::hg01, 2}}));
        REQUIRE_THROWS_AS(relabel_delay(two, Beam::signal, Rail::hg01, 1, 2),
                          std::invalid_argument);
    }
}

TEST_CASE("tensor product stacks covariance blocks and preserves label order") {
    auto tms = covariance_of(hgraph_state(tms_graph(), 0.5), {m0, m1});
    auto vac = GaussianState::vacuum({m2, m3});
    auto joint = tensor(tms, vac);

    REQUIRE(joint.n_modes() == 4);
    REQUIRE(joint.labels() == std::vector<ModeId>{m0, m1, m2, m3});
    REQUIRE(joint.x_variance(m0) == Approx(kCosh1 / 2.0).epsilon(1e-14));
    REQUIRE(joint.x_variance(m2) == 0.5);
    REQUIRE(joint.sigma()(0, 1) == Approx(kSinh1 / 2.0).epsilon(1e-14));
    REQUIRE(joint.sigma()(0, 2) == 0.0);
    REQUIRE(purity_log_defect(joint) < 1e-12);

    SECTION("duplicate labels across factors are rejected") {
        REQUIRE_THROWS_AS(tensor(tms, tms), std::invalid_argument);
    }
}

TEST_CASE("variance_of evaluates literal printed-form combinations") {
    const double r = 0.5;
    auto st = covariance_of(hgraph_state(tms_graph(), r), {m0, m1});
    QuadratureForm f;
    f.add_h(m0, 1.0).add_h(m1, -1.0);
    f.add_g(m0, 1.0).add_g(m1, 1.0);
    auto [vu, vv] = variance_of(st, f);
    REQUIRE(vu == Approx(std::exp(-2.0 * r)).epsilon(1e-13));
    REQUIRE(vv == Approx(std::exp(-2.0 * r)).epsilon(1e-13));
    REQUIRE(f.norm_sq() == Approx(4.0));

    SECTION("forms over absent modes throw") {
        QuadratureForm bad;
        bad.add_h({Beam::signal, Rail::hg01, 7}, 1.0);
        REQUIRE_THROWS_AS(variance_of(st, bad), std::invalid_argument);
    }
    SECTION("form arithmetic") {
        QuadratureForm a, b;
        a.add_h(m0, 1.0);
        b.add_h(m0, 0.5).add_g(m1, 2.0);
        auto sum = (a + b).scaled(2.0);
        REQUIRE(sum.h.at(m0) == Approx(3.0));
        REQUIRE(sum.g.at(m1) == Approx(4.0));
        auto diff = a - a;
        REQUIRE(diff.norm_sq() == 0.0);
    }
}

TEST_CASE("purity defect flags mixed states") {
    GaussianState thermal({m0}, Eigen::MatrixXd::Identity(2, 2));
    REQUIRE(purity_log_defect(thermal) == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}
