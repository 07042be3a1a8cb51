#include "support.hpp"

#include <gtest/gtest.h>

using namespace relutopo;
using support::make_net;

namespace {

ReluNetwork simplex() { return load_network(support::sample_path("simplex.json")); }

// F = 1 - relu(x) - relu(y) - relu(-x - y): a pyramid peaking at the origin.
ReluNetwork pyramid() { return make_net({2, 3, 1}, {{{1, 0}, {0, 1}, {-1, -1}}, {{-1, -1, -1}}}, {{0, 0, 0}, {1}}); }

TEST(Topology, SimplexSublevelSetIsBounded) {
    auto topo = decision_topology(simplex(), Rational(1, 4));
    ASSERT_EQ(topo[Region::N].components.size(), 1u);
    EXPECT_TRUE(topo[Region::N].components[0].bounded);
    ASSERT_EQ(topo[Region::B].components.size(), 1u);
    EXPECT_TRUE(topo[Region::B].components[0].bounded);
    ASSERT_EQ(topo[Region::Y].components.size(), 1u);
    EXPECT_FALSE(topo[Region::Y].components[0].bounded);
}

TEST(Topology, ThresholdAboveTheMaximumLeavesOnlyN) {
    auto topo = decision_topology(pyramid(), 2);
    EXPECT_TRUE(topo[Region::Y].empty());
    EXPECT_TRUE(topo[Region::B].empty());
    ASSERT_EQ(topo[Region::N].components.size(), 1u);
    EXPECT_FALSE(topo[Region::N].components[0].bounded);
}

TEST(Topology, PyramidSuperlevelSetIsBounded) {
    auto topo = decision_topology(pyramid(), Rational(1, 2));
    ASSERT_EQ(topo[Region::Y].components.size(), 1u);
    EXPECT_TRUE(topo[Region::Y].components[0].bounded);
    EXPECT_EQ(topo[Region::N].bounded_count(), 0u);
}

TEST(Topology, NontransversalThresholdIsRejected) {
    auto net = simplex();
    try {
        decision_topology(net, 0);
        FAIL() << "expected NonTransversalThreshold";
    } catch (const NonTransversalThreshold& e) {
        EXPECT_EQ(e.threshold, Rational(0));
        EXPECT_EQ(e.nontransversal, nontransversal_thresholds(net));
    }
}

TEST(Topology, ComponentsPartitionEachRegion) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        auto net = support::random_net(rng, {2, 3, 1}, 4);
        auto c = build_complex(net);
        auto a = analyze_decision(c, support::random_transversal(c, rng));
        std::size_t total = 0;
        for (Region r : {Region::N, Region::B, Region::Y})
            for (const auto& comp : a.topology[r].components) {
                total += comp.cells.size();
                EXPECT_TRUE(std::is_sorted(comp.cells.begin(), comp.cells.end()));
                for (const auto& key : comp.cells) {
                    EXPECT_EQ(region_of(key.back()), r);
                    EXPECT_TRUE(a.refined.cells.count(key));
                }
            }
        EXPECT_EQ(total, a.refined.cells.size());
    }
}

TEST(Topology, ShallowNarrowNetworksHaveNoBoundedRegions) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = support::random_net(rng, {2, 2, 1}, 5);
        auto c = build_complex(net);
        auto rep = verify_johnson(net, analyze_decision(c, support::random_transversal(c, rng)));
        EXPECT_TRUE(rep.pass) << "trial " << trial;
    }
}

TEST(Topology, ReluEdgesAreOriented) {
    auto sk = oriented_skeleton(load_network(support::sample_path("relu_1d.json")));
    ASSERT_EQ(sk.vertices.size(), 1u);
    EXPECT_EQ(sk.vertices[0].point, RatVector{0});
    ASSERT_EQ(sk.edges.size(), 2u);
    for (const auto& e : sk.edges) {
        EXPECT_EQ(e.shape, EdgeShape::Ray);
        EXPECT_EQ(e.base, RatVector{0});
        if (e.key == SignVector{Sign::Neg}) {
            EXPECT_LT(e.direction[0], 0);
            EXPECT_TRUE(e.flat());
        } else {
            EXPECT_GT(e.direction[0], 0);
            EXPECT_EQ(e.slope, 1);
        }
    }
}

TEST(Topology, SkeletonShapesForThreeLines) {
    auto sk = oriented_skeleton(load_network(support::sample_path("three_lines.json")));
    EXPECT_EQ(sk.vertices.size(), 3u);
    std::map<EdgeShape, int> shapes;
    for (const auto& e : sk.edges) ++shapes[e.shape];
    EXPECT_EQ(shapes[EdgeShape::Segment], 3);
    EXPECT_EQ(shapes[EdgeShape::Ray], 6);
    EXPECT_EQ(shapes[EdgeShape::Line], 0);
    auto single = oriented_skeleton(make_net({2, 1, 1}, {{{1, -1}}, {{1}}}, {{0}, {0}}));
    ASSERT_EQ(single.edges.size(), 1u);
    EXPECT_EQ(single.edges[0].shape, EdgeShape::Line);
    EXPECT_TRUE(single.edges[0].flat()); // F vanishes along its own bent line
}

TEST(Topology, EdgeSlopesMatchDirectEvaluationAndHadamardFormula) {
    std::mt19937_64 rng(13);
    int checked = 0;
    while (checked < 12) {
        auto net = support::random_net(rng, checked % 3 ? std::vector<std::size_t>{2, 3, 1}
                                                        : std::vector<std::size_t>{2, 2, 2, 1},
                                       5);
        auto rep = is_transversal_network(net);
        if (!rep.transversal || !rep.generic) continue;
        ++checked;
        auto c = build_complex(net);
        for (const auto& e : oriented_skeleton(c).edges) {
            const Rational delta = support::reference_eval(net, e.far_point()) - support::reference_eval(net, e.base);
            EXPECT_EQ(e.slope, delta.sign());
            if (e.shape != EdgeShape::Ray) EXPECT_GE(e.slope, 0);
            EXPECT_EQ(hadamard_orientation(net, c, e), e.slope) << to_string(e.key);
        }
    }
}

TEST(Topology, MatchesGridFloodFill) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 12; ++trial) {
        auto net = support::random_net(rng, trial % 2 ? std::vector<std::size_t>{2, 3, 1}
                                                      : std::vector<std::size_t>{2, 2, 2, 1},
                                       3);
        auto c = build_complex(net);
        const Rational t = support::random_transversal(c, rng);
        auto a = analyze_decision(c, t);
        // Box around every vertex of the refined complex, with margin.
        double lo = -1, hi = 1;
        for (const auto& [key, cell] : a.refined.cells)
            if (cell.dim == 0)
                for (const auto& x : cell.interior_point) {
                    lo = std::min(lo, to_double(x));
                    hi = std::max(hi, to_double(x));
                }
        const double pad = 0.5 * (hi - lo) + 1;
        const auto g = support::grid_components(net, to_double(t), lo - pad, lo - pad, hi + pad, hi + pad, 400);
        const auto& y = a.topology[Region::Y];
        const auto& n = a.topology[Region::N];
        EXPECT_EQ(g.y, y.components.size()) << "trial " << trial;
        EXPECT_EQ(g.n, n.components.size()) << "trial " << trial;
        EXPECT_EQ(g.y_bounded, y.bounded_count()) << "trial " << trial;
        EXPECT_EQ(g.n_bounded, n.bounded_count()) << "trial " << trial;
    }
}

TEST(Topology, GridFloodFillSeesKnownBoundedComponents) {
    const auto s = support::grid_components(simplex(), 0.25, -3, -3, 4, 4, 256);
    EXPECT_EQ(s.n, 1u);
    EXPECT_EQ(s.n_bounded, 1u);
    EXPECT_EQ(s.y, 1u);
    EXPECT_EQ(s.y_bounded, 0u);
    const auto p = support::grid_components(pyramid(), 0.5, -3, -3, 3, 3, 256);
    EXPECT_EQ(p.y_bounded, 1u);
    EXPECT_EQ(p.n_bounded, 0u);
    EXPECT_EQ(p.unresolved, 0u);
}

TEST(Topology, LipschitzBoundCoversEveryPattern) {
    EXPECT_DOUBLE_EQ(support::lipschitz_bound(pyramid()), std::sqrt(2.0)); // gradient (-1,-1) where x,y > 0
    EXPECT_DOUBLE_EQ(support::lipschitz_bound(load_network(support::sample_path("relu_1d.json"))), 1.0);
}

TEST(Topology, PyramidCertificateHasASingleVertex) {
    auto cert = max_subgraph(pyramid(), Rational(1, 2), Region::Y, 0);
    EXPECT_TRUE(cert.maximize);
    EXPECT_EQ(cert.extremum, Rational(1));
    ASSERT_EQ(cert.flat_vertices.size(), 1u);
    EXPECT_TRUE(cert.flat_edges.empty());
    EXPECT_TRUE(cert.enclosing_equals_flat);
    EXPECT_EQ(cert.inward_edges.size(), 6u); // three lines through the peak
    EXPECT_TRUE(cert.all_inward);
}

TEST(Topology, SimplexCertificateIsTheFlatTriangle) {
    auto cert = max_subgraph(simplex(), Rational(1, 4), Region::N, 0);
    EXPECT_FALSE(cert.maximize);
    EXPECT_EQ(cert.extremum, Rational(0));
    EXPECT_EQ(cert.flat_vertices.size(), 3u);
    EXPECT_EQ(cert.flat_edges.size(), 3u);
    EXPECT_TRUE(cert.enclosing_equals_flat);
    EXPECT_EQ(cert.inward_edges.size(), 6u);
    EXPECT_TRUE(cert.all_inward);
}

TEST(Topology, CertificateBoundsTheComponent) {
    // The extremum over vertices is the extremum over every sampled point of the component.
    std::mt19937_64 rng(29);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 6; ++trial) {
        auto net = support::random_net(rng, {2, 3, 1}, 4);
        auto c = build_complex(net);
        auto a = analyze_decision(c, support::random_transversal(c, rng));
        for (Region r : {Region::Y, Region::N}) {
            const auto& comps = a.topology[r].components;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                if (!comps[i].bounded) continue;
                ++checked;
                auto cert = max_subgraph(a, r, i);
                EXPECT_TRUE(cert.all_inward);
                EXPECT_FALSE(cert.flat_vertices.empty());
                EXPECT_TRUE(std::includes(cert.enclosing_vertices.begin(), cert.enclosing_vertices.end(),
                                          cert.flat_vertices.begin(), cert.flat_vertices.end()));
                EXPECT_TRUE(std::includes(cert.enclosing_edges.begin(), cert.enclosing_edges.end(),
                                          cert.flat_edges.begin(), cert.flat_edges.end()));
                if (r == Region::Y) EXPECT_GT(cert.extremum, a.topology.threshold);
                else EXPECT_LT(cert.extremum, a.topology.threshold);
                for (const auto& key : comps[i].cells)
                    for (int k = 0; k < 4; ++k) {
                        const Rational v = support::reference_eval(net, support::sample_in_cell(a.refined.at(key), rng));
                        if (r == Region::Y) EXPECT_LE(v, cert.extremum);
                        else EXPECT_GE(v, cert.extremum);
                    }
            }
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(Topology, CertificatePreconditions) {
    auto a = analyze_decision(simplex(), Rational(1, 4));
    EXPECT_THROW(max_subgraph(a, Region::B, 0), PreconditionError);
    EXPECT_THROW(max_subgraph(a, Region::Y, 0), PreconditionError); // unbounded
    EXPECT_THROW(max_subgraph(a, Region::N, 3), std::out_of_range);
}

TEST(Topology, TheoremApplicability) {
    auto relu = load_network(support::sample_path("relu_1d.json"));
    EXPECT_THROW(verify_johnson(relu, 1), NotApplicable);
    EXPECT_THROW(verify_johnson(simplex(), 1), NotApplicable); // width 3 > 2
    auto wide = make_net({2, 4, 1}, {{{1, 0}, {0, 1}, {1, 1}, {1, -1}}, {{1, 1, 1, 1}}}, {{0, 0, 0, 0}, {0}});
    EXPECT_THROW(verify_one_bounded(wide, 1), NotApplicable);
    EXPECT_THROW(verify_one_bounded(load_network(support::sample_path("orthant_collapse.json")), 1), NotApplicable);
}

TEST(Topology, OneBoundedCheckReportsCounts) {
    auto rep = verify_one_bounded(simplex(), Rational(1, 4));
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.bounded[static_cast<int>(Region::N)], 1u);
    EXPECT_EQ(rep.bounded[static_cast<int>(Region::Y)], 0u);
    EXPECT_TRUE(rep.offending.empty());
}

TEST(Topology, JohnsonHoldsForDeeperNarrowNetworks) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 4; ++trial) {
        auto net = support::random_net(rng, {3, 3, 3, 1}, 3);
        auto c = build_complex(net);
        auto rep = verify_johnson(net, analyze_decision(c, support::random_transversal(c, rng)));
        EXPECT_TRUE(rep.pass) << "trial " << trial;
    }
}

} // namespace
