#include "support.hpp"

#include <gtest/gtest.h>

using namespace relutopo;
using support::make_net;

namespace {

TEST(Network, RejectsBadShapes) {
    EXPECT_THROW(ReluNetwork({2, 1}, {AffineMap(RatMatrix(1, 2), zeros(1))}), InvalidInput);
    EXPECT_THROW(ReluNetwork({2, 2, 2}, {AffineMap(RatMatrix(2, 2), zeros(2)), AffineMap(RatMatrix(2, 2), zeros(2))}),
                 InvalidInput);
    EXPECT_THROW(ReluNetwork({2, 3, 1}, {AffineMap(RatMatrix(3, 2), zeros(3)), AffineMap(RatMatrix(1, 2), zeros(1))}),
                 InvalidInput);
    EXPECT_THROW(ReluNetwork({2, 3, 1}, {AffineMap(RatMatrix(3, 2), zeros(3))}), InvalidInput);
}

TEST(Network, Bookkeeping) {
    auto net = make_net({2, 3, 2, 1}, {{{1, 0}, {0, 1}, {1, 1}}, {{1, 1, 1}, {1, -1, 0}}, {{1, 1}}}, {{0, 0, 0}, {0, 0}, {0}});
    EXPECT_EQ(net.input_dim(), 2u);
    EXPECT_EQ(net.hidden_layers(), 2u);
    EXPECT_EQ(net.hidden_node_count(), 5u);
    EXPECT_EQ(net.width(), 3u);
    EXPECT_EQ(net.parameter_count(), 3u * 3 + 4u * 2 + 3u * 1);
    EXPECT_EQ(net.node_index({2, 2}), 4u);
    EXPECT_EQ(net.nodes().size(), 5u);
    EXPECT_THROW(net.node_index({3, 1}), InvalidInput);
    EXPECT_THROW(net.node_index({1, 4}), InvalidInput);
}

TEST(Network, EvaluatesRelu) {
    // F(x) = ReLU(x)
    auto net = make_net({1, 1, 1}, {{{1}}, {{1}}}, {{0}, {0}});
    EXPECT_EQ(evaluate(net, RatVector{-3}), Rational(0));
    EXPECT_EQ(evaluate(net, RatVector{Rational(5, 2)}), Rational(5, 2));
    EXPECT_THROW(evaluate(net, RatVector{1, 2}), InvalidInput);
}

TEST(Network, MatchesReferenceEvaluatorOnRandomInputs) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        auto net = support::random_net(rng, {3, 4, 3, 1}, 5);
        for (int k = 0; k < 10; ++k) {
            auto x = support::random_point(rng, 3);
            EXPECT_EQ(evaluate(net, x), support::reference_eval(net, x));
        }
    }
}

TEST(Network, NodeMapValuesArePreActivations) {
    auto net = make_net({2, 2, 1, 1}, {{{1, 0}, {0, 1}}, {{1, 1}}, {{1}}}, {{0, 0}, {-1}, {0}});
    RatVector x{-2, 3};
    EXPECT_EQ(node_map_value(net, {1, 1}, x), Rational(-2));
    EXPECT_EQ(node_map_value(net, {1, 2}, x), Rational(3));
    EXPECT_EQ(node_map_value(net, {2, 1}, x), Rational(2)); // 0 + 3 - 1
    auto p = activation_pattern_at(net, x);
    EXPECT_EQ(p.layers, (std::vector<std::vector<bool>>{{false, true}, {true}}));
    // A zero pre-activation counts as inactive.
    EXPECT_FALSE(activation_pattern_at(net, RatVector{0, 0}).layers[0][0]);
}

TEST(Network, MaskedAffineAgreesWithEvaluateOnItsRegion) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        auto net = support::random_net(rng, {2, 3, 2, 1}, 6);
        for (int k = 0; k < 10; ++k) {
            auto x = support::random_point(rng, 2);
            auto m = masked_affine(net, activation_pattern_at(net, x));
            EXPECT_EQ(m.apply(x)[0], evaluate(net, x));
        }
    }
}

TEST(Network, IdentityLayerGradientFollowsOutputWeights) {
    // Hidden layer is the identity on R^2: on the all-ones region F = W2 x.
    auto net = make_net({2, 2, 1}, {{{1, 0}, {0, 1}}, {{3, -2}}}, {{0, 0}, {1}});
    auto m = masked_affine(net, ActivationPattern{{{true, true}}});
    EXPECT_EQ(m.weights.row_vector(0), (RatVector{3, -2}));
    EXPECT_EQ(m.bias[0], Rational(1));
    auto off = masked_affine(net, ActivationPattern{{{false, true}}});
    EXPECT_EQ(off.weights.row_vector(0), (RatVector{0, -2}));
    EXPECT_THROW(masked_affine(net, ActivationPattern{{{true}}}), InvalidInput);
}

TEST(Network, PaddingPreservesTheFunction) {
    std::mt19937_64 rng(12);
    auto net = support::random_net(rng, {2, 1, 3, 2, 1}, 4);
    auto padded = pad_to_width(net);
    EXPECT_EQ(padded.architecture(), (std::vector<std::size_t>{2, 3, 3, 3, 1}));
    for (int k = 0; k < 20; ++k) {
        auto x = support::random_point(rng, 2);
        EXPECT_EQ(evaluate(padded, x), evaluate(net, x));
    }
}

TEST(Network, LayerClassification) {
    auto net = make_net({2, 3, 1}, {{{1, 0}, {0, 1}, {0, 0}}, {{1, 1, 1}}}, {{0, 0, 0}, {0}});
    auto nc = classify_layers(net);
    ASSERT_EQ(nc.layers.size(), 2u);
    EXPECT_TRUE(nc.layers[0].degenerate);
    EXPECT_FALSE(nc.layers[0].generic);
    EXPECT_TRUE(nc.degenerate);
    EXPECT_FALSE(nc.generic);

    auto good = make_net({2, 3, 1}, {{{1, 0}, {0, 1}, {1, 1}}, {{1, 1, 1}}}, {{0, 0, -1}, {0}});
    EXPECT_TRUE(classify_layers(good).generic);
    EXPECT_FALSE(classify_layers(good).degenerate);
}

} // namespace
