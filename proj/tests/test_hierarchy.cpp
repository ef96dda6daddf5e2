#include <catch2/catch_amalgamated.hpp>

#include "gts/hierarchy.hpp"
#include "gts/panel.hpp"
#include "gts/synthetic.hpp"
#include "oracles.hpp"

#include <random>
#include <stdexcept>

using namespace gts;
using Catch::Approx;

TEST_CASE("Australian-shaped hierarchy has 27 series and 16 bottom series", "[hierarchy]") {
    const auto h = synth::australian_hierarchy();
    REQUIRE(h.size() == 27);
    REQUIRE(h.bottom_count() == 16);
    REQUIRE(h.level_count() == 4);
    REQUIRE(h.nodes_at_level(0).size() == 1);
    REQUIRE(h.nodes_at_level(1).size() == 2);
    REQUIRE(h.nodes_at_level(2).size() == 8);
    REQUIRE(h.nodes_at_level(3).size() == 16);
    REQUIRE(h.key(0).is_top());
    REQUIRE(h.label(0) == "T");
    REQUIRE(h.label(1) == "F*T");
    REQUIRE(h.label(3) == "T*NSW");
    REQUIRE(h.label(11) == "F*NSW");
    REQUIRE(h.label(26) == "M*NT");
    for (std::size_t j = h.bottom_offset(); j < h.size(); ++j) {
        REQUIRE(h.key(j).is_bottom());
    }
}

TEST_CASE("Single attribute and singleton domains", "[hierarchy]") {
    const auto one = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    REQUIRE(one.size() == 3);
    REQUIRE(one.bottom_count() == 2);
    const auto chain = GroupedHierarchy::build({{"a", {"x"}}, {"b", {"y"}}});
    REQUIRE(chain.size() == 4);
    REQUIRE(chain.bottom_count() == 1);
}

TEST_CASE("Invalid hierarchies are rejected", "[hierarchy]") {
    REQUIRE_THROWS_AS(GroupedHierarchy::build({}), std::invalid_argument);
    REQUIRE_THROWS_AS(GroupedHierarchy::build({{"sex", {}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(GroupedHierarchy::build({{"sex", {"F", "F"}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(GroupedHierarchy::build({{"sex", {"T"}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(GroupedHierarchy::build({{"a", {"x"}}, {"a", {"y"}}}), std::invalid_argument);
}

TEST_CASE("Counts summing matrix", "[hierarchy]") {
    const auto small = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    Eigen::MatrixXd expected(3, 2);
    expected << 1, 1, 1, 0, 0, 1;
    REQUIRE(summing_matrix_counts(small).weights == expected);

    const auto h = synth::australian_hierarchy();
    const auto S = summing_matrix_counts(h);
    REQUIRE(S.weights.row(0).sum() == 16.0);
    REQUIRE(S.weights.bottomRows(16) == Eigen::MatrixXd::Identity(16, 16));
    REQUIRE(((S.weights.array() == 0.0) || (S.weights.array() == 1.0)).all());

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> c(0, 100);
    std::vector<double> bottom(16);
    for (auto& v : bottom) {
        v = c(rng);
    }
    const Eigen::VectorXd all = S.weights * Eigen::Map<Eigen::VectorXd>(bottom.data(), 16);
    REQUIRE((all - aggregate_counts(h, bottom)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Rates summing matrix weights", "[hierarchy]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    const std::vector<double> equal{50.0, 50.0};
    const auto S = summing_matrix_rates(h, equal);
    const Eigen::Vector2d r(0.02, 0.04);
    REQUIRE((S.weights * r)(0) == Approx(0.03).epsilon(1e-14));

    const std::vector<double> unequal{75.0, 25.0};
    const auto S2 = summing_matrix_rates(h, unequal);
    REQUIRE((S2.weights * r)(0) == Approx(0.75 * 0.02 + 0.25 * 0.04).epsilon(1e-14));

    const auto big = synth::australian_hierarchy();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> e(10.0, 1000.0);
    std::vector<double> exposures(16);
    for (auto& v : exposures) {
        v = e(rng);
    }
    const auto S3 = summing_matrix_rates(big, exposures, 7);
    REQUIRE(S3.mode == SummingMode::rates);
    REQUIRE(S3.time_index == std::size_t{7});
    REQUIRE(S3.weights.bottomRows(16) == Eigen::MatrixXd::Identity(16, 16));
    for (Eigen::Index i = 0; i < 11; ++i) {
        REQUIRE(std::abs(S3.weights.row(i).sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("Rates summing matrix validates exposures", "[hierarchy]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    const std::vector<double> zero{0.0, 10.0};
    REQUIRE_THROWS_AS(summing_matrix_rates(h, zero, 3), std::domain_error);
    try {
        (void)summing_matrix_rates(h, zero, 3);
    } catch (const std::domain_error& e) {
        REQUIRE(std::string(e.what()).find('F') != std::string::npos);
        REQUIRE(std::string(e.what()).find('3') != std::string::npos);
    }
    const std::vector<double> incoherent{100.0, 40.0, 50.0};
    REQUIRE_THROWS_AS(summing_matrix_rates(h, incoherent), std::invalid_argument);
    const std::vector<double> coherent{90.0, 40.0, 50.0};
    REQUIRE_NOTHROW(summing_matrix_rates(h, coherent));
}

TEST_CASE("Panel aggregation sums deaths and exposures", "[hierarchy][panel]") {
    const auto h = GroupedHierarchy::build({{"sex", {"F", "M"}}});
    std::vector<NodeSeries> bottom{{{1.0}, {100.0}, {}}, {{2.0}, {100.0}, {}}};
    const auto p = Panel::aggregate(h, {2000}, bottom);
    REQUIRE(p.node(0).rate[0] == Approx(0.015));

    const auto chain = GroupedHierarchy::build({{"a", {"x"}}});
    const auto single = Panel::aggregate(chain, {2000, 2001}, {{{3.0, 4.0}, {10.0, 20.0}, {}}});
    REQUIRE(single.node(0).rate == single.node(1).rate);

    REQUIRE_THROWS_AS(Panel::aggregate(h, {2000}, {{{1.0}, {0.0}, {}}, {{1.0}, {1.0}, {}}}), std::domain_error);
    REQUIRE_THROWS_AS(Panel::aggregate(h, {2000, 2001}, bottom), std::invalid_argument);
}

TEST_CASE("Panel aggregation matches a brute-force summation oracle", "[hierarchy][panel]") {
    const auto panel = synth::australian_shaped();
    const auto& h = panel.hierarchy();
    for (std::size_t t = 0; t < panel.length(); t += 10) {
        std::vector<double> d;
        std::vector<double> e;
        double grand = 0.0;
        for (std::size_t k = 0; k < 16; ++k) {
            d.push_back(panel.node(h.bottom_offset() + k).deaths[t]);
            e.push_back(panel.node(h.bottom_offset() + k).exposure[t]);
            grand += d.back();
        }
        REQUIRE(panel.node(0).deaths[t] == grand);
        const auto oracle = test::brute_force_rates(h, d, e);
        for (std::size_t j = 0; j < h.size(); ++j) {
            REQUIRE(std::abs(panel.node(j).rate[t] - oracle[j]) <= 1e-15);
        }
    }
}

TEST_CASE("Coherence identity on random panels", "[hierarchy][panel]") {
    std::mt19937_64 rng(11);
    for (std::size_t b = 2; b <= 8; b += 3) {
        const auto h = test::two_attribute(2, b);
        const auto panel = test::random_panel(h, 12, rng);
        for (std::size_t t = 0; t < panel.length(); ++t) {
            const auto S = summing_matrix_rates(h, panel.exposures_at(t), t);
            const Eigen::VectorXd r = panel.rates_at(t);
            const Eigen::VectorXd rebuilt = S.weights * r.tail(static_cast<Eigen::Index>(h.bottom_count()));
            REQUIRE((rebuilt - r).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}
