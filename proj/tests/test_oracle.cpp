#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ccm/oracle.hpp"
#include "ccm/scenario.hpp"

namespace {

using ccm::CoupledState;
using ccm::TradeDirection;

const CoupledState kCaseStudy{1e7, 4.5e8, 7.2e7, 1e9, 0.97, 0.97};

std::vector<double> case_study_grid() {
    return ccm::sweep_grid({0.0, 2.0, 100, ccm::SweepSpec::Spacing::Linear});
}

TEST(SequentialOracle, ZeroAmountIsIdentity) {
    for (TradeDirection dir : {TradeDirection::Purchase, TradeDirection::Liquidation}) {
        const auto [out, post] = ccm::sequential_swap_oracle(kCaseStudy, 0.0, dir);
        EXPECT_EQ(out, 0.0);
        EXPECT_EQ(post.x, kCaseStudy.x);
        EXPECT_EQ(post.y1, kCaseStudy.y1);
        EXPECT_EQ(post.y2, kCaseStudy.y2);
        EXPECT_EQ(post.z, kCaseStudy.z);
    }
}

TEST(SequentialOracle, PurchaseLegsMatchManualChain) {
    const double delta = 3e5;
    const double lambda = ccm::swap_out(kCaseStudy.pool_yx(), delta);
    const double expected = ccm::swap_out(kCaseStudy.pool_zy(), lambda);
    const auto [out, post] =
        ccm::sequential_swap_oracle(kCaseStudy, delta, TradeDirection::Purchase);
    EXPECT_DOUBLE_EQ(out, expected);
    EXPECT_DOUBLE_EQ(post.z, kCaseStudy.z - expected);
}

TEST(RandomStates, DeterministicForFixedSeed) {
    const auto a = ccm::random_states(50, 123);
    const auto b = ccm::random_states(50, 123);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].y1, b[i].y1);
        EXPECT_EQ(a[i].y2, b[i].y2);
        EXPECT_EQ(a[i].z, b[i].z);
        EXPECT_EQ(a[i].gamma1, b[i].gamma1);
        EXPECT_EQ(a[i].gamma2, b[i].gamma2);
    }
}

TEST(RandomStates, ReservesStayWithinSamplingRange) {
    for (const CoupledState& s : ccm::random_states(200)) {
        for (double r : {s.x, s.y1, s.y2, s.z}) {
            ASSERT_GE(r, 1e3);
            ASSERT_LE(r, 1e12);
        }
        ASSERT_GE(s.gamma1, 0.9);
        ASSERT_LE(s.gamma1, 1.0);
    }
}

TEST(RelError, SymmetricScaleNormalization) {
    EXPECT_DOUBLE_EQ(ccm::rel_error(1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(ccm::rel_error(0.0, 0.0), 0.0);
    EXPECT_NEAR(ccm::rel_error(101.0, 100.0), 1.0 / 101.0, 1e-15);
}

TEST(CheckComposition, FlagsCorruptedClosedForm) {
    const auto grid = case_study_grid();
    const ccm::OracleReport honest = ccm::check_composition(
        kCaseStudy, grid, TradeDirection::Purchase,
        [](const CoupledState& s, double a) { return ccm::purchase_compound(s, a).amount_out; },
        "composition_purchase");
    EXPECT_TRUE(honest.passed);

    const ccm::OracleReport corrupted = ccm::check_composition(
        kCaseStudy, grid, TradeDirection::Purchase,
        [](const CoupledState& s, double a) {
            return ccm::purchase_compound(s, a).amount_out * (1.0 + 1e-6);
        },
        "composition_purchase_corrupted");
    EXPECT_FALSE(corrupted.passed);
    EXPECT_GT(corrupted.max_rel_error, corrupted.tolerance);
    EXPECT_FALSE(corrupted.worst_case_input.empty());
}

TEST(RunSuite, EmptyGridYieldsNoReports) {
    EXPECT_TRUE(ccm::run_suite(kCaseStudy, {}).empty());
}

TEST(RunSuite, AllOraclesPassOnCaseStudy) {
    const std::vector<ccm::OracleReport> reports = ccm::run_suite(kCaseStudy, case_study_grid());
    ASSERT_FALSE(reports.empty());
    for (const ccm::OracleReport& r : reports) {
        EXPECT_TRUE(r.passed) << r.name << ": max_rel_error=" << r.max_rel_error
                              << " tol=" << r.tolerance << " at " << r.worst_case_input;
        EXPECT_GT(r.samples, 0) << r.name;
    }
}

TEST(RunSuite, CoversEveryOracleFamily) {
    const std::vector<ccm::OracleReport> reports = ccm::run_suite(kCaseStudy, {0.0, 0.5, 1.0});
    const char* expected[] = {
        "composition_purchase",      "composition_liquidation",
        "invariant_preservation",    "y_conservation",
        "decoupled_ordering",        "purchase_inflation_sign",
        "liquidation_deflation_sign", "indicator_sign_agreement",
        "transmission_purchase",     "transmission_liquidation",
        "transmission_bound",        "drift_roundtrip",
        "depth_fd_yx",               "depth_fd_zy",
        "expansion_cubic_purchase",  "expansion_cubic_liquidation",
        "value_purchase_closed_form", "value_liquidation_closed_form",
    };
    ASSERT_EQ(reports.size(), std::size(expected));
    for (std::size_t i = 0; i < reports.size(); ++i) {
        EXPECT_EQ(reports[i].name, expected[i]);
    }
}

TEST(RunSuite, DeterministicAcrossRuns) {
    const std::vector<double> grid = case_study_grid();
    for (const CoupledState& state : ccm::random_states(5)) {
        const auto a = ccm::run_suite(state, grid);
        const auto b = ccm::run_suite(state, grid);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].name, b[i].name);
            EXPECT_EQ(a[i].max_rel_error, b[i].max_rel_error);
            EXPECT_EQ(a[i].passed, b[i].passed);
            EXPECT_EQ(a[i].samples, b[i].samples);
        }
    }
}

TEST(RunSuite, ExactCompositionHoldsOnRandomStates) {
    const std::vector<double> grid = {0.0, 0.1, 0.7, 2.0};
    for (const CoupledState& state : ccm::random_states(50, 7)) {
        for (TradeDirection dir : {TradeDirection::Purchase, TradeDirection::Liquidation}) {
            const bool purchase = dir == TradeDirection::Purchase;
            const ccm::OracleReport r = ccm::check_composition(
                state, grid, dir,
                [purchase](const CoupledState& s, double a) {
                    return purchase ? ccm::purchase_compound(s, a).amount_out
                                    : ccm::liquidate_compound(s, a).amount_out;
                },
                purchase ? "composition_purchase" : "composition_liquidation");
            ASSERT_TRUE(r.passed) << r.worst_case_input << " err=" << r.max_rel_error;
        }
    }
}

TEST(CheckDepthFd, PassesOnBothPoolsOfCaseStudy) {
    const auto grid = case_study_grid();
    EXPECT_TRUE(ccm::check_depth_fd(kCaseStudy.pool_yx(), grid, "depth_fd_yx").passed);
    EXPECT_TRUE(
        ccm::check_depth_fd(kCaseStudy.pool_zy().flipped(), grid, "depth_fd_zy").passed);
}

TEST(CheckExpansionCubic, PassesBothDirectionsOnCaseStudy) {
    EXPECT_TRUE(ccm::check_expansion_cubic(kCaseStudy, TradeDirection::Purchase,
                                           "expansion_cubic_purchase")
                    .passed);
    EXPECT_TRUE(ccm::check_expansion_cubic(kCaseStudy, TradeDirection::Liquidation,
                                           "expansion_cubic_liquidation")
                    .passed);
}

}  // namespace
