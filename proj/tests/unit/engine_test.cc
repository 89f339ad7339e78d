// Copyright 2026 The qconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qconv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "support/oracles.hpp"

using namespace qconv;
using qconv::testing::random_tensor;

namespace {

InputBatch grid_3x3() { return InputBatch({1, 3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9}); }
KernelBank kernel_2x2() { return KernelBank({2, 2, 1, 1}, {1, 2, 3, 4}); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

AmplitudeState state(std::vector<double> v) { return AmplitudeState::from_vector(v); }

}  // namespace

TEST(Qconvolve, ExactMatchesReference) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = qconv::testing::random_geometry(rng);
        auto x = random_tensor<InputBatch>({g.N, g.H, g.W, g.C}, rng);
        auto k = random_tensor<KernelBank>({g.R, g.S, g.C, g.M}, rng);
        // Non-unit norms exercise the rescaling.
        for (auto& v : x.data()) v *= 4.0;
        QConvConfig cfg(infer_shape(x, k, g.params));
        const auto r = qconvolve(x, k, cfg);
        const auto ref = conv_reference(x, k, cfg.shape);
        for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(r.estimated.data()[i], ref.data()[i], 1e-10);
        EXPECT_LE(r.max_abs_error, 1e-10);
    }
}

TEST(Qconvolve, AllOnes) {
    InputBatch x({1, 3, 3, 1}, std::vector<double>(9, 1.0));
    KernelBank k({2, 2, 1, 1}, std::vector<double>(4, 1.0));
    QConvConfig cfg(infer_shape(x, k));
    const auto r = qconvolve(x, k, cfg);
    for (double v : r.estimated.data()) EXPECT_NEAR(v, 4.0, 1e-12);
    EXPECT_EQ(r.estimated_entries, 4u);
    EXPECT_EQ(r.zero_entries, 0u);
}

TEST(Qconvolve, ScalesWithInputNorm) {
    const auto x = grid_3x3();
    auto x3 = x;
    for (auto& v : x3.data()) v *= 3.0;
    QConvConfig cfg(infer_shape(x, kernel_2x2()));
    const auto a = qconvolve(x, kernel_2x2(), cfg);
    const auto b = qconvolve(x3, kernel_2x2(), cfg);
    for (std::size_t i = 0; i < a.estimated.size(); ++i)
        EXPECT_NEAR(b.estimated.data()[i], 3.0 * a.estimated.data()[i], 1e-10);
}

TEST(Qconvolve, ZeroRowsAndColumnsSkipCircuits) {
    InputBatch x({2, 3, 3, 1});
    for (std::size_t i = 0; i < 9; ++i) x.data()[9 + i] = static_cast<double>(i + 1);
    KernelBank k({2, 2, 1, 2});
    k(0, 0, 0, 0) = 1.0;  // filter 1 stays zero
    QConvConfig cfg(infer_shape(x, k));
    cfg.plan = ShotPlan::sampled(50, 1);
    CostLedger ledger;
    const auto r = qconvolve(x, k, cfg, ledger);
    // 4 live rows x 1 live column.
    EXPECT_EQ(r.estimated_entries, 4u);
    EXPECT_EQ(r.zero_entries, 12u);
    EXPECT_EQ(ledger.shots(), 200u);
    for (std::size_t e = 0; e < 2; ++e)
        for (std::size_t f = 0; f < 2; ++f) {
            EXPECT_EQ(r.estimated(0, e, f, 0), 0.0);
            EXPECT_EQ(r.estimated(1, e, f, 1), 0.0);
        }
}

TEST(Qconvolve, SampledWithinHoeffdingBound) {
    const auto x = grid_3x3();
    const auto k = kernel_2x2();
    QConvConfig cfg(infer_shape(x, k));
    const auto kt = build_dbt_kernel(k, cfg.shape);
    const double xnorm = std::sqrt(285.0);
    int failures = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        cfg.plan = ShotPlan::from_precision(0.02, 0.01, seed);
        const auto r = qconvolve(x, k, cfg);
        const auto flat = flatten_output(r.estimated);
        const auto ref = flatten_output(r.exact);
        for (std::size_t p = 0; p < 4; ++p) {
            const auto row = kt.dense_row(p);
            const double bound = 2.0 * 0.02 * std::sqrt(qconv::testing::dot(row, row)) * xnorm;
            if (std::abs(flat(p, 0) - ref(p, 0)) > bound) ++failures;
            ++total;
        }
        EXPECT_EQ(r.resources.shots_used, 4u * 6623u);
    }
    EXPECT_LE(static_cast<double>(failures) / total, 0.01 + 0.03);
}

TEST(Qconvolve, MoreShotsReduceError) {
    const auto x = grid_3x3();
    const auto k = kernel_2x2();
    QConvConfig cfg(infer_shape(x, k));
    std::vector<double> coarse, fine;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.plan = ShotPlan::sampled(500, seed);
        coarse.push_back(qconvolve(x, k, cfg).mean_abs_error);
        cfg.plan = ShotPlan::sampled(2000, seed);
        fine.push_back(qconvolve(x, k, cfg).mean_abs_error);
    }
    EXPECT_LT(median(fine), median(coarse));
}

TEST(Qconvolve, SeedReproducible) {
    const auto x = grid_3x3();
    QConvConfig cfg(infer_shape(x, kernel_2x2()));
    cfg.plan = ShotPlan::sampled(300, 11);
    const auto a = qconvolve(x, kernel_2x2(), cfg);
    const auto b = qconvolve(x, kernel_2x2(), cfg);
    EXPECT_EQ(a.estimated, b.estimated);
}

TEST(Qconvolve, SwapFlagsSignLoss) {
    InputBatch x({1, 2, 2, 1}, {1, -1, 2, 0.5});
    KernelBank k({1, 1, 1, 2}, {1, -1});
    QConvConfig cfg(infer_shape(x, k));
    cfg.circuit = CircuitKind::Swap;
    const auto r = qconvolve(x, k, cfg);
    EXPECT_TRUE(r.sign_loss);
    for (std::size_t i = 0; i < r.exact.size(); ++i)
        EXPECT_NEAR(r.estimated.data()[i], std::abs(r.exact.data()[i]), 1e-6);

    cfg.circuit = CircuitKind::Interference;
    EXPECT_FALSE(qconvolve(x, k, cfg).sign_loss);
}

TEST(Qconvolve, KernelPreprocessingAmortised) {
    const auto k = kernel_2x2();
    const auto x1 = grid_3x3();
    InputBatch x2({1, 3, 3, 1}, {0, 1, 0, 1, 0, 1, 0, 1, 0});
    QConvConfig cfg(infer_shape(x1, k));
    CostLedger ledger;
    qconvolve(x1, k, cfg, ledger);
    const auto after_first = ledger.preprocess_touches();
    EXPECT_EQ(after_first, 16u + 9u);
    qconvolve(x2, k, cfg, ledger);
    EXPECT_EQ(ledger.preprocess_touches(), after_first + 4u);
    EXPECT_EQ(ledger.prep_invocations(), 10u);
}

TEST(Resources, QubitCountsSmallExample) {
    const auto shape = ConvShape::make(1, 3, 3, 1, 2, 2, 1);
    const auto q = qubit_counts(shape);
    EXPECT_EQ(q.index_p, 2u);
    EXPECT_EQ(q.index_q, 0u);
    EXPECT_EQ(q.data, 4u);
    EXPECT_EQ(q.ancilla, 1u);
    EXPECT_EQ(q.total(), 7u);
}

TEST(Resources, QubitCountsSweep) {
    auto lg = [](std::size_t n) {
        std::size_t l = 0;
        while ((std::size_t{1} << l) < n) ++l;
        return l;
    };
    for (std::size_t N = 1; N <= 4; ++N)
        for (std::size_t H = 2; H <= 6; ++H)
            for (std::size_t C = 1; C <= 3; ++C)
                for (std::size_t M = 1; M <= 3; ++M) {
                    const auto s = ConvShape::make(N, H, H + 1, C, 2, 2, M);
                    const auto q = qubit_counts(s);
                    EXPECT_EQ(q.total(), lg(s.E() * s.F() * M) + lg(N) + lg(H * (H + 1) * C) + 1);
                }
}

TEST(Resources, LedgerFormulaForKernelRows) {
    const auto shape = ConvShape::make(1, 3, 3, 1, 2, 2, 1);
    const auto kt = build_dbt_kernel(kernel_2x2(), shape);
    CostLedger ledger;
    for (std::size_t p = 0; p < kt.rows(); ++p) encode(kt.dense_row(p), ledger, PrepStrategy::AugmentedQram);
    EXPECT_EQ(ledger_report(ledger, PrepStrategy::AugmentedQram, 16).formula_cost, 32.0);
}

TEST(Resources, ReportCoversAllStrategies) {
    const auto x = grid_3x3();
    QConvConfig cfg(infer_shape(x, kernel_2x2()));
    cfg.plan = ShotPlan::sampled(10, 1);
    const auto r = qconvolve(x, kernel_2x2(), cfg);
    EXPECT_EQ(r.resources.strategies.size(), 4u);
    EXPECT_EQ(r.resources.shots_used, 40u);
    // 5 encodes plus 2 copies per shot.
    EXPECT_EQ(r.resources.ledger.inputs.copies, 5u + 80u);
    EXPECT_EQ(r.resources.ledger.formula_cost, 25.0 + 85.0);
    EXPECT_EQ(r.resources.comparison.size(), 3u);
}

TEST(ShotBudget, UnionBound) {
    EXPECT_EQ(estimate_shot_budget(0.1, 0.05, 1).shots, 185u);
    EXPECT_EQ(estimate_shot_budget(0.1, 0.05, 100).shots, 415u);
    EXPECT_EQ(estimate_shot_budget(0.05, 0.05, 1).shots, 738u);
    const auto p = estimate_shot_budget(0.1, 0.05, 100, 3);
    EXPECT_EQ(p.epsilon, 0.1);
    EXPECT_EQ(p.delta, 0.05);
    EXPECT_EQ(p.seed, 3u);
    EXPECT_THROW(estimate_shot_budget(0.1, 0.05, 0), InvalidPlanError);
    EXPECT_THROW(estimate_shot_budget(0.0, 0.05, 1), InvalidPlanError);
}

TEST(Batched, ExactPlanReproducesConvolution) {
    std::mt19937_64 rng(21);
    auto x = random_tensor<InputBatch>({2, 4, 4, 1}, rng);
    auto k = random_tensor<KernelBank>({2, 2, 1, 2}, rng);
    QConvConfig cfg(infer_shape(x, k));
    cfg.batched = true;
    const auto run = qconvolve_batched_sampling(x, k, cfg);
    EXPECT_LE(run.result.max_abs_error, 1e-10);
    EXPECT_TRUE(run.sampled_ranking.empty());
    EXPECT_EQ(run.exact_ranking.size(), 9u * 2u * 2u);
}

TEST(Batched, RequiresFlagAndInterference) {
    const auto x = grid_3x3();
    QConvConfig cfg(infer_shape(x, kernel_2x2()));
    EXPECT_THROW(qconvolve_batched_sampling(x, kernel_2x2(), cfg), InvalidPlanError);
    cfg.batched = true;
    cfg.circuit = CircuitKind::Swap;
    EXPECT_THROW(qconvolve_batched_sampling(x, kernel_2x2(), cfg), InvalidPlanError);
}

TEST(Batched, ModalCellIsLargestOverlap) {
    const auto x = grid_3x3();
    QConvConfig cfg(infer_shape(x, kernel_2x2()));
    cfg.batched = true;
    cfg.plan = ShotPlan::sampled(100000, 5);
    const auto run = qconvolve_batched_sampling(x, kernel_2x2(), cfg);
    EXPECT_EQ(run.sampled_ranking.front().pair, run.exact_ranking.front().pair);
    EXPECT_LE(run.outcome.total_variation(), 0.05);
}

TEST(Batched, RanksKnownOverlaps) {
    const std::vector<double> overlaps{0.9, 0.3, -0.2, -0.8};
    std::vector<std::optional<AmplitudeState>> rows, cols{state({1, 0})};
    for (double o : overlaps) rows.push_back(state({o, std::sqrt(1 - o * o)}));
    int correct = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto out = batched_sample(rows, cols, ShotPlan::sampled(2000, seed), false);
        bool ok = true;
        for (std::size_t v = 0; v + 1 < overlaps.size(); ++v) ok = ok && out.counts[2 * v] > out.counts[2 * v + 2];
        correct += ok;
    }
    EXPECT_GE(correct, 95);
}

TEST(Batched, OrthogonalStatesGiveUniformJoint) {
    std::vector<std::optional<AmplitudeState>> rows{state({1, 0, 0, 0}), state({0, 1, 0, 0})},
        cols{state({0, 0, 1, 0}), state({0, 0, 0, 1})};
    const std::uint64_t shots = 80000;
    const auto out = batched_sample(rows, cols, ShotPlan::sampled(shots, 99), false);
    double chi2 = 0.0;
    const double expected = static_cast<double>(shots) / 8.0;
    for (auto c : out.counts) chi2 += (c - expected) * (c - expected) / expected;
    // 7 degrees of freedom, 0.1% critical value.
    EXPECT_LT(chi2, 24.32);
}
