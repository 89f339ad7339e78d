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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qconv/engine.hpp"
#include "support/oracles.hpp"

using namespace qconv;
namespace t = qconv::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Case {
    InputBatch x;
    KernelBank k;
    ConvShape shape;
};

/// The shared random grid: H, W <= 8, R, S <= 3, C, M, N <= 3 with stride and padding.
std::vector<Case> shape_grid(std::size_t count, bool allow_stride_pad = true, double lo = -1.0, double hi = 1.0) {
    std::vector<Case> cases;
    for (std::uint64_t seed = 0; seed < count; ++seed) {
        std::mt19937_64 rng(1000 + seed);
        const auto g = t::random_geometry(rng, allow_stride_pad);
        InputBatch x({g.N, g.H, g.W, g.C}, t::random_values(g.N * g.H * g.W * g.C, rng, lo, hi));
        KernelBank k({g.R, g.S, g.C, g.M}, t::random_values(g.R * g.S * g.C * g.M, rng, lo, hi));
        const auto shape = infer_shape(x, k, g.params);
        cases.push_back({std::move(x), std::move(k), shape});
    }
    return cases;
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> state_pairs() {
    std::mt19937_64 rng(314159);
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 2 + rng() % 31;
        auto a = t::random_values(n, rng);
        auto b = t::random_values(n, rng);
        if (i % 3 == 0)
            for (std::size_t j = 0; j < n; ++j) b[j] = -a[j] + 0.5 * b[j];
        pairs.emplace_back(std::move(a), std::move(b));
    }
    return pairs;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Outcome reshape_equivalence() {
    double worst = 0.0;
    for (const auto& c : shape_grid(200)) {
        const auto y = reshape_output(multiply(build_dbt_kernel(c.k, c.shape), flatten_input(c.x)), c.shape);
        const auto ref = conv_reference(c.x, c.k, c.shape);
        std::size_t E = 0, F = 0;
        const auto p = c.shape.params();
        const auto oracle = t::padded_conv({c.x.data().begin(), c.x.data().end()},
                                           {c.k.data().begin(), c.k.data().end()}, c.shape.N(), c.shape.H(),
                                           c.shape.W(), c.shape.C(), c.shape.R(), c.shape.S(), c.shape.M(),
                                           p.stride_h, p.stride_w, p.pad_h, p.pad_w, E, F);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            worst = std::max(worst, std::abs(y.data()[i] - ref.data()[i]));
            worst = std::max(worst, std::abs(y.data()[i] - oracle[i]));
        }
    }
    return {worst <= 1e-12, "200 cases, max |diff| = " + sci(worst)};
}

Outcome output_shape_formula() {
    std::size_t checked = 0, wrong = 0;
    for (std::size_t H = 1; H <= 10; ++H)
        for (std::size_t W = 1; W <= 10; ++W)
            for (std::size_t R = 1; R <= H; ++R)
                for (std::size_t S = 1; S <= W; ++S)
                    for (std::size_t st = 1; st <= 3; ++st)
                        for (std::size_t pad = 0; pad <= 2; ++pad) {
                            const auto out = derive_output_shape(H, W, R, S, st, pad);
                            ++checked;
                            if (out.E != t::brute_window_count(H, R, st, pad) ||
                                out.F != t::brute_window_count(W, S, st, pad)) {
                                ++wrong;
                            }
                        }
    return {wrong == 0, std::to_string(checked) + " configurations, " + std::to_string(wrong) + " mismatches"};
}

Outcome swap_formula() {
    double worst = 0.0;
    for (const auto& [a, b] : state_pairs()) {
        const double p = swap_test_probability(AmplitudeState::from_vector(a), AmplitudeState::from_vector(b));
        worst = std::max(worst, std::abs(p - t::swap_formula(t::cosine(a, b))));
    }
    const auto s = AmplitudeState::from_vector(std::vector<double>{0.3, -0.5, 0.8, 0.1});
    const double same = swap_test_probability(s, s);
    const double orth = swap_test_probability(AmplitudeState::from_vector(std::vector<double>{1, 0, 0, 0}),
                                              AmplitudeState::from_vector(std::vector<double>{0, 0, 1, 0}));
    const bool pass = worst <= 1e-12 && same == 1.0 && std::abs(orth - 0.5) <= 1e-12;
    return {pass, "500 pairs, max |diff| = " + sci(worst) + ", identical P0 = " + std::to_string(same) +
                      ", orthogonal P0 = " + std::to_string(orth)};
}

Outcome interference_formula() {
    double worst = 0.0;
    std::size_t negatives = 0, disagree = 0;
    for (const auto& [a, b] : state_pairs()) {
        const auto sa = AmplitudeState::from_vector(a), sb = AmplitudeState::from_vector(b);
        const double ov = t::cosine(a, b);
        const double p = interference_test_probability(sa, sb);
        worst = std::max(worst, std::abs(p - t::interference_formula(ov)));
        if (ov < -1e-6) {
            ++negatives;
            if (std::abs(p - swap_test_probability(sa, sb)) > 1e-9) ++disagree;
        }
    }
    const bool pass = worst <= 1e-12 && negatives > 0 && disagree == negatives;
    return {pass, "500 pairs, max |diff| = " + sci(worst) + ", " + std::to_string(disagree) + "/" +
                      std::to_string(negatives) + " negative-overlap pairs distinguish the circuits"};
}

Outcome sampling_concentration() {
    const double eps = 0.05, delta = 0.05;
    const auto budget = estimate_shot_budget(eps, delta, 1);
    const std::vector<std::pair<std::vector<double>, std::vector<double>>> fixed = {
        {{1, 0}, {0.6, 0.8}}, {{0.2, -0.7, 0.4, 0.1}, {-0.5, 0.3, 0.3, 0.9}}, {{1, 1, 1}, {-1, -1, -0.9}}};
    double worst_rate = 0.0;
    bool ok = true;
    for (std::size_t f = 0; f < fixed.size(); ++f) {
        const auto a = AmplitudeState::from_vector(fixed[f].first), b = AmplitudeState::from_vector(fixed[f].second);
        const double truth = t::cosine(fixed[f].first, fixed[f].second);
        int failures = 0;
        for (std::uint64_t trial = 0; trial < 200; ++trial) {
            auto plan = budget;
            plan.seed = 7000 + 1000 * f + trial;
            if (std::abs(estimate_overlap(a, b, plan).estimate - truth) > 2 * eps) ++failures;
        }
        const double rate = failures / 200.0;
        worst_rate = std::max(worst_rate, rate);
        ok = ok && rate <= 0.05 && rate <= delta + 0.03;
    }
    return {ok, std::to_string(budget.shots) + " shots, worst failure rate " + std::to_string(worst_rate) +
                    " over 3 pairs x 200 trials"};
}

Outcome exact_end_to_end() {
    double worst = 0.0;
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> scale(0.1, 20.0);
    for (auto& c : shape_grid(200)) {
        const double sx = scale(rng), sk = scale(rng);
        for (auto& v : c.x.data()) v *= sx;
        for (auto& v : c.k.data()) v *= sk;
        QConvConfig cfg(c.shape);
        const auto r = qconvolve(c.x, c.k, cfg);
        worst = std::max(worst, r.max_abs_error);
        std::size_t E = 0, F = 0;
        const auto p = c.shape.params();
        const auto oracle = t::padded_conv({c.x.data().begin(), c.x.data().end()},
                                           {c.k.data().begin(), c.k.data().end()}, c.shape.N(), c.shape.H(),
                                           c.shape.W(), c.shape.C(), c.shape.R(), c.shape.S(), c.shape.M(),
                                           p.stride_h, p.stride_w, p.pad_h, p.pad_w, E, F);
        for (std::size_t i = 0; i < oracle.size(); ++i)
            worst = std::max(worst, std::abs(r.estimated.data()[i] - oracle[i]));
    }
    return {worst <= 1e-10, "200 cases with rescaled norms, max |diff| = " + sci(worst)};
}

Outcome batched_distribution() {
    // 4 x 2 system: E = F = 2, M = 1 gives four Kt rows; N = 2 columns.
    std::mt19937_64 rng(8128);
    InputBatch x({2, 3, 3, 1}, t::random_values(18, rng));
    KernelBank k({2, 2, 1, 1}, t::random_values(4, rng));
    QConvConfig cfg(infer_shape(x, k));
    cfg.batched = true;
    cfg.plan = ShotPlan::sampled(100000, 4242);
    const auto run = qconvolve_batched_sampling(x, k, cfg);
    const auto& out = run.outcome;

    const double total = std::accumulate(out.exact_joint.begin(), out.exact_joint.end(), 0.0);
    // Independent joint: uniform over the 8 pairs times (1 + cos) / 2.
    const auto kt = build_dbt_kernel(k, cfg.shape);
    const auto flat = flatten_input(x);
    double oracle_gap = 0.0;
    std::size_t best = 0;
    double best_p0 = -1.0;
    for (std::size_t v = 0; v < out.pairs.size(); ++v) {
        const auto [p, q] = out.pairs[v];
        const double p0 = t::interference_formula(t::cosine(kt.dense_row(p), flat.column(q)));
        oracle_gap = std::max(oracle_gap, std::abs(out.exact_joint[2 * v] - p0 / 8.0));
        if (p0 > best_p0) {
            best_p0 = p0;
            best = v;
        }
    }
    const double tv = out.total_variation();
    const bool modal = run.sampled_ranking.front().pair == out.pairs[best];
    const bool pass =
        out.pairs.size() == 8 && std::abs(total - 1.0) <= 1e-12 && oracle_gap <= 1e-12 && tv <= 0.05 && modal;
    return {pass, "sum = 1 " + std::string(total >= 1.0 ? "+ " : "- ") + sci(std::abs(total - 1.0)) +
                      ", TV = " + std::to_string(tv) + ", modal cell " + (modal ? "matches" : "differs")};
}

Outcome cost_ledger() {
    std::vector<std::string> failed;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    };

    // Kernel rows of the small 3x3 / 2x2 example: 4 rows x 4 taps.
    const auto shape = ConvShape::make(1, 3, 3, 1, 2, 2, 1);
    const auto kt = build_dbt_kernel(KernelBank({2, 2, 1, 1}, {1, 2, 3, 4}), shape);
    {
        CostLedger ledger;
        for (std::size_t p = 0; p < kt.rows(); ++p) encode(kt.dense_row(p), ledger, PrepStrategy::AugmentedQram);
        const std::size_t nnz = 16, C = 16;
        check(ledger_report(ledger, PrepStrategy::AugmentedQram, C).formula_cost == double(nnz + C), "aqram");
        for (int rep = 0; rep < 3; ++rep)
            for (std::size_t p = 0; p < kt.rows(); ++p) encode(kt.dense_row(p), ledger, PrepStrategy::AugmentedQram);
        check(ledger.preprocess_touches() == nnz, "aqram preprocessing charged once");
        check(ledger.prep_invocations() == 16, "aqram invocations");
    }
    {
        CostLedger ledger(4);
        for (std::size_t p = 0; p < kt.rows(); ++p)
            encode(kt.dense_row(p), ledger, PrepStrategy::ParallelAugmentedQram);
        const std::size_t C = 7;
        check(ledger_report(ledger, PrepStrategy::ParallelAugmentedQram, C).formula_cost == double(16 / 4 + C),
              "parallel-aqram");
        check(ledger.preprocess_touches() == 4, "parallel-aqram touches");
    }
    {
        // Nonzeros (1, 2, 2, 4) at positions {1, 4, 9, 14} of R^16: norm 5,
        // normalised l_inf 4/5.
        std::vector<double> v(16, 0.0);
        v[1] = 1, v[4] = 2, v[9] = 2, v[14] = 4;
        const double linf = 0.8;
        CostLedger sparse, plain;
        encode(v, sparse, PrepStrategy::SparseAmplitudeAmplification);
        encode(v, plain, PrepStrategy::AmplitudeAmplification);
        check(sparse.amplitude_amp_rounds() == std::uint64_t(std::ceil(std::sqrt(4.0) * linf)), "sparse-aa rounds");
        check(plain.amplitude_amp_rounds() == std::uint64_t(std::ceil(std::sqrt(16.0) * linf)), "aa rounds");
        const std::size_t C = 5;
        check(std::abs(ledger_report(sparse, PrepStrategy::SparseAmplitudeAmplification, C).formula_cost -
                       (4 + C * std::sqrt(4.0) * linf)) <= 1e-12,
              "sparse-aa formula");
        check(std::abs(ledger_report(plain, PrepStrategy::AmplitudeAmplification, C).formula_cost -
                       C * std::sqrt(16.0) * linf) <= 1e-12,
              "aa formula");
        encode(v, sparse, PrepStrategy::SparseAmplitudeAmplification);
        check(sparse.preprocess_touches() == 4, "sparse-aa preprocessing charged once");
        check(sparse.amplitude_amp_rounds() == 4, "sparse-aa rounds accumulate per copy");
    }
    std::string detail = failed.empty() ? "all scenarios match" : "mismatch:";
    for (const auto& f : failed) detail += " " + f;
    return {failed.empty(), detail};
}

Outcome resource_formulas() {
    auto lg = [](std::size_t n) {
        std::size_t l = 0, p = 1;
        while (p < n) p *= 2, ++l;
        return l;
    };
    std::size_t checked = 0, wrong = 0;
    for (std::size_t N = 1; N <= 5; ++N)
        for (std::size_t H = 1; H <= 7; ++H)
            for (std::size_t W = 1; W <= 7; ++W)
                for (std::size_t C = 1; C <= 3; ++C)
                    for (std::size_t R = 1; R <= std::min<std::size_t>(H, 3); ++R)
                        for (std::size_t S = 1; S <= std::min<std::size_t>(W, 3); ++S)
                            for (std::size_t M = 1; M <= 3; ++M) {
                                const auto s = ConvShape::make(N, H, W, C, R, S, M);
                                const std::size_t E = H - R + 1, F = W - S + 1;
                                const auto q = qubit_counts(s);
                                ++checked;
                                if (q.total() != lg(E * F * M) + lg(N) + lg(H * W * C) + 1) ++wrong;
                            }
    return {wrong == 0, std::to_string(checked) + " shapes, " + std::to_string(wrong) + " mismatches"};
}

Outcome sparsity_structure() {
    std::size_t wrong = 0;
    for (const auto& c : shape_grid(200, false, 0.5, 1.5)) {
        const auto& s = c.shape;
        if (build_dbt_kernel(c.k, s).nnz() != s.E() * s.F() * s.M() * s.R() * s.S() * s.C()) ++wrong;
    }
    return {wrong == 0, "200 dense pad-0 cases, " + std::to_string(wrong) + " mismatches"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "reshape equivalence", 5, reshape_equivalence},
        {2, "output-shape formula", 5, output_shape_formula},
        {3, "swap-test formula", 5, swap_formula},
        {4, "interference formula", 5, interference_formula},
        {5, "sampling concentration", 30, sampling_concentration},
        {6, "end-to-end exact mode", 30, exact_end_to_end},
        {7, "batched distribution", 30, batched_distribution},
        {8, "cost ledger", 5, cost_ledger},
        {9, "resource formulas", 5, resource_formulas},
        {10, "sparsity structure", 5, sparsity_structure},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += " (over time budget)";
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %2d %-24s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
