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
#include <optional>

namespace qconv {

QubitCounts qubit_counts(const ConvShape& shape) {
    QubitCounts q;
    q.index_p = ceil_log2(shape.output_length());
    q.index_q = ceil_log2(shape.N());
    q.data = ceil_log2(shape.input_length());
    q.ancilla = 1;
    return q;
}

std::vector<ComplexityRow> complexity_comparison(const ConvShape& shape) {
    const double n = static_cast<double>(shape.input_length());
    const double nnz = static_cast<double>(shape.taps_per_filter());
    return {
        {"dbt + aqram overlap", "~O(sqrt(nnz(x)))", "~O(1)", "O(nnz(x))", "efficient for sparse data", "high", std::sqrt(nnz),
         1.0, nnz},
        {"toeplitz + qmm", "~O(n^2)", "O(n)", "O(n^2)", "dense QRAM encoding", "low", n * n, n, n * n},
        {"swap test", "~O(n)", "O(n)", "O(n)", "repetitive ancilla prep", "medium", n, n, n},
    };
}

ResourceReport resource_report(const ConvShape& shape, const QConvConfig& cfg, const CostLedger& ledger) {
    ResourceReport r;
    r.qubits = qubit_counts(shape);
    const std::size_t copies = ledger.copies();
    r.ledger = ledger_report(ledger, cfg.strategy, copies);
    for (auto s : kAllStrategies) r.strategies.push_back(ledger_report(ledger, s, copies));
    r.shots_used = ledger.shots();
    r.depth_class = cfg.circuit == CircuitKind::Interference
                        ? "O(1) estimation layer (H, controlled preparation, H) + state preparation"
                        : "O(log HWC) controlled-SWAP layer + state preparation";
    r.comparison = complexity_comparison(shape);
    return r;
}

ShotPlan estimate_shot_budget(double epsilon, double delta, std::size_t entries, std::uint64_t seed) {
    if (entries == 0) throw InvalidPlanError("entry count must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidPlanError("delta must lie in (0, 1)");
    ShotPlan plan;
    plan.mode = EstimationMode::Sampled;
    plan.shots = hoeffding_shots(epsilon, delta / static_cast<double>(entries));
    plan.epsilon = epsilon;
    plan.delta = delta;
    plan.seed = seed;
    return plan;
}

namespace {

struct Operands {
    SparseMatrix kernel;
    std::vector<std::optional<AmplitudeState>> rows;
    std::vector<std::optional<AmplitudeState>> cols;
};

Operands encode_operands(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg, CostLedger& ledger) {
    check_consistent(x, k, cfg.shape);
    cfg.plan.validate();
    Operands ops{build_dbt_kernel(k, cfg.shape), {}, {}};
    ops.rows.resize(ops.kernel.rows());
    for (std::size_t p = 0; p < ops.kernel.rows(); ++p) {
        if (ops.kernel.row(p).empty()) continue;
        ops.rows[p] = encode(ops.kernel.dense_row(p), ledger, cfg.strategy);
    }
    const Matrix flat = flatten_input(x);
    ops.cols.resize(flat.cols());
    for (std::size_t q = 0; q < flat.cols(); ++q) {
        const auto col = flat.column(q);
        if (std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0; })) continue;
        ops.cols[q] = encode(col, ledger, cfg.strategy);
    }
    return ops;
}

void finish_result(QConvResult& r, const Matrix& y_flat, const Matrix& se_flat, const InputBatch& x,
                   const KernelBank& k, const QConvConfig& cfg, const CostLedger& ledger) {
    r.estimated = reshape_output(y_flat, cfg.shape);
    r.std_errors = reshape_output(se_flat, cfg.shape);
    r.exact = conv_reference(x, k, cfg.shape);
    double sum = 0.0;
    const auto est = r.estimated.data();
    const auto ref = r.exact.data();
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double e = std::abs(est[i] - ref[i]);
        r.max_abs_error = std::max(r.max_abs_error, e);
        sum += e;
    }
    r.mean_abs_error = est.empty() ? 0.0 : sum / static_cast<double>(est.size());
    r.resources = resource_report(cfg.shape, cfg, ledger);
}

}  // namespace

QConvResult qconvolve(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg) {
    CostLedger ledger(cfg.parallel_units);
    return qconvolve(x, k, cfg, ledger);
}

QConvResult qconvolve(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg, CostLedger& ledger) {
    const Operands ops = encode_operands(x, k, cfg, ledger);
    const std::size_t P = ops.rows.size();
    const std::size_t N = ops.cols.size();

    QConvResult r;
    Matrix y_flat(P, N);
    Matrix se_flat(P, N);
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t q = 0; q < N; ++q) {
            if (!ops.rows[p] || !ops.cols[q]) {
                ++r.zero_entries;
                continue;
            }
            const auto& kp = *ops.rows[p];
            const auto& xq = *ops.cols[q];
            const auto est = estimate_overlap(kp, xq, cfg.plan, cfg.circuit, p * N + q);
            const double scale = kp.source_norm() * xq.source_norm();
            y_flat(p, q) = scale * est.estimate;
            se_flat(p, q) = scale * est.std_error;
            ledger.record_shots(est.shots);
            r.sign_loss = r.sign_loss || est.sign_lost;
            ++r.estimated_entries;
        }
    }
    finish_result(r, y_flat, se_flat, x, k, cfg, ledger);
    return r;
}

BatchedRun qconvolve_batched_sampling(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg) {
    CostLedger ledger(cfg.parallel_units);
    return qconvolve_batched_sampling(x, k, cfg, ledger);
}

BatchedRun qconvolve_batched_sampling(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg,
                                      CostLedger& ledger) {
    if (!cfg.batched) throw InvalidPlanError("batched sampling requested with cfg.batched = false");
    if (cfg.circuit != CircuitKind::Interference) {
        throw InvalidPlanError("batched sampling is defined for the interference circuit only");
    }
    const Operands ops = encode_operands(x, k, cfg, ledger);
    BatchedRun run;
    run.outcome = batched_sample(ops.rows, ops.cols, cfg.plan, /*keep_samples=*/false);
    const auto& out = run.outcome;
    ledger.record_shots(out.shots);

    const bool sampled = cfg.plan.mode == EstimationMode::Sampled;
    const double pairs = static_cast<double>(out.pairs.size());
    const std::size_t P = ops.rows.size();
    const std::size_t N = ops.cols.size();
    Matrix y_flat(P, N);
    Matrix se_flat(P, N);
    std::vector<RankedCell> cells;
    cells.reserve(out.pairs.size());
    for (std::size_t v = 0; v < out.pairs.size(); ++v) {
        const auto [p, q] = out.pairs[v];
        RankedCell cell{out.pairs[v], sampled ? out.counts[2 * v] : 0, out.empirical(2 * v), out.pair_p0[v]};
        cells.push_back(cell);

        // P(p, q, 0) = P_pq(0) / pairs, so the pair's P_pq(0) is pairs * frequency.
        const double p0 = sampled ? pairs * cell.frequency : out.pair_p0[v];
        const double scale = ops.rows[p]->source_norm() * ops.cols[q]->source_norm();
        y_flat(p, q) = scale * (2.0 * p0 - 1.0);
        if (sampled) {
            const double f = cell.frequency;
            se_flat(p, q) = scale * 2.0 * pairs * std::sqrt(f * (1.0 - f) / static_cast<double>(out.shots));
        }
    }

    run.exact_ranking = cells;
    std::stable_sort(run.exact_ranking.begin(), run.exact_ranking.end(),
                     [](const RankedCell& a, const RankedCell& b) { return a.exact_p0 > b.exact_p0; });
    if (sampled) {
        run.sampled_ranking = cells;
        std::stable_sort(run.sampled_ranking.begin(), run.sampled_ranking.end(),
                         [](const RankedCell& a, const RankedCell& b) { return a.count > b.count; });
    }

    run.result.estimated_entries = out.pairs.size();
    run.result.zero_entries = P * N - out.pairs.size();
    finish_result(run.result, y_flat, se_flat, x, k, cfg, ledger);
    return run;
}

}  // namespace qconv
