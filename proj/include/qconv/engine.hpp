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

#pragma once

/**
 * @file engine.hpp
 * End-to-end convolution through overlap estimation.
 *
 * The kernel bank is reshaped into the sparse matrix Kt, every nonzero row
 * of Kt and every nonzero input column is amplitude-encoded once, and each
 * output entry is recovered as ||K_p|| * ||X_q|| * <K_p|X_q> with the
 * overlap estimated by the configured circuit. Rows or columns that are
 * entirely zero produce exact zeros without running any circuit.
 */

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qconv/circuits.hpp"
#include "qconv/qstate.hpp"
#include "qconv/reshape.hpp"
#include "qconv/tensor.hpp"

namespace qconv {

struct QConvConfig {
    ConvShape shape;
    ShotPlan plan = ShotPlan::exact();
    PrepStrategy strategy = PrepStrategy::AugmentedQram;
    CircuitKind circuit = CircuitKind::Interference;
    bool batched = false;
    std::size_t parallel_units = 1;

    explicit QConvConfig(ConvShape s) : shape(s) {}
};

struct QubitCounts {
    std::size_t index_p = 0;  // ceil(log2 EFM)
    std::size_t index_q = 0;  // ceil(log2 N)
    std::size_t data = 0;     // ceil(log2 HWC)
    std::size_t ancilla = 1;

    std::size_t total() const { return index_p + index_q + data + ancilla; }
    bool operator==(const QubitCounts&) const = default;
};

QubitCounts qubit_counts(const ConvShape& shape);

/// One method of the complexity comparison, asymptotic entries verbatim and
/// instantiated at n = HWC and nnz(x) = RSC (nonzeros of one Kt row).
struct ComplexityRow {
    std::string method;
    std::string qram_complexity;
    std::string circuit_depth;
    std::string preprocessing;
    std::string state_prep;
    std::string nisq_suitability;
    double qram_value = 0.0;
    double depth_value = 0.0;
    double preprocessing_value = 0.0;
};

std::vector<ComplexityRow> complexity_comparison(const ConvShape& shape);

struct ResourceReport {
    QubitCounts qubits;
    /// Closed-form cost of the configured strategy at the ledger's totals.
    CostSummary ledger;
    /// The same evaluation for every strategy, for side-by-side reading.
    std::vector<CostSummary> strategies;
    std::uint64_t shots_used = 0;
    std::string depth_class;
    std::vector<ComplexityRow> comparison;
};

/// Copies C are taken from the ledger's consumed-copies counter.
ResourceReport resource_report(const ConvShape& shape, const QConvConfig& cfg, const CostLedger& ledger);

/// Per-entry Hoeffding budget with a union bound over `entries`:
/// shots = ceil(ln(2 entries / delta) / (2 epsilon^2)).
ShotPlan estimate_shot_budget(double epsilon, double delta, std::size_t entries, std::uint64_t seed = 0);

struct QConvResult {
    OutputBatch estimated;
    OutputBatch exact;
    OutputBatch std_errors;
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    /// SWAP circuit was used on data with at least one negative overlap.
    bool sign_loss = false;
    std::size_t estimated_entries = 0;
    std::size_t zero_entries = 0;
    ResourceReport resources;
};

QConvResult qconvolve(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg);
/// Same, charging a caller-owned ledger so kernel preprocessing is shared
/// across runs.
QConvResult qconvolve(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg, CostLedger& ledger);

struct RankedCell {
    PairIndex pair;
    std::uint64_t count = 0;
    double frequency = 0.0;
    /// (1 + <K_p|X_q>) / 2.
    double exact_p0 = 0.0;
};

struct BatchedRun {
    /// Cells by descending ancilla-0 frequency (ties by pair order).
    std::vector<RankedCell> sampled_ranking;
    /// Cells by descending exact P_pq(0).
    std::vector<RankedCell> exact_ranking;
    BatchedOutcome outcome;
    /// Output reconstructed from the ancilla-0 frequencies.
    QConvResult result;
};

/// Superposed sampling over all (p, q). Requires cfg.batched and a sampled
/// plan for a ranking; an exact plan yields only the exact ranking.
BatchedRun qconvolve_batched_sampling(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg);
BatchedRun qconvolve_batched_sampling(const InputBatch& x, const KernelBank& k, const QConvConfig& cfg,
                                      CostLedger& ledger);

}  // namespace qconv
