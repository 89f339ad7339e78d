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
 * @file qstate.hpp
 * Amplitude encoding of real vectors under a cost-modelled sparse
 * key-value QRAM.
 *
 * States are produced exactly; what is modelled is the cost. Every encode
 * charges a CostLedger according to the chosen PrepStrategy, and
 * ledger_report() evaluates the closed-form state-preparation costs for
 * C copies next to the raw counters.
 */

#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qconv/errors.hpp"

namespace qconv {

/// Smallest l with 2^l >= n; 0 for n <= 1.
inline std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1)); }

enum class PrepStrategy {
    AmplitudeAmplification,
    SparseAmplitudeAmplification,
    AugmentedQram,
    ParallelAugmentedQram,
};

/// CLI spelling: aa, sparse-aa, aqram, parallel-aqram.
std::string_view to_string(PrepStrategy s);
std::optional<PrepStrategy> parse_strategy(std::string_view name);
inline constexpr PrepStrategy kAllStrategies[] = {
    PrepStrategy::AmplitudeAmplification, PrepStrategy::SparseAmplitudeAmplification, PrepStrategy::AugmentedQram,
    PrepStrategy::ParallelAugmentedQram};

struct CompactState;
class KeyValueMap;

bool uses_qram(PrepStrategy s);
bool uses_amplitude_amplification(PrepStrategy s);

/// Unit-norm real amplitudes over a power-of-two register, plus the norm
/// of the vector they came from. Indices >= length() carry zero amplitude.
class AmplitudeState {
   public:
    /// Direct normalisation of v. Throws ZeroVectorError if ||v|| == 0.
    static AmplitudeState from_vector(std::span<const double> v);

    std::size_t dim() const { return amplitudes_.size(); }
    std::size_t length() const { return length_; }
    std::size_t qubits() const { return ceil_log2(dim()); }
    std::span<const double> amplitudes() const { return amplitudes_; }
    double operator[](std::size_t i) const { return amplitudes_[i]; }
    double source_norm() const { return source_norm_; }

    /// The source vector, source_norm * amplitudes on the first length() entries.
    std::vector<double> reconstruct() const;

    AmplitudeState negated() const;

    bool operator==(const AmplitudeState&) const = default;

   private:
    friend AmplitudeState remap(const CompactState&, const KeyValueMap&);
    AmplitudeState(std::vector<double> amps, std::size_t length, double norm)
        : amplitudes_(std::move(amps)), length_(length), source_norm_(norm) {}

    std::vector<double> amplitudes_;
    std::size_t length_ = 0;
    double source_norm_ = 0.0;
};

struct KeyValuePair {
    std::size_t key = 0;    // dense slot i in [nnz]
    std::size_t value = 0;  // original position t_i in [n]
    bool operator==(const KeyValuePair&) const = default;
};

/// Contiguous slot <-> original position of the nonzeros of a vector.
class KeyValueMap {
   public:
    KeyValueMap() = default;
    KeyValueMap(std::vector<KeyValuePair> pairs, std::size_t length);

    std::span<const KeyValuePair> pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    /// Length n of the vector the map indexes into.
    std::size_t length() const { return length_; }

    std::size_t position_of(std::size_t key) const;
    std::optional<std::size_t> key_of(std::size_t position) const;

   private:
    std::vector<KeyValuePair> pairs_;
    std::size_t length_ = 0;
};

KeyValueMap build_key_value_map(std::span<const double> v);

/// Phase one of sparse preparation: sum_i v_{t_i} |i> / ||v|| over nnz slots.
struct CompactState {
    std::vector<double> amplitudes;
    double norm = 0.0;
};

CompactState prepare_compact(std::span<const double> v, const KeyValueMap& map);

/// Phase two: send slot i to position t_i, padding to a power of two.
AmplitudeState remap(const CompactState& compact, const KeyValueMap& map);

struct LedgerSnapshot {
    std::uint64_t preprocess_touches = 0;
    std::uint64_t qram_queries = 0;
    std::uint64_t prep_invocations = 0;
    std::uint64_t amplitude_amp_rounds = 0;
    std::uint64_t shots = 0;
    std::uint64_t copies = 0;
    std::size_t parallel_units = 1;
    std::size_t registered_vectors = 0;
    std::size_t registered_nnz = 0;
    std::size_t registered_dim_max = 0;
    double registered_linf_max = 0.0;

    bool operator==(const LedgerSnapshot&) const = default;
};

/// Resource counters shared by every encode of a run. Counter updates are
/// atomic; the registry of already-inserted vectors is guarded by a mutex.
class CostLedger {
   public:
    explicit CostLedger(std::size_t parallel_units = 1);
    CostLedger(const CostLedger&) = delete;
    CostLedger& operator=(const CostLedger&) = delete;

    std::uint64_t preprocess_touches() const { return preprocess_touches_.load(); }
    std::uint64_t qram_queries() const { return qram_queries_.load(); }
    std::uint64_t prep_invocations() const { return prep_invocations_.load(); }
    std::uint64_t amplitude_amp_rounds() const { return amplitude_amp_rounds_.load(); }
    std::uint64_t shots() const { return shots_.load(); }
    /// State copies consumed: one per encode plus two per shot.
    std::uint64_t copies() const { return copies_.load(); }
    std::size_t parallel_units() const { return parallel_units_; }

    /// Inserts v into the registry. Returns true the first time a given
    /// vector (compared exactly) is seen.
    bool register_vector(std::span<const double> v, std::size_t nnz, double linf_normalized);

    void add_preprocess_touches(std::uint64_t n) { preprocess_touches_ += n; }
    void add_qram_queries(std::uint64_t n) { qram_queries_ += n; }
    void add_prep_invocation() {
        ++prep_invocations_;
        ++copies_;
    }
    void add_amplitude_amp_rounds(std::uint64_t n) { amplitude_amp_rounds_ += n; }
    /// Each shot re-prepares both states of a two-state circuit.
    void record_shots(std::uint64_t n) {
        shots_ += n;
        copies_ += 2 * n;
    }

    LedgerSnapshot snapshot() const;

   private:
    std::atomic<std::uint64_t> preprocess_touches_{0};
    std::atomic<std::uint64_t> qram_queries_{0};
    std::atomic<std::uint64_t> prep_invocations_{0};
    std::atomic<std::uint64_t> amplitude_amp_rounds_{0};
    std::atomic<std::uint64_t> shots_{0};
    std::atomic<std::uint64_t> copies_{0};
    std::size_t parallel_units_;

    mutable std::mutex registry_mutex_;
    std::set<std::vector<double>> registry_;
    std::size_t registered_nnz_ = 0;
    std::size_t registered_dim_max_ = 0;
    double registered_linf_max_ = 0.0;
};

/// Amplitude-encodes v and charges the ledger:
///  - prep_invocations += 1 (always);
///  - preprocess_touches += nnz(v), or ceil(nnz(v)/p) for the parallel
///    variant, the first time v is seen (nothing for plain amplitude
///    amplification, which has no preprocessing stage);
///  - amplitude_amp_rounds += ceil(sqrt(nnz) * ||v/||v|| ||_inf) for the
///    sparse variant, ceil(sqrt(n) * ...) for the plain one;
///  - qram_queries += ceil(log2 n) for the two QRAM variants.
/// Sparse strategies go through the key-value two-phase path.
/// Throws ZeroVectorError when v has no nonzero entry.
AmplitudeState encode(std::span<const double> v, CostLedger& ledger, PrepStrategy strategy);

/// Real inner product of two states; throws DimensionMismatchError.
double inner_product_exact(const AmplitudeState& a, const AmplitudeState& b);

/// Arguments of the closed-form preparation costs for C copies of |x>.
struct PrepCostInputs {
    std::size_t n = 0;
    std::size_t nnz = 0;
    double linf = 0.0;  // of the normalised vector
    std::size_t copies = 0;
    std::size_t parallel_units = 1;
};

/// Closed-form cost without its polylog factor:
///   aa              C * sqrt(n) * linf
///   sparse-aa       nnz + C * sqrt(nnz) * linf
///   aqram           nnz + C
///   parallel-aqram  ceil(nnz / p) + C
double prep_cost(PrepStrategy s, const PrepCostInputs& in);
std::string_view prep_cost_formula(PrepStrategy s);
std::string_view prep_extra_resources(PrepStrategy s);

struct CostSummary {
    PrepStrategy strategy = PrepStrategy::AugmentedQram;
    PrepCostInputs inputs;
    std::string formula;
    double formula_cost = 0.0;
    /// Symbolic multiplier hidden by the soft-O, e.g. "polylog(16)".
    std::string polylog_factor;
    std::string extra_resources;
    LedgerSnapshot counted;
};

/// Evaluates the closed-form cost at the ledger's registry totals (total
/// nnz, largest dimension, largest normalised l_inf) for `copies` copies.
CostSummary ledger_report(const CostLedger& ledger, PrepStrategy strategy, std::size_t copies);

}  // namespace qconv
