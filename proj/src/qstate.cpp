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

#include "qconv/qstate.hpp"

#include <algorithm>
#include <cmath>

namespace qconv {

std::string_view to_string(PrepStrategy s) {
    switch (s) {
        case PrepStrategy::AmplitudeAmplification:
            return "aa";
        case PrepStrategy::SparseAmplitudeAmplification:
            return "sparse-aa";
        case PrepStrategy::AugmentedQram:
            return "aqram";
        case PrepStrategy::ParallelAugmentedQram:
            return "parallel-aqram";
    }
    return "unknown";
}

std::optional<PrepStrategy> parse_strategy(std::string_view name) {
    for (auto s : kAllStrategies) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

bool uses_qram(PrepStrategy s) {
    return s == PrepStrategy::AugmentedQram || s == PrepStrategy::ParallelAugmentedQram;
}

bool uses_amplitude_amplification(PrepStrategy s) {
    return s == PrepStrategy::AmplitudeAmplification || s == PrepStrategy::SparseAmplitudeAmplification;
}

namespace {

double l2_norm(std::span<const double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return std::sqrt(sq);
}

std::size_t padded_dim(std::size_t n) { return std::size_t{1} << ceil_log2(n); }

// ceil() that ignores rounding noise just above an integer.
std::uint64_t ceil_count(double x) { return static_cast<std::uint64_t>(std::ceil(x - 1e-9)); }

}  // namespace

AmplitudeState AmplitudeState::from_vector(std::span<const double> v) {
    if (v.empty()) throw ZeroVectorError("cannot encode an empty vector");
    const double norm = l2_norm(v);
    if (norm == 0.0) throw ZeroVectorError("cannot encode a zero vector");
    if (!std::isfinite(norm)) throw ValueError("cannot encode a vector with non-finite entries");
    std::vector<double> amps(padded_dim(v.size()), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) amps[i] = v[i] / norm;
    return AmplitudeState(std::move(amps), v.size(), norm);
}

std::vector<double> AmplitudeState::reconstruct() const {
    std::vector<double> out(length_);
    for (std::size_t i = 0; i < length_; ++i) out[i] = source_norm_ * amplitudes_[i];
    return out;
}

AmplitudeState AmplitudeState::negated() const {
    auto amps = amplitudes_;
    for (auto& a : amps) a = -a;
    return AmplitudeState(std::move(amps), length_, source_norm_);
}

KeyValueMap::KeyValueMap(std::vector<KeyValuePair> pairs, std::size_t length)
    : pairs_(std::move(pairs)), length_(length) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        if (pairs_[i].key != i) throw ValueError("key-value map keys must be contiguous from 0");
        if (pairs_[i].value >= length_) throw ShapeError("key-value map position out of range");
        if (i > 0 && pairs_[i - 1].value >= pairs_[i].value) {
            throw ValueError("key-value map positions must be strictly increasing");
        }
    }
}

std::size_t KeyValueMap::position_of(std::size_t key) const {
    if (key >= pairs_.size()) throw ShapeError("key-value map key out of range");
    return pairs_[key].value;
}

std::optional<std::size_t> KeyValueMap::key_of(std::size_t position) const {
    const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), position,
                                     [](const KeyValuePair& p, std::size_t pos) { return p.value < pos; });
    if (it == pairs_.end() || it->value != position) return std::nullopt;
    return it->key;
}

KeyValueMap build_key_value_map(std::span<const double> v) {
    std::vector<KeyValuePair> pairs;
    for (std::size_t t = 0; t < v.size(); ++t) {
        if (v[t] != 0.0) pairs.push_back({pairs.size(), t});
    }
    return KeyValueMap(std::move(pairs), v.size());
}

CompactState prepare_compact(std::span<const double> v, const KeyValueMap& map) {
    if (v.size() != map.length()) throw DimensionMismatchError("vector length differs from key-value map length");
    if (map.size() == 0) throw ZeroVectorError("cannot encode a zero vector");
    CompactState out;
    out.amplitudes.reserve(map.size());
    double sq = 0.0;
    for (const auto& p : map.pairs()) {
        out.amplitudes.push_back(v[p.value]);
        sq += v[p.value] * v[p.value];
    }
    out.norm = std::sqrt(sq);
    if (!std::isfinite(out.norm)) throw ValueError("cannot encode a vector with non-finite entries");
    for (auto& a : out.amplitudes) a /= out.norm;
    return out;
}

AmplitudeState remap(const CompactState& compact, const KeyValueMap& map) {
    if (compact.amplitudes.size() != map.size()) {
        throw DimensionMismatchError("compact state size differs from key-value map size");
    }
    if (map.length() == 0 || compact.norm == 0.0) throw ZeroVectorError("cannot encode a zero vector");
    std::vector<double> amps(padded_dim(map.length()), 0.0);
    for (const auto& p : map.pairs()) amps[p.value] = compact.amplitudes[p.key];
    return AmplitudeState(std::move(amps), map.length(), compact.norm);
}

CostLedger::CostLedger(std::size_t parallel_units) : parallel_units_(parallel_units) {
    if (parallel_units_ == 0) throw InvalidPlanError("parallel units must be >= 1");
}

bool CostLedger::register_vector(std::span<const double> v, std::size_t nnz, double linf_normalized) {
    std::lock_guard lock(registry_mutex_);
    const bool inserted = registry_.emplace(v.begin(), v.end()).second;
    if (inserted) {
        registered_nnz_ += nnz;
        registered_dim_max_ = std::max(registered_dim_max_, v.size());
        registered_linf_max_ = std::max(registered_linf_max_, linf_normalized);
    }
    return inserted;
}

LedgerSnapshot CostLedger::snapshot() const {
    LedgerSnapshot s;
    s.preprocess_touches = preprocess_touches();
    s.qram_queries = qram_queries();
    s.prep_invocations = prep_invocations();
    s.amplitude_amp_rounds = amplitude_amp_rounds();
    s.shots = shots();
    s.copies = copies();
    s.parallel_units = parallel_units_;
    std::lock_guard lock(registry_mutex_);
    s.registered_vectors = registry_.size();
    s.registered_nnz = registered_nnz_;
    s.registered_dim_max = registered_dim_max_;
    s.registered_linf_max = registered_linf_max_;
    return s;
}

AmplitudeState encode(std::span<const double> v, CostLedger& ledger, PrepStrategy strategy) {
    const auto map = build_key_value_map(v);
    if (v.empty() || map.size() == 0) throw ZeroVectorError("cannot encode a zero vector");

    AmplitudeState state = strategy == PrepStrategy::AmplitudeAmplification
                               ? AmplitudeState::from_vector(v)
                               : remap(prepare_compact(v, map), map);

    const std::size_t nnz = map.size();
    double linf = 0.0;
    for (double a : state.amplitudes()) linf = std::max(linf, std::abs(a));

    const bool first = ledger.register_vector(v, nnz, linf);
    if (first && strategy != PrepStrategy::AmplitudeAmplification) {
        const std::size_t p = strategy == PrepStrategy::ParallelAugmentedQram ? ledger.parallel_units() : 1;
        ledger.add_preprocess_touches((nnz + p - 1) / p);
    }
    ledger.add_prep_invocation();
    if (strategy == PrepStrategy::AmplitudeAmplification) {
        ledger.add_amplitude_amp_rounds(ceil_count(std::sqrt(static_cast<double>(v.size())) * linf));
    } else if (strategy == PrepStrategy::SparseAmplitudeAmplification) {
        ledger.add_amplitude_amp_rounds(ceil_count(std::sqrt(static_cast<double>(nnz)) * linf));
    }
    if (uses_qram(strategy)) ledger.add_qram_queries(ceil_log2(v.size()));
    return state;
}

double inner_product_exact(const AmplitudeState& a, const AmplitudeState& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatchError("state dimensions differ: " + std::to_string(a.dim()) + " vs " +
                                     std::to_string(b.dim()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

double prep_cost(PrepStrategy s, const PrepCostInputs& in) {
    const double C = static_cast<double>(in.copies);
    const double nnz = static_cast<double>(in.nnz);
    switch (s) {
        case PrepStrategy::AmplitudeAmplification:
            return C * std::sqrt(static_cast<double>(in.n)) * in.linf;
        case PrepStrategy::SparseAmplitudeAmplification:
            return nnz + C * std::sqrt(nnz) * in.linf;
        case PrepStrategy::AugmentedQram:
            return nnz + C;
        case PrepStrategy::ParallelAugmentedQram: {
            if (in.parallel_units == 0) throw InvalidPlanError("parallel units must be >= 1");
            return static_cast<double>((in.nnz + in.parallel_units - 1) / in.parallel_units) + C;
        }
    }
    return 0.0;
}

std::string_view prep_cost_formula(PrepStrategy s) {
    switch (s) {
        case PrepStrategy::AmplitudeAmplification:
            return "C*sqrt(N)*||x||_inf";
        case PrepStrategy::SparseAmplitudeAmplification:
            return "nnz(x) + C*sqrt(nnz(x))*||x||_inf";
        case PrepStrategy::AugmentedQram:
            return "nnz(x) + C";
        case PrepStrategy::ParallelAugmentedQram:
            return "nnz(x)/p + C";
    }
    return "";
}

std::string_view prep_extra_resources(PrepStrategy s) {
    switch (s) {
        case PrepStrategy::AmplitudeAmplification:
            return "none";
        case PrepStrategy::SparseAmplitudeAmplification:
            return "key-value map";
        case PrepStrategy::AugmentedQram:
            return "metadata and key-value map";
        case PrepStrategy::ParallelAugmentedQram:
            return "classical computer with p parallel processing units";
    }
    return "";
}

CostSummary ledger_report(const CostLedger& ledger, PrepStrategy strategy, std::size_t copies) {
    CostSummary out;
    out.strategy = strategy;
    out.counted = ledger.snapshot();
    out.inputs.n = out.counted.registered_dim_max;
    out.inputs.nnz = out.counted.registered_nnz;
    out.inputs.linf = out.counted.registered_linf_max;
    out.inputs.copies = copies;
    out.inputs.parallel_units = ledger.parallel_units();
    out.formula = std::string(prep_cost_formula(strategy));
    out.formula_cost = prep_cost(strategy, out.inputs);
    out.polylog_factor = "polylog(" + std::to_string(std::max<std::size_t>(out.inputs.n, 1)) + ")";
    out.extra_resources = std::string(prep_extra_resources(strategy));
    return out;
}

}  // namespace qconv
