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

#include "qconv/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qconv {

std::string_view to_string(EstimationMode m) { return m == EstimationMode::Exact ? "exact" : "sampled"; }

std::string_view to_string(CircuitKind c) { return c == CircuitKind::Swap ? "swap" : "interference"; }

std::optional<EstimationMode> parse_mode(std::string_view name) {
    if (name == "exact") return EstimationMode::Exact;
    if (name == "sampled") return EstimationMode::Sampled;
    return std::nullopt;
}

std::optional<CircuitKind> parse_circuit(std::string_view name) {
    if (name == "swap") return CircuitKind::Swap;
    if (name == "interference") return CircuitKind::Interference;
    return std::nullopt;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t hoeffding_shots(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidPlanError("epsilon must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidPlanError("delta must lie in (0, 1)");
    return static_cast<std::uint64_t>(std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

ShotPlan ShotPlan::from_precision(double epsilon, double delta, std::uint64_t seed) {
    return {EstimationMode::Sampled, hoeffding_shots(epsilon, delta), epsilon, delta, seed};
}

void ShotPlan::validate() const {
    if (mode == EstimationMode::Exact) return;
    if (shots < 1) throw InvalidPlanError("sampled mode needs at least one shot");
    const bool has_eps = epsilon != 0.0;
    const bool has_delta = delta != 0.0;
    if (has_eps != has_delta) throw InvalidPlanError("epsilon and delta must be given together");
    if (has_eps) {
        const auto needed = hoeffding_shots(epsilon, delta);
        if (shots < needed) {
            throw InvalidPlanError(std::to_string(shots) + " shots is below the " + std::to_string(needed) +
                                   " required for the requested epsilon/delta");
        }
    }
}

RealStateVector::RealStateVector(std::size_t qubits) : qubits_(qubits), amps_(std::size_t{1} << qubits, 0.0) {
    amps_[0] = 1.0;
}

RealStateVector::RealStateVector(std::size_t qubits, std::vector<double> amplitudes)
    : qubits_(qubits), amps_(std::move(amplitudes)) {
    if (amps_.size() != (std::size_t{1} << qubits_)) throw DimensionMismatchError("amplitude count is not 2^qubits");
}

void RealStateVector::apply_hadamard(std::size_t q) {
    if (q >= qubits_) throw DimensionMismatchError("qubit index out of range");
    const std::size_t bit = std::size_t{1} << q;
    const double s = 1.0 / std::numbers::sqrt2;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        const double a = amps_[i];
        const double b = amps_[i | bit];
        amps_[i] = s * (a + b);
        amps_[i | bit] = s * (a - b);
    }
}

void RealStateVector::apply_fredkin(std::size_t control, std::size_t a, std::size_t b) {
    if (control >= qubits_ || a >= qubits_ || b >= qubits_) throw DimensionMismatchError("qubit index out of range");
    if (control == a || control == b || a == b) throw DimensionMismatchError("Fredkin qubits must be distinct");
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t abit = std::size_t{1} << a;
    const std::size_t bbit = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if ((i & cbit) && (i & abit) && !(i & bbit)) std::swap(amps_[i], amps_[i ^ abit ^ bbit]);
    }
}

void RealStateVector::apply_controlled_reflection(std::size_t control, bool control_value,
                                                  std::span<const double> w) {
    if (w.empty()) return;
    const std::size_t d = w.size();
    if ((d & (d - 1)) != 0 || d > amps_.size()) throw DimensionMismatchError("reflection size must be 2^k <= dim");
    if (control >= qubits_ || (std::size_t{1} << control) < d) {
        throw DimensionMismatchError("control qubit overlaps the reflected register");
    }
    for (std::size_t base = 0; base < amps_.size(); base += d) {
        if (((base >> control) & 1U) != static_cast<std::size_t>(control_value)) continue;
        double dot = 0.0;
        for (std::size_t j = 0; j < d; ++j) dot += w[j] * amps_[base + j];
        for (std::size_t j = 0; j < d; ++j) amps_[base + j] -= 2.0 * w[j] * dot;
    }
}

double RealStateVector::probability_zero(std::size_t q) const {
    if (q >= qubits_) throw DimensionMismatchError("qubit index out of range");
    const std::size_t bit = std::size_t{1} << q;
    // Divide by the total rather than assume it is 1, so that a branch
    // cancelled to exact zeros gives exactly 0 or 1.
    double zero = 0.0, one = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        (i & bit ? one : zero) += amps_[i] * amps_[i];
    }
    const double total = zero + one;
    return total == 0.0 ? 0.0 : std::clamp(zero / total, 0.0, 1.0);
}

double RealStateVector::norm_squared() const {
    double s = 0.0;
    for (double a : amps_) s += a * a;
    return s;
}

std::vector<double> preparation_reflection(std::span<const double> target) {
    // w = (e0 - t) / ||e0 - t||. 1 - t0 is formed as sum_{i>0} t_i^2 / (1 + t0)
    // when t0 > 0 so that targets near |0> keep full relative precision.
    const double t0 = target[0];
    double tail = 0.0;
    for (std::size_t i = 1; i < target.size(); ++i) tail += target[i] * target[i];
    const double one_minus_t0 = t0 > 0.0 ? tail / (1.0 + t0) : 1.0 - t0;
    const double norm = std::sqrt(one_minus_t0 * one_minus_t0 + tail);
    if (norm == 0.0) return {};
    std::vector<double> w(target.size());
    w[0] = one_minus_t0 / norm;
    for (std::size_t i = 1; i < target.size(); ++i) w[i] = -target[i] / norm;
    return w;
}

namespace {

void require_same_dim(const AmplitudeState& a, const AmplitudeState& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatchError("state dimensions differ: " + std::to_string(a.dim()) + " vs " +
                                     std::to_string(b.dim()));
    }
}

}  // namespace

double swap_test_probability(const AmplitudeState& phi, const AmplitudeState& psi) {
    require_same_dim(phi, psi);
    const std::size_t n = phi.qubits();
    const std::size_t d = phi.dim();
    // Layout: ancilla = qubit 2n, phi on qubits [n, 2n), psi on [0, n).
    std::vector<double> amps(std::size_t{2} * d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) amps[(i << n) | j] = phi[i] * psi[j];
    }
    RealStateVector sv(2 * n + 1, std::move(amps));
    const std::size_t ancilla = 2 * n;
    sv.apply_hadamard(ancilla);
    for (std::size_t b = 0; b < n; ++b) sv.apply_fredkin(ancilla, n + b, b);
    sv.apply_hadamard(ancilla);
    return sv.probability_zero(ancilla);
}

double interference_test_probability(const AmplitudeState& kp, const AmplitudeState& xq) {
    require_same_dim(kp, xq);
    const std::size_t n = kp.qubits();
    RealStateVector sv(n + 1);
    const std::size_t ancilla = n;
    sv.apply_hadamard(ancilla);
    sv.apply_controlled_reflection(ancilla, false, preparation_reflection(kp.amplitudes()));
    sv.apply_controlled_reflection(ancilla, true, preparation_reflection(xq.amplitudes()));
    sv.apply_hadamard(ancilla);
    return sv.probability_zero(ancilla);
}

double circuit_probability(CircuitKind c, const AmplitudeState& a, const AmplitudeState& b) {
    return c == CircuitKind::Swap ? swap_test_probability(a, b) : interference_test_probability(a, b);
}

double invert_probability(CircuitKind c, double p0) {
    const double x = 2.0 * p0 - 1.0;
    return c == CircuitKind::Swap ? std::sqrt(std::max(0.0, x)) : x;
}

std::uint64_t sample_zero_count(double p0, std::uint64_t shots, Rng& rng) {
    std::uint64_t zeros = 0;
    for (std::uint64_t s = 0; s < shots; ++s) zeros += rng.uniform() < p0 ? 1U : 0U;
    return zeros;
}

EstimationResult estimate_overlap(const AmplitudeState& kp, const AmplitudeState& xq, const ShotPlan& plan,
                                  CircuitKind circuit, std::uint64_t stream) {
    plan.validate();
    EstimationResult r;
    r.circuit = circuit;
    r.exact_overlap = inner_product_exact(kp, xq);
    r.p0_exact = circuit_probability(circuit, kp, xq);
    r.sign_lost = circuit == CircuitKind::Swap && r.exact_overlap < 0.0;

    if (plan.mode == EstimationMode::Exact) {
        r.p0_hat = r.p0_exact;
        r.estimate = invert_probability(circuit, r.p0_exact);
        return r;
    }

    Rng rng(stream_seed(plan.seed, stream));
    const std::uint64_t zeros = sample_zero_count(r.p0_exact, plan.shots, rng);
    r.shots = plan.shots;
    r.record.counts = {zeros, plan.shots - zeros};
    r.record.total = plan.shots;
    r.p0_hat = static_cast<double>(zeros) / static_cast<double>(plan.shots);
    r.estimate = invert_probability(circuit, r.p0_hat);

    const double se_p = std::sqrt(r.p0_hat * (1.0 - r.p0_hat) / static_cast<double>(plan.shots));
    if (circuit == CircuitKind::Interference) {
        r.std_error = 2.0 * se_p;
    } else {
        // d/dp sqrt(2p - 1) = 1 / sqrt(2p - 1); at or below the clamp the
        // magnitude is only known to within sqrt(2 se).
        const double x = 2.0 * r.p0_hat - 1.0;
        const double delta_method = x > 0.0 ? se_p / std::sqrt(x) : std::numeric_limits<double>::infinity();
        r.std_error = std::min(delta_method, std::sqrt(2.0 * se_p));
    }
    return r;
}

double BatchedOutcome::empirical(std::size_t cell) const {
    if (shots == 0 || cell >= counts.size()) return 0.0;
    return static_cast<double>(counts[cell]) / static_cast<double>(shots);
}

double BatchedOutcome::total_variation() const {
    double tv = 0.0;
    for (std::size_t c = 0; c < exact_joint.size(); ++c) tv += std::abs(empirical(c) - exact_joint[c]);
    return 0.5 * tv;
}

namespace {
constexpr std::uint64_t kShardShots = 1U << 16;
}

BatchedOutcome batched_sample(std::span<const std::optional<AmplitudeState>> rows,
                              std::span<const std::optional<AmplitudeState>> cols, const ShotPlan& plan,
                              bool keep_samples) {
    plan.validate();
    BatchedOutcome out;
    for (std::size_t p = 0; p < rows.size(); ++p) {
        if (!rows[p]) out.excluded_rows.push_back(p);
    }
    for (std::size_t q = 0; q < cols.size(); ++q) {
        if (!cols[q]) out.excluded_cols.push_back(q);
    }
    for (std::size_t p = 0; p < rows.size(); ++p) {
        if (!rows[p]) continue;
        for (std::size_t q = 0; q < cols.size(); ++q) {
            if (!cols[q]) continue;
            out.pairs.push_back({p, q});
            out.pair_p0.push_back(interference_test_probability(*rows[p], *cols[q]));
        }
    }
    if (out.pairs.empty()) throw DegenerateError("no (row, column) pair has both states nonzero");

    const double weight = 1.0 / static_cast<double>(out.pairs.size());
    out.exact_joint.resize(2 * out.pairs.size());
    for (std::size_t v = 0; v < out.pairs.size(); ++v) {
        out.exact_joint[2 * v] = out.pair_p0[v] * weight;
        out.exact_joint[2 * v + 1] = (1.0 - out.pair_p0[v]) * weight;
    }
    if (plan.mode == EstimationMode::Exact) return out;

    std::vector<double> cumulative(out.exact_joint.size());
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t c = 0; c < cumulative.size(); ++c) {
        acc += out.exact_joint[c];
        cumulative[c] = acc;
        if (out.exact_joint[c] > 0.0) last_positive = c;
    }

    out.shots = plan.shots;
    out.counts.assign(out.exact_joint.size(), 0);
    if (keep_samples) out.samples.reserve(plan.shots);
    const std::uint64_t shards = (plan.shots + kShardShots - 1) / kShardShots;
    for (std::uint64_t shard = 0; shard < shards; ++shard) {
        Rng rng(stream_seed(plan.seed, shard));
        const std::uint64_t n = std::min(kShardShots, plan.shots - shard * kShardShots);
        for (std::uint64_t s = 0; s < n; ++s) {
            const double u = rng.uniform();
            auto cell = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                                 cumulative.begin());
            if (cell >= cumulative.size()) cell = last_positive;
            ++out.counts[cell];
            if (keep_samples) {
                const auto& pair = out.pairs[cell / 2];
                out.samples.push_back({pair.p, pair.q, static_cast<int>(cell % 2)});
            }
        }
    }
    return out;
}

}  // namespace qconv
