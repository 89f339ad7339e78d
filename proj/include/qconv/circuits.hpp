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
 * @file circuits.hpp
 * Gate-level simulation of the two overlap circuits and their shot-sampled
 * estimators.
 *
 *  - SWAP test: |0>|phi>|psi>, H on the ancilla, controlled-SWAP of the two
 *    data registers, H, measure. P(0) = (1 + <psi|phi>^2) / 2.
 *  - Interference test: |0>|0...0>, H on the ancilla, ancilla-controlled
 *    preparation of |K_p> (ancilla 0) and |X_q> (ancilla 1), H, measure.
 *    P(0) = (1 + <K_p|X_q>) / 2, so the sign of the overlap survives.
 *
 * Sampling is driven by std::mt19937_64 with 53-bit uniform draws, which
 * makes results identical across platforms for a given seed.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "qconv/qstate.hpp"

namespace qconv {

enum class EstimationMode { Exact, Sampled };
enum class CircuitKind { Swap, Interference };

std::string_view to_string(EstimationMode m);
std::string_view to_string(CircuitKind c);
std::optional<EstimationMode> parse_mode(std::string_view name);
std::optional<CircuitKind> parse_circuit(std::string_view name);

inline constexpr std::string_view kGeneratorName = "mt19937_64";

/// Seeded generator producing uniform doubles in [0, 1) from the top 53 bits.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t next() { return engine_(); }

   private:
    std::mt19937_64 engine_;
};

/// Seed of independent stream `stream` derived from a run seed (splitmix64 mix).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// ceil(ln(2/delta) / (2 epsilon^2)); throws InvalidPlanError unless
/// 0 < epsilon < 1 and 0 < delta < 1.
std::uint64_t hoeffding_shots(double epsilon, double delta);

struct ShotPlan {
    EstimationMode mode = EstimationMode::Exact;
    std::uint64_t shots = 0;
    /// Target precision and failure probability; 0 when shots were given directly.
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;

    static ShotPlan exact() { return {}; }
    static ShotPlan sampled(std::uint64_t shots, std::uint64_t seed) {
        return {EstimationMode::Sampled, shots, 0.0, 0.0, seed};
    }
    static ShotPlan from_precision(double epsilon, double delta, std::uint64_t seed);

    /// Throws InvalidPlanError when any invariant is broken.
    void validate() const;
};

/// Outcome counts keyed by basis label.
struct MeasurementRecord {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
};

struct EstimationResult {
    CircuitKind circuit = CircuitKind::Interference;
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t shots = 0;
    double p0_exact = 0.0;
    double p0_hat = 0.0;
    /// <a|b> from the amplitudes, for comparison.
    double exact_overlap = 0.0;
    /// SWAP circuit on a negative overlap: only the magnitude was recovered.
    bool sign_lost = false;
    /// Ancilla outcome counts {n0, n1}; empty in exact mode.
    MeasurementRecord record;
};

/// Real statevector over `qubits` qubits; qubit q is bit q of the basis index.
class RealStateVector {
   public:
    explicit RealStateVector(std::size_t qubits);
    RealStateVector(std::size_t qubits, std::vector<double> amplitudes);

    std::size_t qubits() const { return qubits_; }
    std::span<const double> amplitudes() const { return amps_; }

    void apply_hadamard(std::size_t q);
    /// Controlled-SWAP of qubits a and b.
    void apply_fredkin(std::size_t control, std::size_t a, std::size_t b);
    /// Applies I - 2 w w^T to qubits [0, log2 |w|) on the branch where
    /// `control` reads `control_value`.
    void apply_controlled_reflection(std::size_t control, bool control_value, std::span<const double> w);

    double probability_zero(std::size_t q) const;
    double norm_squared() const;

   private:
    std::size_t qubits_;
    std::vector<double> amps_;
};

/// Unit vector w of the reflection I - 2 w w^T sending |0> to `target`;
/// empty when target already equals |0>.
std::vector<double> preparation_reflection(std::span<const double> target);

double swap_test_probability(const AmplitudeState& phi, const AmplitudeState& psi);
double interference_test_probability(const AmplitudeState& kp, const AmplitudeState& xq);
double circuit_probability(CircuitKind c, const AmplitudeState& a, const AmplitudeState& b);

/// Overlap recovered from an ancilla-0 probability: 2 p - 1 for the
/// interference circuit, sqrt(max(0, 2 p - 1)) for SWAP.
double invert_probability(CircuitKind c, double p0);

/// Number of ancilla-0 outcomes in `shots` Bernoulli(p0) draws.
std::uint64_t sample_zero_count(double p0, std::uint64_t shots, Rng& rng);

/// Estimates <kp|xq> (or |<kp|xq>| for SWAP). Sampled mode uses the stream
/// stream_seed(plan.seed, stream), so concurrent estimations stay independent.
EstimationResult estimate_overlap(const AmplitudeState& kp, const AmplitudeState& xq, const ShotPlan& plan,
                                  CircuitKind circuit = CircuitKind::Interference, std::uint64_t stream = 0);

struct BatchedSample {
    std::size_t p = 0;
    std::size_t q = 0;
    int ancilla = 0;
    bool operator==(const BatchedSample&) const = default;
};

struct PairIndex {
    std::size_t p = 0;
    std::size_t q = 0;
    bool operator==(const PairIndex&) const = default;
};

/// Joint (p, q, ancilla) statistics of the superposed interference circuit.
/// Cell 2*v + a holds pair v with ancilla a.
struct BatchedOutcome {
    std::vector<PairIndex> pairs;
    std::vector<double> pair_p0;
    std::vector<double> exact_joint;
    std::vector<std::uint64_t> counts;
    std::vector<BatchedSample> samples;
    std::uint64_t shots = 0;
    std::vector<std::size_t> excluded_rows;
    std::vector<std::size_t> excluded_cols;

    double empirical(std::size_t cell) const;
    /// Total-variation distance between the empirical and exact joint.
    double total_variation() const;
};

/// Uniform superposition over all (p, q) with both states present
/// (nullopt marks an all-zero row or column, which is excluded and
/// reported). P(p, q, 0) = P_pq(0) / (number of valid pairs).
/// Sampled mode draws plan.shots outcomes in fixed-size shards, each with
/// its own stream. Throws DegenerateError when no pair is valid.
BatchedOutcome batched_sample(std::span<const std::optional<AmplitudeState>> rows,
                              std::span<const std::optional<AmplitudeState>> cols, const ShotPlan& plan,
                              bool keep_samples = true);

}  // namespace qconv
