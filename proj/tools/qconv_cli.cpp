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

// qconv command-line front end.
//
// Exit status: 0 success, 1 internal error, 2 bad flags, 3 malformed input
// file, 4 inconsistent shapes, 5 file not readable or writable.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fmt/format.h>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "qconv/engine.hpp"
#include "qconv/io.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qconv;
using qconv::cli::RunManifest;

enum ExitCode : int { kOk = 0, kInternal = 1, kFlag = 2, kParse = 3, kShape = 4, kIo = 5 };

class FlagError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct GeometryFlags {
    std::size_t stride = 1;
    std::size_t pad = 0;
    ConvParams params() const { return ConvParams::uniform(stride, pad); }
};

struct PlanFlags {
    std::string mode = "exact";
    std::optional<std::uint64_t> shots;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::string circuit = "interference";
    std::string strategy = "aqram";
    std::size_t parallel_units = 1;
    bool batched = false;
};

struct ShapeFlags {
    std::size_t batch = 1, height = 0, width = 0, channels = 1, kernel_height = 0, kernel_width = 0, filters = 1;
};

void add_geometry(CLI::App* cmd, GeometryFlags& g) {
    cmd->add_option("--stride", g.stride, "Convolution stride (both axes)")->check(CLI::PositiveNumber);
    cmd->add_option("--pad", g.pad, "Zero padding (both axes)")->check(CLI::NonNegativeNumber);
}

void add_plan(CLI::App* cmd, PlanFlags& p, bool allow_batched) {
    cmd->add_option("--mode", p.mode, "Estimation mode")->check(CLI::IsMember({"exact", "sampled"}));
    cmd->add_option("--shots", p.shots, "Shots per output entry (sampled mode)")->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", p.epsilon, "Target precision of P(0); derives shots with --delta");
    cmd->add_option("--delta", p.delta, "Overall failure probability for --epsilon");
    cmd->add_option("--seed", p.seed, "RNG seed (required in sampled mode)");
    cmd->add_option("--circuit", p.circuit, "Overlap circuit")->check(CLI::IsMember({"swap", "interference"}));
    cmd->add_option("--strategy", p.strategy, "State preparation cost model")
        ->check(CLI::IsMember({"aa", "sparse-aa", "aqram", "parallel-aqram"}));
    cmd->add_option("--parallel-units", p.parallel_units, "Classical units p for parallel-aqram")
        ->check(CLI::PositiveNumber);
    if (allow_batched) cmd->add_flag("--batched", p.batched, "Sample all (p, q) pairs in one superposition");
}

ShotPlan build_plan(const PlanFlags& f, std::size_t entries) {
    if (*parse_mode(f.mode) == EstimationMode::Exact) {
        if (f.shots || f.epsilon || f.delta) spdlog::warn("exact mode ignores --shots, --epsilon and --delta");
        return ShotPlan::exact();
    }
    if (!f.seed) throw FlagError("--seed is required in sampled mode");
    if (f.shots && (f.epsilon || f.delta)) throw FlagError("give either --shots or --epsilon/--delta, not both");
    if (f.shots) return ShotPlan::sampled(*f.shots, *f.seed);
    if (!f.epsilon || !f.delta) throw FlagError("sampled mode needs --shots or both --epsilon and --delta");
    try {
        return estimate_shot_budget(*f.epsilon, *f.delta, entries, *f.seed);
    } catch (const InvalidPlanError& e) {
        throw FlagError(e.what());
    }
}

QConvConfig build_config(const ConvShape& shape, const PlanFlags& f) {
    QConvConfig cfg(shape);
    cfg.plan = build_plan(f, shape.N() * shape.output_length());
    cfg.circuit = *parse_circuit(f.circuit);
    cfg.strategy = *parse_strategy(f.strategy);
    cfg.parallel_units = f.parallel_units;
    cfg.batched = f.batched;
    if (cfg.batched && cfg.circuit != CircuitKind::Interference) {
        throw FlagError("--batched works with --circuit interference only");
    }
    return cfg;
}

RunManifest make_manifest(std::string command, ordered_json config, std::optional<std::uint64_t> seed,
                          const std::vector<std::string>& inputs) {
    RunManifest m;
    m.command = std::move(command);
    m.config = std::move(config);
    m.seed = seed;
    for (const auto& p : inputs) m.inputs.push_back(cli::digest_file(p));
    m.version = QCONV_VERSION;
    m.timestamp = cli::timestamp_from_env();
    return m;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(out, text);
        spdlog::info("wrote {}", out);
    }
}

void emit_json(const std::string& out, ordered_json j, const RunManifest& m) {
    j["manifest"] = cli::to_json(m);
    emit(out, j.dump(2) + "\n");
}

ordered_json geometry_json(const GeometryFlags& g) { return {{"stride", g.stride}, {"pad", g.pad}}; }

int cmd_convolve(const std::string& input, const std::string& kernel, const GeometryFlags& g,
                 const std::string& out) {
    const auto x = to_input_batch(read_tensor_file(input));
    const auto k = to_kernel_bank(read_tensor_file(kernel));
    const auto shape = infer_shape(x, k, g.params());
    spdlog::debug("convolve {}", shape.describe());
    const auto y = conv_reference(x, k, shape);
    ordered_json cfg = geometry_json(g);
    cfg["shape"] = shape_to_json(shape);
    emit_json(out, tensor_to_json(y), make_manifest("convolve", std::move(cfg), std::nullopt, {input, kernel}));
    return kOk;
}

int cmd_qconvolve(const std::string& input, const std::string& kernel, const GeometryFlags& g, const PlanFlags& f,
                  const std::string& out) {
    const auto x = to_input_batch(read_tensor_file(input));
    const auto k = to_kernel_bank(read_tensor_file(kernel));
    const auto cfg = build_config(infer_shape(x, k, g.params()), f);
    spdlog::info("qconvolve {} mode={} shots={}", cfg.shape.describe(), to_string(cfg.plan.mode), cfg.plan.shots);

    ordered_json j;
    if (cfg.batched) {
        const auto run = qconvolve_batched_sampling(x, k, cfg);
        j = result_to_json(run.result, cfg);
        ordered_json b;
        b["pairs"] = run.outcome.pairs.size();
        b["total_variation"] = run.outcome.shots > 0 ? ordered_json(run.outcome.total_variation()) : ordered_json();
        b["excluded_rows"] = run.outcome.excluded_rows;
        b["excluded_cols"] = run.outcome.excluded_cols;
        b["sampled_ranking"] = ranking_to_json(run.sampled_ranking);
        b["exact_ranking"] = ranking_to_json(run.exact_ranking);
        j["batched"] = std::move(b);
    } else {
        j = result_to_json(qconvolve(x, k, cfg), cfg);
    }
    const std::optional<std::uint64_t> seed =
        cfg.plan.mode == EstimationMode::Sampled ? std::optional(cfg.plan.seed) : std::nullopt;
    ordered_json mcfg = config_to_json(cfg);
    emit_json(out, std::move(j), make_manifest("qconvolve", std::move(mcfg), seed, {input, kernel}));
    return kOk;
}

ConvShape shape_from_flags(const ShapeFlags& f, const GeometryFlags& g) {
    if (f.height == 0 || f.width == 0) throw FlagError("--height and --width are required");
    if (f.kernel_height == 0 || f.kernel_width == 0) throw FlagError("--kernel-height and --kernel-width are required");
    return ConvShape::make(f.batch, f.height, f.width, f.channels, f.kernel_height, f.kernel_width, f.filters,
                           g.params());
}

int cmd_reshape(const std::string& kernel, const std::string& input, ShapeFlags sf, const GeometryFlags& g,
                const std::string& baseline, const std::string& out) {
    const auto k = to_kernel_bank(read_tensor_file(kernel));
    std::vector<std::string> inputs{kernel};
    ordered_json j;
    if (baseline == "toeplitz") {
        if (input.empty()) throw FlagError("--baseline toeplitz needs --input");
        const auto x = to_input_batch(read_tensor_file(input));
        inputs.push_back(input);
        const auto shape = infer_shape(x, k, g.params());
        auto mats = ordered_json::array();
        for (std::size_t n = 0; n < shape.N(); ++n) {
            const auto xt = build_toeplitz_input(x, shape, n);
            auto m = sparse_to_json(xt);
            m["nnz_stats"] = nnz_stats_to_json(nnz_stats(xt));
            mats.push_back(std::move(m));
        }
        j["baseline"] = "toeplitz";
        j["shape"] = shape_to_json(shape);
        j["matrices"] = std::move(mats);
    } else {
        const auto shape = [&] {
            if (!input.empty()) {
                const auto x = to_input_batch(read_tensor_file(input));
                inputs.push_back(input);
                return infer_shape(x, k, g.params());
            }
            sf.kernel_height = k.extents()[0];
            sf.kernel_width = k.extents()[1];
            sf.channels = k.extents()[2];
            sf.filters = k.extents()[3];
            return shape_from_flags(sf, g);
        }();
        const auto kt = build_dbt_kernel(k, shape);
        j["baseline"] = "dbt";
        j["shape"] = shape_to_json(shape);
        const auto m = sparse_to_json(kt);
        for (auto it = m.begin(); it != m.end(); ++it) j[it.key()] = it.value();
        j["nnz_stats"] = nnz_stats_to_json(nnz_stats(kt));
    }
    ordered_json cfg = geometry_json(g);
    cfg["baseline"] = baseline;
    emit_json(out, std::move(j), make_manifest("reshape", std::move(cfg), std::nullopt, inputs));
    return kOk;
}

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

std::string resources_text(const ResourceReport& r, const ConvShape& shape) {
    std::string s;
    s += fmt::format("shape {}\n\n", shape.describe());
    s += fmt::format("qubits  index_p {}  index_q {}  data {}  ancilla {}  total {}\n", r.qubits.index_p,
                     r.qubits.index_q, r.qubits.data, r.qubits.ancilla, r.qubits.total());
    s += fmt::format("shots   {}\n", r.shots_used);
    s += fmt::format("depth   {}\n\n", r.depth_class);
    s += fmt::format("{:<16} {:<36} {:>8} {:>8} {:>16}\n", "strategy", "formula", "nnz", "copies", "cost");
    for (const auto& c : r.strategies) {
        s += fmt::format("{:<16} {:<36} {:>8} {:>8} {:>16}\n", to_string(c.strategy), c.formula, c.inputs.nnz,
                         c.inputs.copies, fixed(c.formula_cost));
    }
    s += fmt::format("\n{:<16} {:<18} {:<8} {:<12} {:>14} {:>10} {:>14}\n", "method", "qram", "depth", "preproc",
                     "qram@shape", "depth@shape", "preproc@shape");
    for (const auto& row : r.comparison) {
        s += fmt::format("{:<16} {:<18} {:<8} {:<12} {:>14} {:>10} {:>14}\n", row.method, row.qram_complexity,
                         row.circuit_depth, row.preprocessing, fixed(row.qram_value), fixed(row.depth_value),
                         fixed(row.preprocessing_value));
    }
    return s;
}

int cmd_resources(const std::string& input, const std::string& kernel, ShapeFlags sf, const GeometryFlags& g,
                  const PlanFlags& f, const std::string& format, const std::string& out) {
    std::vector<std::string> inputs;
    std::optional<KernelBank> k;
    std::optional<InputBatch> x;
    if (!kernel.empty()) {
        k = to_kernel_bank(read_tensor_file(kernel));
        inputs.push_back(kernel);
        sf.kernel_height = k->extents()[0];
        sf.kernel_width = k->extents()[1];
        sf.channels = k->extents()[2];
        sf.filters = k->extents()[3];
    }
    if (!input.empty()) {
        x = to_input_batch(read_tensor_file(input));
        inputs.push_back(input);
        sf.batch = x->extents()[0];
        sf.height = x->extents()[1];
        sf.width = x->extents()[2];
        if (k && k->extents()[2] != x->extents()[3]) throw ShapeError("kernel channels differ from input channels");
        sf.channels = x->extents()[3];
    }
    const auto shape = shape_from_flags(sf, g);
    auto cfg = build_config(shape, f);

    // Operands not supplied are taken dense (all ones), the worst case for
    // preprocessing.
    if (!k) k = KernelBank({shape.R(), shape.S(), shape.C(), shape.M()}, std::vector<double>(
                                                                          shape.taps_per_filter() * shape.M(), 1.0));
    if (!x) x = InputBatch({shape.N(), shape.H(), shape.W(), shape.C()},
                           std::vector<double>(shape.N() * shape.input_length(), 1.0));
    CostLedger ledger(cfg.parallel_units);
    const auto kt = build_dbt_kernel(*k, shape);
    std::size_t live_rows = 0, live_cols = 0;
    for (std::size_t p = 0; p < kt.rows(); ++p) {
        if (kt.row(p).empty()) continue;
        encode(kt.dense_row(p), ledger, cfg.strategy);
        ++live_rows;
    }
    const auto flat = flatten_input(*x);
    for (std::size_t q = 0; q < flat.cols(); ++q) {
        const auto col = flat.column(q);
        if (std::all_of(col.begin(), col.end(), [](double v) { return v == 0.0; })) continue;
        encode(col, ledger, cfg.strategy);
        ++live_cols;
    }
    if (cfg.plan.mode == EstimationMode::Sampled) {
        ledger.record_shots(cfg.batched ? cfg.plan.shots : cfg.plan.shots * live_rows * live_cols);
    }
    const auto report = resource_report(shape, cfg, ledger);
    if (format == "text") {
        emit(out, resources_text(report, shape));
        return kOk;
    }
    ordered_json j;
    j["shape"] = shape_to_json(shape);
    j["live_rows"] = live_rows;
    j["live_cols"] = live_cols;
    j["dense_operands"] = inputs.size() < 2;
    j["resources"] = resource_report_to_json(report);
    const std::optional<std::uint64_t> seed =
        cfg.plan.mode == EstimationMode::Sampled ? std::optional(cfg.plan.seed) : std::nullopt;
    emit_json(out, std::move(j), make_manifest("resources", config_to_json(cfg), seed, inputs));
    return kOk;
}

struct CompareRow {
    std::string file;
    std::string mode, circuit, strategy;
    std::uint64_t shots = 0;
    std::string seed;
    double max_abs_error = 0.0, mean_abs_error = 0.0;
    std::uint64_t shots_used = 0;
    double ledger_cost = 0.0;
};

int cmd_compare(const std::vector<std::string>& files, const std::string& format, const std::string& out) {
    std::vector<CompareRow> rows;
    std::optional<nlohmann::json> shape;
    std::string shape_file;
    for (const auto& path : files) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_text_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": malformed JSON: " + e.what());
        }
        CompareRow r;
        r.file = path;
        try {
            const auto& c = j.at("config");
            if (!shape) {
                shape = c.at("shape");
                shape_file = path;
            } else if (*shape != c.at("shape")) {
                throw ShapeError("refusing to compare " + path + " with " + shape_file +
                                 ": the runs have different convolution shapes");
            }
            r.mode = c.at("mode").get<std::string>();
            r.circuit = c.at("circuit").get<std::string>();
            r.strategy = c.at("strategy").get<std::string>();
            r.shots = c.at("shots").get<std::uint64_t>();
            r.seed = r.mode == "sampled" ? std::to_string(c.at("seed").get<std::uint64_t>()) : "-";
            r.max_abs_error = j.at("max_abs_error").get<double>();
            r.mean_abs_error = j.at("mean_abs_error").get<double>();
            r.shots_used = j.at("resources").at("shots_used").get<std::uint64_t>();
            r.ledger_cost = j.at("resources").at("ledger").at("formula_cost").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": not a qconvolve result: " + e.what());
        }
        rows.push_back(std::move(r));
    }

    std::string text;
    if (format == "csv") {
        text = "file,mode,circuit,strategy,shots,seed,max_abs_error,mean_abs_error,shots_used,ledger_cost\n";
        for (const auto& r : rows) {
            text += fmt::format("{},{},{},{},{},{},{:.9e},{:.9e},{},{:.6f}\n", r.file, r.mode, r.circuit, r.strategy,
                                r.shots, r.seed, r.max_abs_error, r.mean_abs_error, r.shots_used, r.ledger_cost);
        }
    } else {
        text = fmt::format("{:<28} {:<8} {:<13} {:<15} {:>8} {:>8} {:>16} {:>16} {:>10} {:>14}\n", "file", "mode",
                           "circuit", "strategy", "shots", "seed", "max_abs_error", "mean_abs_error", "shots_used",
                           "ledger_cost");
        for (const auto& r : rows) {
            text += fmt::format("{:<28} {:<8} {:<13} {:<15} {:>8} {:>8} {:>16.9e} {:>16.9e} {:>10} {:>14.6f}\n",
                                r.file, r.mode, r.circuit, r.strategy, r.shots, r.seed, r.max_abs_error,
                                r.mean_abs_error, r.shots_used, r.ledger_cost);
        }
    }
    emit(out, text);
    return kOk;
}

void configure_logging() {
    auto logger = spdlog::stderr_color_mt("qconv");
    logger->set_pattern("qconv [%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("QCONV_LOG"); env != nullptr && *env != '\0') {
        const auto level = spdlog::level::from_str(env);
        // from_str maps unknown names to "off".
        if (level == spdlog::level::off && std::string_view(env) != "off") {
            spdlog::warn("unknown QCONV_LOG level '{}', using warn", env);
        } else {
            spdlog::set_level(level);
        }
    }
}

int report(int code, const char* kind, const std::exception& e) {
    std::cerr << "qconv: " << kind << ": " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();

    CLI::App app{"Convolution via quantum overlap estimation (classical simulation)", "qconv"};
    app.set_version_flag("--version", std::string(QCONV_VERSION));
    app.require_subcommand(1);

    std::string input, kernel, out, baseline = "dbt", format;
    GeometryFlags geom;
    PlanFlags plan;
    ShapeFlags shape_flags;
    std::vector<std::string> files;

    auto* conv = app.add_subcommand("convolve", "Classical reference convolution");
    conv->add_option("--input", input, "Input batch tensor (N,H,W,C)")->required();
    conv->add_option("--kernel", kernel, "Kernel bank tensor (R,S,C,M)")->required();
    add_geometry(conv, geom);
    conv->add_option("--out", out, "Output file (default stdout)");

    auto* qconv_cmd = app.add_subcommand("qconvolve", "Convolution through overlap estimation");
    qconv_cmd->add_option("--input", input, "Input batch tensor (N,H,W,C)")->required();
    qconv_cmd->add_option("--kernel", kernel, "Kernel bank tensor (R,S,C,M)")->required();
    add_geometry(qconv_cmd, geom);
    add_plan(qconv_cmd, plan, true);
    qconv_cmd->add_option("--out", out, "Output file (default stdout)");

    auto* reshape = app.add_subcommand("reshape", "Dump the reshaped sparse kernel matrix");
    reshape->add_option("--kernel", kernel, "Kernel bank tensor (R,S,C,M)")->required();
    reshape->add_option("--input", input, "Input batch; fixes H and W (required for the toeplitz baseline)");
    reshape->add_option("--height", shape_flags.height, "Input height H when --input is absent");
    reshape->add_option("--width", shape_flags.width, "Input width W when --input is absent");
    add_geometry(reshape, geom);
    reshape->add_option("--baseline", baseline, "Matrix to emit")->check(CLI::IsMember({"dbt", "toeplitz"}));
    reshape->add_option("--out", out, "Output file (default stdout)");

    auto* resources = app.add_subcommand("resources", "Qubit counts, cost ledger and complexity comparison");
    resources->add_option("--input", input, "Input batch; otherwise a dense input of the flagged shape");
    resources->add_option("--kernel", kernel, "Kernel bank; otherwise a dense kernel of the flagged shape");
    resources->add_option("--batch", shape_flags.batch, "N")->check(CLI::PositiveNumber);
    resources->add_option("--height", shape_flags.height, "H");
    resources->add_option("--width", shape_flags.width, "W");
    resources->add_option("--channels", shape_flags.channels, "C")->check(CLI::PositiveNumber);
    resources->add_option("--kernel-height", shape_flags.kernel_height, "R");
    resources->add_option("--kernel-width", shape_flags.kernel_width, "S");
    resources->add_option("--filters", shape_flags.filters, "M")->check(CLI::PositiveNumber);
    add_geometry(resources, geom);
    add_plan(resources, plan, true);
    format = "json";
    resources->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    resources->add_option("--out", out, "Output file (default stdout)");

    auto* compare = app.add_subcommand("compare", "Tabulate error, shots and cost across result files");
    compare->add_option("results", files, "qconvolve result JSON files")->required();
    std::string compare_format = "text";
    compare->add_option("--format", compare_format, "Output format")->check(CLI::IsMember({"text", "csv"}));
    compare->add_option("--out", out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFlag;
    }

    try {
        if (*conv) return cmd_convolve(input, kernel, geom, out);
        if (*qconv_cmd) return cmd_qconvolve(input, kernel, geom, plan, out);
        if (*reshape) return cmd_reshape(kernel, input, shape_flags, geom, baseline, out);
        if (*resources) return cmd_resources(input, kernel, shape_flags, geom, plan, format, out);
        if (*compare) return cmd_compare(files, compare_format, out);
    } catch (const FlagError& e) {
        return report(kFlag, "flag error", e);
    } catch (const InvalidPlanError& e) {
        return report(kFlag, "flag error", e);
    } catch (const IoError& e) {
        return report(kIo, "io error", e);
    } catch (const ParseError& e) {
        return report(kParse, "parse error", e);
    } catch (const ValueError& e) {
        return report(kParse, "parse error", e);
    } catch (const ShapeError& e) {
        return report(kShape, "shape error", e);
    } catch (const DimensionMismatchError& e) {
        return report(kShape, "shape error", e);
    } catch (const DegenerateError& e) {
        return report(kShape, "shape error", e);
    } catch (const std::exception& e) {
        return report(kInternal, "internal error", e);
    }
    return kInternal;
}
