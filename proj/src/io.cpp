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

#include "qconv/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace qconv {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

double parse_double(std::string_view field, std::size_t line) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("line " + std::to_string(line) + ": cannot parse number '" + std::string(field) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

RawTensor parse_tensor_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("shape") || !j.contains("data")) {
        throw ParseError("tensor JSON needs \"shape\" and \"data\" fields");
    }
    RawTensor t;
    try {
        t.shape = j.at("shape").get<std::vector<std::size_t>>();
        t.data = j.at("data").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("tensor JSON has wrong field types: ") + e.what());
    }
    if (t.data.size() != product(t.shape)) {
        throw ParseError("tensor data length " + std::to_string(t.data.size()) + " does not match shape product " +
                         std::to_string(product(t.shape)));
    }
    return t;
}

RawTensor parse_tensor_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw ParseError("empty CSV tensor");
    const auto header = split(lines[0], ',');
    if (header.empty() || header[0] != "shape" || header.size() < 2) {
        throw ParseError("CSV tensor must start with a 'shape,d0,d1,...' line");
    }
    RawTensor t;
    for (std::size_t i = 1; i < header.size(); ++i) {
        const double d = parse_double(header[i], 1);
        if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
            throw ParseError("CSV shape entries must be nonnegative integers");
        }
        t.shape.push_back(static_cast<std::size_t>(d));
    }
    const std::size_t rows = t.shape[0];
    const std::size_t per_row = rows == 0 ? 0 : product(t.shape) / rows;
    if (lines.size() - 1 != rows) {
        throw ParseError("CSV tensor has " + std::to_string(lines.size() - 1) + " data lines, shape says " +
                         std::to_string(rows));
    }
    t.data.reserve(product(t.shape));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto fields = split(lines[r + 1], ',');
        if (fields.size() != per_row) {
            throw ParseError("line " + std::to_string(r + 2) + ": expected " + std::to_string(per_row) +
                             " values, found " + std::to_string(fields.size()));
        }
        for (auto f : fields) t.data.push_back(parse_double(f, r + 2));
    }
    return t;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

RawTensor read_tensor_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    try {
        return path.extension() == ".csv" ? parse_tensor_csv(text) : parse_tensor_json(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

namespace {

template <class T>
T to_tensor4(const RawTensor& raw, const char* what) {
    if (raw.shape.size() != 4) {
        throw ShapeError(std::string(what) + " must be a 4-D tensor, got rank " + std::to_string(raw.shape.size()));
    }
    return T({raw.shape[0], raw.shape[1], raw.shape[2], raw.shape[3]}, raw.data);
}

}  // namespace

InputBatch to_input_batch(const RawTensor& raw) { return to_tensor4<InputBatch>(raw, "input batch (N,H,W,C)"); }

KernelBank to_kernel_bank(const RawTensor& raw) { return to_tensor4<KernelBank>(raw, "kernel bank (R,S,C,M)"); }

std::string tensor_to_csv(const RawTensor& t) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "shape";
    for (auto d : t.shape) os << ',' << d;
    os << '\n';
    const std::size_t rows = t.shape.empty() ? 0 : t.shape[0];
    const std::size_t per_row = rows == 0 ? 0 : t.data.size() / rows;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < per_row; ++i) os << (i ? "," : "") << t.data[r * per_row + i];
        os << '\n';
    }
    return os.str();
}

RawTensor raw_of(const InputBatch& x) {
    return {{x.extent(0), x.extent(1), x.extent(2), x.extent(3)}, {x.data().begin(), x.data().end()}};
}

ordered_json sparse_to_json(const SparseMatrix& m) {
    ordered_json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    auto entries = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (const auto& e : m.row(r)) entries.push_back(ordered_json::array({r, e.col, e.value}));
    }
    j["entries"] = std::move(entries);
    return j;
}

SparseMatrix sparse_from_json(const json& j) {
    try {
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        std::vector<std::vector<SparseEntry>> per_row(rows);
        for (const auto& e : j.at("entries")) {
            const auto r = e.at(0).get<std::size_t>();
            if (r >= rows) throw ParseError("sparse entry row out of range");
            per_row[r].push_back({e.at(1).get<std::size_t>(), e.at(2).get<double>()});
        }
        return SparseMatrix::from_rows(rows, cols, per_row);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed sparse matrix JSON: ") + e.what());
    }
}

ordered_json nnz_stats_to_json(const NnzStats& s) {
    return {{"nnz", s.nnz}, {"row_nnz_max", s.row_nnz_max}, {"density", s.density}};
}

ordered_json shape_to_json(const ConvShape& s) {
    const auto& p = s.params();
    return {{"N", s.N()},
            {"H", s.H()},
            {"W", s.W()},
            {"C", s.C()},
            {"R", s.R()},
            {"S", s.S()},
            {"M", s.M()},
            {"E", s.E()},
            {"F", s.F()},
            {"stride", {p.stride_h, p.stride_w}},
            {"pad", {p.pad_h, p.pad_w}}};
}

ordered_json config_to_json(const QConvConfig& cfg) {
    ordered_json j;
    j["shape"] = shape_to_json(cfg.shape);
    j["mode"] = to_string(cfg.plan.mode);
    j["shots"] = cfg.plan.shots;
    j["epsilon"] = cfg.plan.epsilon;
    j["delta"] = cfg.plan.delta;
    j["seed"] = cfg.plan.seed;
    j["generator"] = kGeneratorName;
    j["circuit"] = to_string(cfg.circuit);
    j["strategy"] = to_string(cfg.strategy);
    j["batched"] = cfg.batched;
    j["parallel_units"] = cfg.parallel_units;
    return j;
}

ordered_json ledger_to_json(const LedgerSnapshot& s) {
    return {{"preprocess_touches", s.preprocess_touches},
            {"qram_queries", s.qram_queries},
            {"prep_invocations", s.prep_invocations},
            {"amplitude_amp_rounds", s.amplitude_amp_rounds},
            {"shots", s.shots},
            {"copies", s.copies},
            {"parallel_units", s.parallel_units},
            {"registered_vectors", s.registered_vectors},
            {"registered_nnz", s.registered_nnz},
            {"registered_dim_max", s.registered_dim_max},
            {"registered_linf_max", s.registered_linf_max}};
}

ordered_json cost_summary_to_json(const CostSummary& s) {
    ordered_json j;
    j["strategy"] = to_string(s.strategy);
    j["formula"] = s.formula;
    j["formula_cost"] = s.formula_cost;
    j["polylog_factor"] = s.polylog_factor;
    j["extra_resources"] = s.extra_resources;
    j["inputs"] = {{"n", s.inputs.n},
                   {"nnz", s.inputs.nnz},
                   {"linf", s.inputs.linf},
                   {"copies", s.inputs.copies},
                   {"parallel_units", s.inputs.parallel_units}};
    j["counted"] = ledger_to_json(s.counted);
    return j;
}

ordered_json resource_report_to_json(const ResourceReport& r) {
    ordered_json j;
    j["qubits"] = {{"index_p", r.qubits.index_p},
                   {"index_q", r.qubits.index_q},
                   {"data", r.qubits.data},
                   {"ancilla", r.qubits.ancilla},
                   {"total", r.qubits.total()}};
    j["ledger"] = cost_summary_to_json(r.ledger);
    auto strategies = ordered_json::array();
    for (const auto& s : r.strategies) strategies.push_back(cost_summary_to_json(s));
    j["strategies"] = std::move(strategies);
    j["shots_used"] = r.shots_used;
    j["depth_class"] = r.depth_class;
    auto rows = ordered_json::array();
    for (const auto& c : r.comparison) {
        rows.push_back({{"method", c.method},
                        {"qram_complexity", c.qram_complexity},
                        {"circuit_depth", c.circuit_depth},
                        {"preprocessing", c.preprocessing},
                        {"state_prep", c.state_prep},
                        {"nisq_suitability", c.nisq_suitability},
                        {"qram_value", c.qram_value},
                        {"depth_value", c.depth_value},
                        {"preprocessing_value", c.preprocessing_value}});
    }
    j["comparison"] = std::move(rows);
    return j;
}

ordered_json result_to_json(const QConvResult& r, const QConvConfig& cfg) {
    ordered_json j;
    j["config"] = config_to_json(cfg);
    j["seed"] = cfg.plan.seed;
    j["estimated"] = tensor_to_json(r.estimated);
    j["exact"] = tensor_to_json(r.exact);
    j["std_error"] = tensor_to_json(r.std_errors);
    j["max_abs_error"] = r.max_abs_error;
    j["mean_abs_error"] = r.mean_abs_error;
    j["sign_loss"] = r.sign_loss;
    j["estimated_entries"] = r.estimated_entries;
    j["zero_entries"] = r.zero_entries;
    j["resources"] = resource_report_to_json(r.resources);
    return j;
}

ordered_json ranking_to_json(const std::vector<RankedCell>& cells) {
    auto arr = ordered_json::array();
    for (const auto& c : cells) {
        arr.push_back({{"p", c.pair.p},
                       {"q", c.pair.q},
                       {"count", c.count},
                       {"frequency", c.frequency},
                       {"exact_p0", c.exact_p0}});
    }
    return arr;
}

}  // namespace qconv
