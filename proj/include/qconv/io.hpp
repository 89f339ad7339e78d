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
 * @file io.hpp
 * File formats.
 *
 * Tensors:
 *   JSON  {"shape": [d0, d1, d2, d3], "data": [...]} with row-major data.
 *   CSV   first line "shape,d0,d1,d2,d3", then d0 lines each holding the
 *         d1*d2*d3 row-major values of one leading index (one image per
 *         line for an input batch).
 * Sparse matrices:
 *   JSON  {"rows": r, "cols": c, "entries": [[row, col, value], ...]} sorted
 *         by (row, col).
 */

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qconv/engine.hpp"
#include "qconv/reshape.hpp"
#include "qconv/tensor.hpp"

namespace qconv {

struct RawTensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
};

RawTensor parse_tensor_json(std::string_view text);
RawTensor parse_tensor_csv(std::string_view text);
/// Chooses CSV for a ".csv" extension and JSON otherwise. Throws IoError
/// when the file cannot be read and ParseError when it is malformed.
RawTensor read_tensor_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

InputBatch to_input_batch(const RawTensor& raw);
KernelBank to_kernel_bank(const RawTensor& raw);

template <class Tag>
nlohmann::ordered_json tensor_to_json(const Tensor4<Tag>& t) {
    nlohmann::ordered_json j;
    j["shape"] = t.extents();
    j["data"] = std::vector<double>(t.data().begin(), t.data().end());
    return j;
}

std::string tensor_to_csv(const RawTensor& t);
RawTensor raw_of(const InputBatch& x);

nlohmann::ordered_json sparse_to_json(const SparseMatrix& m);
SparseMatrix sparse_from_json(const nlohmann::json& j);
nlohmann::ordered_json nnz_stats_to_json(const NnzStats& s);

nlohmann::ordered_json shape_to_json(const ConvShape& s);
nlohmann::ordered_json config_to_json(const QConvConfig& cfg);
nlohmann::ordered_json ledger_to_json(const LedgerSnapshot& s);
nlohmann::ordered_json cost_summary_to_json(const CostSummary& s);
nlohmann::ordered_json resource_report_to_json(const ResourceReport& r);
nlohmann::ordered_json result_to_json(const QConvResult& r, const QConvConfig& cfg);
nlohmann::ordered_json ranking_to_json(const std::vector<RankedCell>& cells);

}  // namespace qconv
