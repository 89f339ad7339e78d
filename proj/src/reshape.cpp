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

#include "qconv/reshape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qconv {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_start_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_rows(std::size_t rows, std::size_t cols,
                                     const std::vector<std::vector<SparseEntry>>& entries) {
    if (entries.size() != rows) throw ShapeError("sparse matrix row list length does not match row count");
    SparseMatrix m(rows, cols);
    std::size_t total = 0;
    for (const auto& r : entries) total += r.size();
    m.entries_.reserve(total);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t e = 0; e < entries[r].size(); ++e) {
            const auto& entry = entries[r][e];
            if (entry.col >= cols) {
                throw ShapeError("column " + std::to_string(entry.col) + " out of range in row " + std::to_string(r));
            }
            if (e > 0 && entries[r][e - 1].col >= entry.col) {
                throw ShapeError("columns not strictly increasing in row " + std::to_string(r));
            }
            if (entry.value == 0.0 || !std::isfinite(entry.value)) {
                throw ValueError("sparse entries must be finite and nonzero (row " + std::to_string(r) + ")");
            }
            m.entries_.push_back(entry);
        }
        m.row_start_[r + 1] = m.entries_.size();
    }
    return m;
}

std::span<const SparseEntry> SparseMatrix::row(std::size_t r) const {
    if (r >= rows_) throw ShapeError("row index out of range");
    return std::span<const SparseEntry>(entries_).subspan(row_start_[r], row_start_[r + 1] - row_start_[r]);
}

std::vector<double> SparseMatrix::dense_row(std::size_t r) const {
    std::vector<double> out(cols_, 0.0);
    for (const auto& e : row(r)) out[e.col] = e.value;
    return out;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
    const auto entries = row(r);
    const auto it = std::lower_bound(entries.begin(), entries.end(), c,
                                     [](const SparseEntry& e, std::size_t col) { return e.col < col; });
    return (it != entries.end() && it->col == c) ? it->value : 0.0;
}

Matrix multiply(const SparseMatrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("sparse * dense: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (const auto& e : a.row(r)) {
            for (std::size_t q = 0; q < b.cols(); ++q) out(r, q) += e.value * b(e.col, q);
        }
    }
    return out;
}

std::vector<double> multiply(const SparseMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw ShapeError("sparse * vector: inner dimensions differ");
    std::vector<double> out(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (const auto& e : a.row(r)) out[r] += e.value * x[e.col];
    }
    return out;
}

std::size_t ReshapePlan::row_of(const OutputCoord& o) const {
    return output_index(o.iE, o.jF, o.d, shape_.E(), shape_.F());
}

OutputCoord ReshapePlan::row_coord(std::size_t p) const {
    const std::size_t ef = shape_.E() * shape_.F();
    return {(p % ef) / shape_.F(), p % shape_.F(), p / ef};
}

std::size_t ReshapePlan::col_of(const InputCoord& in) const {
    return input_index(in.i, in.j, in.k, shape_.W(), shape_.C());
}

InputCoord ReshapePlan::col_coord(std::size_t r) const {
    const std::size_t wc = shape_.W() * shape_.C();
    return {r / wc, (r % wc) / shape_.C(), r % shape_.C()};
}

namespace {

// Input pixel index along one axis for output position `out` and tap `tap`,
// or -1 when the tap reads padding.
std::ptrdiff_t source_pixel(std::size_t out, std::size_t tap, std::size_t stride, std::size_t pad,
                            std::size_t extent) {
    const auto pos = static_cast<std::ptrdiff_t>(out * stride + tap) - static_cast<std::ptrdiff_t>(pad);
    return (pos < 0 || pos >= static_cast<std::ptrdiff_t>(extent)) ? -1 : pos;
}

}  // namespace

SparseMatrix build_dbt_kernel(const KernelBank& k, const ConvShape& shape) {
    const KernelBank::Extents want{shape.R(), shape.S(), shape.C(), shape.M()};
    if (k.extents() != want) throw ShapeError("kernel bank extents do not match " + shape.describe());

    const ReshapePlan plan(shape);
    const auto& p = shape.params();
    std::vector<std::vector<SparseEntry>> rows(plan.rows());
    for (std::size_t d = 0; d < shape.M(); ++d) {
        for (std::size_t ie = 0; ie < shape.E(); ++ie) {
            for (std::size_t jf = 0; jf < shape.F(); ++jf) {
                auto& row = rows[plan.row_of({ie, jf, d})];
                row.reserve(shape.taps_per_filter());
                for (std::size_t i = 0; i < shape.R(); ++i) {
                    const auto hi = source_pixel(ie, i, p.stride_h, p.pad_h, shape.H());
                    if (hi < 0) continue;
                    for (std::size_t j = 0; j < shape.S(); ++j) {
                        const auto wj = source_pixel(jf, j, p.stride_w, p.pad_w, shape.W());
                        if (wj < 0) continue;
                        for (std::size_t c = 0; c < shape.C(); ++c) {
                            const double v = k(i, j, c, d);
                            if (v == 0.0) continue;
                            row.push_back({plan.col_of({static_cast<std::size_t>(hi), static_cast<std::size_t>(wj), c}), v});
                        }
                    }
                }
            }
        }
    }
    return SparseMatrix::from_rows(plan.rows(), plan.cols(), rows);
}

SparseMatrix build_toeplitz_input(const InputBatch& x, const ConvShape& shape, std::size_t n) {
    const InputBatch::Extents want{shape.N(), shape.H(), shape.W(), shape.C()};
    if (x.extents() != want) throw ShapeError("input batch extents do not match " + shape.describe());
    if (n >= shape.N()) throw ShapeError("image index out of range");

    const auto& p = shape.params();
    const std::size_t S = shape.S(), C = shape.C();
    std::vector<std::vector<SparseEntry>> rows(shape.E() * shape.F());
    for (std::size_t ie = 0; ie < shape.E(); ++ie) {
        for (std::size_t jf = 0; jf < shape.F(); ++jf) {
            auto& row = rows[ie * shape.F() + jf];
            for (std::size_t i = 0; i < shape.R(); ++i) {
                const auto hi = source_pixel(ie, i, p.stride_h, p.pad_h, shape.H());
                if (hi < 0) continue;
                for (std::size_t j = 0; j < S; ++j) {
                    const auto wj = source_pixel(jf, j, p.stride_w, p.pad_w, shape.W());
                    if (wj < 0) continue;
                    for (std::size_t c = 0; c < C; ++c) {
                        const double v = x(n, static_cast<std::size_t>(hi), static_cast<std::size_t>(wj), c);
                        if (v != 0.0) row.push_back({(i * S + j) * C + c, v});
                    }
                }
            }
        }
    }
    return SparseMatrix::from_rows(rows.size(), shape.taps_per_filter(), rows);
}

std::vector<double> filter_vector(const KernelBank& k, std::size_t d) {
    const auto& e = k.extents();
    if (d >= e[3]) throw ShapeError("filter index out of range");
    std::vector<double> out(e[0] * e[1] * e[2]);
    for (std::size_t i = 0; i < e[0]; ++i) {
        for (std::size_t j = 0; j < e[1]; ++j) {
            for (std::size_t c = 0; c < e[2]; ++c) out[(i * e[1] + j) * e[2] + c] = k(i, j, c, d);
        }
    }
    return out;
}

OutputBatch reshape_output(const Matrix& y_flat, const ConvShape& shape) {
    if (y_flat.rows() != shape.output_length()) throw ShapeError("output matrix rows do not equal E*F*M");
    OutputBatch y({y_flat.cols(), shape.E(), shape.F(), shape.M()});
    for (std::size_t n = 0; n < y_flat.cols(); ++n) {
        for (std::size_t ie = 0; ie < shape.E(); ++ie) {
            for (std::size_t jf = 0; jf < shape.F(); ++jf) {
                for (std::size_t d = 0; d < shape.M(); ++d) {
                    y(n, ie, jf, d) = y_flat(output_index(ie, jf, d, shape.E(), shape.F()), n);
                }
            }
        }
    }
    return y;
}

Matrix flatten_output(const OutputBatch& y) {
    const auto& e = y.extents();
    Matrix m(e[1] * e[2] * e[3], e[0]);
    for (std::size_t n = 0; n < e[0]; ++n) {
        for (std::size_t ie = 0; ie < e[1]; ++ie) {
            for (std::size_t jf = 0; jf < e[2]; ++jf) {
                for (std::size_t d = 0; d < e[3]; ++d) m(output_index(ie, jf, d, e[1], e[2]), n) = y(n, ie, jf, d);
            }
        }
    }
    return m;
}

NnzStats nnz_stats(const SparseMatrix& m) {
    NnzStats s;
    s.nnz = m.nnz();
    for (std::size_t r = 0; r < m.rows(); ++r) s.row_nnz_max = std::max(s.row_nnz_max, m.row(r).size());
    const std::size_t cells = m.rows() * m.cols();
    s.density = cells == 0 ? 0.0 : static_cast<double>(s.nnz) / static_cast<double>(cells);
    return s;
}

}  // namespace qconv
