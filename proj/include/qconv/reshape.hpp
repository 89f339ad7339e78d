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
 * @file reshape.hpp
 * Convolution as sparse matrix multiplication.
 *
 * build_dbt_kernel() turns a kernel bank into the doubly block-Toeplitz
 * matrix Kt (EFM x HWC) so that Kt * flatten_input(X) = flatten_output(Y).
 * build_toeplitz_input() is the older patch-matrix construction (EF x RSC per
 * image) that duplicates input pixels; it is kept as a comparison baseline.
 */

#include <cstddef>
#include <span>
#include <vector>

#include "qconv/tensor.hpp"

namespace qconv {

struct SparseEntry {
    std::size_t col = 0;
    double value = 0.0;
    bool operator==(const SparseEntry&) const = default;
};

/// Row-compressed sparse matrix. Column indices are strictly increasing in
/// each row and no stored value is zero.
class SparseMatrix {
   public:
    SparseMatrix() = default;
    /// Empty (all-zero) matrix of the given size.
    SparseMatrix(std::size_t rows, std::size_t cols);

    /// Validates and adopts per-row entry lists. Throws ShapeError for
    /// out-of-range or unordered columns and ValueError for zero or
    /// non-finite values.
    static SparseMatrix from_rows(std::size_t rows, std::size_t cols, const std::vector<std::vector<SparseEntry>>& entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return entries_.size(); }

    std::span<const SparseEntry> row(std::size_t r) const;
    std::vector<double> dense_row(std::size_t r) const;
    double at(std::size_t r, std::size_t c) const;

    bool operator==(const SparseMatrix&) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_start_{0};
    std::vector<SparseEntry> entries_;
};

/// Sparse times dense; throws ShapeError on inner-dimension mismatch.
Matrix multiply(const SparseMatrix& a, const Matrix& b);
std::vector<double> multiply(const SparseMatrix& a, std::span<const double> x);

struct OutputCoord {
    std::size_t iE, jF, d;
    bool operator==(const OutputCoord&) const = default;
};

struct InputCoord {
    std::size_t i, j, k;
    bool operator==(const InputCoord&) const = default;
};

/// Row and column bijections of Kt, inherited from the tensor flattening.
class ReshapePlan {
   public:
    explicit ReshapePlan(ConvShape shape) : shape_(shape) {}

    const ConvShape& shape() const { return shape_; }
    std::size_t rows() const { return shape_.output_length(); }
    std::size_t cols() const { return shape_.input_length(); }

    std::size_t row_of(const OutputCoord& o) const;
    OutputCoord row_coord(std::size_t p) const;
    std::size_t col_of(const InputCoord& in) const;
    InputCoord col_coord(std::size_t r) const;

   private:
    ConvShape shape_;
};

/// Doubly block-Toeplitz kernel matrix, EFM x HWC. Taps that land in the
/// zero padding and zero kernel weights are not stored.
SparseMatrix build_dbt_kernel(const KernelBank& k, const ConvShape& shape);

/// Patch matrix of image `n`, EF x RSC: row iE*F + jF holds the window at
/// that output position with column order i*S*C + j*C + k.
SparseMatrix build_toeplitz_input(const InputBatch& x, const ConvShape& shape, std::size_t n = 0);

/// Filter d flattened in the patch column order of build_toeplitz_input().
std::vector<double> filter_vector(const KernelBank& k, std::size_t d);

/// Inverse of flatten_output: EFM x N matrix to (N, E, F, M).
OutputBatch reshape_output(const Matrix& y_flat, const ConvShape& shape);
Matrix flatten_output(const OutputBatch& y);

struct NnzStats {
    std::size_t nnz = 0;
    std::size_t row_nnz_max = 0;
    double density = 0.0;
};

NnzStats nnz_stats(const SparseMatrix& m);

}  // namespace qconv
