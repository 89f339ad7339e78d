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
 * @file tensor.hpp
 * Dense 4-D tensors, convolution shape arithmetic, flattening conventions
 * and the classical convolution used as ground truth everywhere else.
 *
 * Layout conventions (fixed project-wide):
 *  - InputBatch  (N, H, W, C), pixel (i, j, k) of an image flattens to
 *    i*W*C + j*C + k.
 *  - KernelBank  (R, S, C, M).
 *  - OutputBatch (N, E, F, M), entry (iE, jF, d) flattens to
 *    d*E*F + iE*F + jF so each filter's feature map is contiguous.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qconv/errors.hpp"

namespace qconv {

struct ConvParams {
    std::size_t stride_h = 1;
    std::size_t stride_w = 1;
    std::size_t pad_h = 0;
    std::size_t pad_w = 0;

    static ConvParams uniform(std::size_t stride, std::size_t pad) { return {stride, stride, pad, pad}; }
    bool operator==(const ConvParams&) const = default;
};

struct OutputExtent {
    std::size_t E = 0;
    std::size_t F = 0;
    bool operator==(const OutputExtent&) const = default;
};

/// floor((in + 2*pad - kernel) / stride) + 1; throws ShapeError when the
/// kernel does not fit in the padded input or stride is zero.
std::size_t output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad);

OutputExtent derive_output_shape(std::size_t H, std::size_t W, std::size_t R, std::size_t S,
                                 std::size_t stride = 1, std::size_t pad = 0);
OutputExtent derive_output_shape(std::size_t H, std::size_t W, std::size_t R, std::size_t S,
                                 const ConvParams& params);

/// Validated convolution geometry. E and F are always derived, never set.
class ConvShape {
   public:
    static ConvShape make(std::size_t N, std::size_t H, std::size_t W, std::size_t C, std::size_t R,
                          std::size_t S, std::size_t M, ConvParams params = {});

    std::size_t N() const { return n_; }
    std::size_t H() const { return h_; }
    std::size_t W() const { return w_; }
    std::size_t C() const { return c_; }
    std::size_t R() const { return r_; }
    std::size_t S() const { return s_; }
    std::size_t M() const { return m_; }
    std::size_t E() const { return e_; }
    std::size_t F() const { return f_; }
    const ConvParams& params() const { return params_; }

    /// H*W*C, the length of one flattened image.
    std::size_t input_length() const { return h_ * w_ * c_; }
    /// E*F*M, the length of one flattened output.
    std::size_t output_length() const { return e_ * f_ * m_; }
    /// R*S*C, taps per filter.
    std::size_t taps_per_filter() const { return r_ * s_ * c_; }

    std::string describe() const;

    bool operator==(const ConvShape&) const = default;

   private:
    ConvShape() = default;
    std::size_t n_ = 0, h_ = 0, w_ = 0, c_ = 0, r_ = 0, s_ = 0, m_ = 0, e_ = 0, f_ = 0;
    ConvParams params_;
};

template <class Tag>
class Tensor4 {
   public:
    using Extents = std::array<std::size_t, 4>;

    Tensor4() = default;

    explicit Tensor4(Extents extents) : extents_(extents), data_(count(extents), 0.0) {}

    Tensor4(Extents extents, std::vector<double> data) : extents_(extents), data_(std::move(data)) {
        if (data_.size() != count(extents_)) {
            throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape product " +
                             std::to_string(count(extents_)));
        }
        for (double v : data_) {
            if (!std::isfinite(v)) throw ValueError("tensor contains a non-finite value");
        }
    }

    const Extents& extents() const { return extents_; }
    std::size_t extent(std::size_t axis) const { return extents_.at(axis); }
    std::size_t size() const { return data_.size(); }

    std::size_t offset(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return ((a * extents_[1] + b) * extents_[2] + c) * extents_[3] + d;
    }

    double operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
        return data_[offset(a, b, c, d)];
    }
    double& operator()(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
        return data_[offset(a, b, c, d)];
    }

    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    bool operator==(const Tensor4&) const = default;

    static std::size_t count(const Extents& e) { return e[0] * e[1] * e[2] * e[3]; }

   private:
    Extents extents_{0, 0, 0, 0};
    std::vector<double> data_;
};

struct InputTag {};
struct KernelTag {};
struct OutputTag {};

/// Images, indexed (n, i, j, k).
using InputBatch = Tensor4<InputTag>;
/// Filters, indexed (i, j, k, d).
using KernelBank = Tensor4<KernelTag>;
/// Feature maps, indexed (n, iE, jF, d).
using OutputBatch = Tensor4<OutputTag>;

/// Dense row-major matrix.
class Matrix {
   public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::vector<double> column(std::size_t c) const;
    std::span<const double> data() const { return data_; }

    bool operator==(const Matrix&) const = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline std::size_t input_index(std::size_t i, std::size_t j, std::size_t k, std::size_t W, std::size_t C) {
    return (i * W + j) * C + k;
}

inline std::size_t output_index(std::size_t iE, std::size_t jF, std::size_t d, std::size_t E, std::size_t F) {
    return (d * E + iE) * F + jF;
}

/// Shape implied by an input batch and kernel bank; throws ShapeError when
/// the channel counts disagree or the kernel does not fit.
ConvShape infer_shape(const InputBatch& x, const KernelBank& k, ConvParams params = {});

/// Throws ShapeError unless x and k have exactly the extents `shape` names.
void check_consistent(const InputBatch& x, const KernelBank& k, const ConvShape& shape);

/// Y[n, iE, jF, d] = sum_{i,j,k} X[n, iE*sh + i - ph, jF*sw + j - pw, k] * K[i, j, k, d],
/// out-of-range input pixels read as zero.
OutputBatch conv_reference(const InputBatch& x, const KernelBank& k, const ConvShape& shape);

/// HWC x N matrix whose column q is image q flattened row-major.
Matrix flatten_input(const InputBatch& x);
InputBatch unflatten_input(const Matrix& m, std::size_t H, std::size_t W, std::size_t C);

}  // namespace qconv
