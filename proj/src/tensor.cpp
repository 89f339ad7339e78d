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

#include "qconv/tensor.hpp"

#include <sstream>

namespace qconv {

std::size_t output_extent(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t pad) {
    if (in == 0 || kernel == 0) throw ShapeError("input and kernel extents must be >= 1");
    if (stride == 0) throw ShapeError("stride must be >= 1");
    const std::size_t padded = in + 2 * pad;
    if (kernel > padded) {
        throw ShapeError("kernel extent " + std::to_string(kernel) + " exceeds padded input extent " +
                         std::to_string(padded));
    }
    return (padded - kernel) / stride + 1;
}

OutputExtent derive_output_shape(std::size_t H, std::size_t W, std::size_t R, std::size_t S, std::size_t stride,
                                 std::size_t pad) {
    return derive_output_shape(H, W, R, S, ConvParams::uniform(stride, pad));
}

OutputExtent derive_output_shape(std::size_t H, std::size_t W, std::size_t R, std::size_t S,
                                 const ConvParams& params) {
    return {output_extent(H, R, params.stride_h, params.pad_h), output_extent(W, S, params.stride_w, params.pad_w)};
}

ConvShape ConvShape::make(std::size_t N, std::size_t H, std::size_t W, std::size_t C, std::size_t R, std::size_t S,
                          std::size_t M, ConvParams params) {
    if (N == 0 || H == 0 || W == 0 || C == 0 || R == 0 || S == 0 || M == 0) {
        throw ShapeError("all of N, H, W, C, R, S, M must be >= 1");
    }
    const auto out = derive_output_shape(H, W, R, S, params);
    ConvShape s;
    s.n_ = N;
    s.h_ = H;
    s.w_ = W;
    s.c_ = C;
    s.r_ = R;
    s.s_ = S;
    s.m_ = M;
    s.e_ = out.E;
    s.f_ = out.F;
    s.params_ = params;
    return s;
}

std::string ConvShape::describe() const {
    std::ostringstream os;
    os << "N=" << n_ << " H=" << h_ << " W=" << w_ << " C=" << c_ << " R=" << r_ << " S=" << s_ << " M=" << m_
       << " stride=(" << params_.stride_h << "," << params_.stride_w << ") pad=(" << params_.pad_h << ","
       << params_.pad_w << ") -> E=" << e_ << " F=" << f_;
    return os.str();
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw ShapeError("matrix data length does not match rows*cols");
}

std::vector<double> Matrix::column(std::size_t c) const {
    if (c >= cols_) throw ShapeError("column index out of range");
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

ConvShape infer_shape(const InputBatch& x, const KernelBank& k, ConvParams params) {
    const auto& xe = x.extents();
    const auto& ke = k.extents();
    if (xe[3] != ke[2]) {
        throw ShapeError("input has " + std::to_string(xe[3]) + " channels but kernel expects " +
                         std::to_string(ke[2]));
    }
    return ConvShape::make(xe[0], xe[1], xe[2], xe[3], ke[0], ke[1], ke[3], params);
}

void check_consistent(const InputBatch& x, const KernelBank& k, const ConvShape& shape) {
    const InputBatch::Extents want_x{shape.N(), shape.H(), shape.W(), shape.C()};
    const KernelBank::Extents want_k{shape.R(), shape.S(), shape.C(), shape.M()};
    if (x.extents() != want_x) throw ShapeError("input batch extents do not match " + shape.describe());
    if (k.extents() != want_k) throw ShapeError("kernel bank extents do not match " + shape.describe());
}

OutputBatch conv_reference(const InputBatch& x, const KernelBank& k, const ConvShape& shape) {
    check_consistent(x, k, shape);
    const auto& p = shape.params();
    OutputBatch y({shape.N(), shape.E(), shape.F(), shape.M()});
    for (std::size_t n = 0; n < shape.N(); ++n) {
        for (std::size_t ie = 0; ie < shape.E(); ++ie) {
            for (std::size_t jf = 0; jf < shape.F(); ++jf) {
                for (std::size_t d = 0; d < shape.M(); ++d) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < shape.R(); ++i) {
                        // Signed arithmetic: padded taps land at negative rows.
                        const auto row = static_cast<std::ptrdiff_t>(ie * p.stride_h + i) -
                                         static_cast<std::ptrdiff_t>(p.pad_h);
                        if (row < 0 || row >= static_cast<std::ptrdiff_t>(shape.H())) continue;
                        for (std::size_t j = 0; j < shape.S(); ++j) {
                            const auto col = static_cast<std::ptrdiff_t>(jf * p.stride_w + j) -
                                             static_cast<std::ptrdiff_t>(p.pad_w);
                            if (col < 0 || col >= static_cast<std::ptrdiff_t>(shape.W())) continue;
                            for (std::size_t c = 0; c < shape.C(); ++c) {
                                acc += x(n, static_cast<std::size_t>(row), static_cast<std::size_t>(col), c) *
                                       k(i, j, c, d);
                            }
                        }
                    }
                    y(n, ie, jf, d) = acc;
                }
            }
        }
    }
    return y;
}

Matrix flatten_input(const InputBatch& x) {
    const auto& e = x.extents();
    const std::size_t len = e[1] * e[2] * e[3];
    Matrix m(len, e[0]);
    for (std::size_t n = 0; n < e[0]; ++n) {
        for (std::size_t i = 0; i < e[1]; ++i) {
            for (std::size_t j = 0; j < e[2]; ++j) {
                for (std::size_t c = 0; c < e[3]; ++c) m(input_index(i, j, c, e[2], e[3]), n) = x(n, i, j, c);
            }
        }
    }
    return m;
}

InputBatch unflatten_input(const Matrix& m, std::size_t H, std::size_t W, std::size_t C) {
    if (m.rows() != H * W * C) throw ShapeError("matrix rows do not equal H*W*C");
    InputBatch x({m.cols(), H, W, C});
    for (std::size_t n = 0; n < m.cols(); ++n) {
        for (std::size_t i = 0; i < H; ++i) {
            for (std::size_t j = 0; j < W; ++j) {
                for (std::size_t c = 0; c < C; ++c) x(n, i, j, c) = m(input_index(i, j, c, W, C), n);
            }
        }
    }
    return x;
}

}  // namespace qconv
