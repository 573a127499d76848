// SPDX-License-Identifier: Apache-2.0
//
// bdfrelay: delay-aware control for buffered two-hop MIMO relay networks
// Copyright (C) 2026 The bdfrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDFRELAY_COMPLEX_MATRIX_HPP
#define BDFRELAY_COMPLEX_MATRIX_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bdfrelay
{
    using cplx = std::complex<double>;

    /// Dense row-major complex matrix. Sized for the small (<= 4x4) channel and
    /// precoder matrices of the relay model; no expression templates.
    class ComplexMatrix
    {
    public:
        ComplexMatrix() = default;
        ComplexMatrix(std::size_t rows, std::size_t cols);
        ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> row_major);

        static ComplexMatrix identity(std::size_t n);
        static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

        /// Real diagonal matrix (square, size = values.size()).
        static ComplexMatrix diagonal(std::span<const double> values);

        std::size_t rows() const { return rows_; }
        std::size_t cols() const { return cols_; }
        bool empty() const { return rows_ == 0 || cols_ == 0; }

        cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        std::span<const cplx> data() const { return data_; }

        ComplexMatrix adjoint() const;

        /// Columns [first, first + count).
        ComplexMatrix columns(std::size_t first, std::size_t count) const;

        /// Scales column j by factors[j].
        ComplexMatrix scale_columns(std::span<const double> factors) const;

        double frobenius_norm() const;
        cplx trace() const;
        bool all_finite() const;

        ComplexMatrix &operator+=(const ComplexMatrix &rhs);
        ComplexMatrix &operator-=(const ComplexMatrix &rhs);
        ComplexMatrix &operator*=(cplx s);

        friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<cplx> data_;
    };

    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);
    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator*(cplx s, ComplexMatrix a);

    /// ||A^H A - I||_F, the column-orthonormality defect.
    double orthonormality_defect(const ComplexMatrix &a);

} // namespace bdfrelay

#endif
