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

#include "bdfrelay/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bdfrelay
{
    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0})
    {
    }

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::initializer_list<cplx> row_major)
        : rows_(rows), cols_(cols), data_(row_major)
    {
        if (data_.size() != rows * cols)
            throw std::invalid_argument("ComplexMatrix: initializer has " + std::to_string(data_.size()) +
                                        " entries, expected " + std::to_string(rows * cols));
    }

    ComplexMatrix ComplexMatrix::identity(std::size_t n)
    {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values)
    {
        ComplexMatrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            m(i, i) = values[i];
        return m;
    }

    ComplexMatrix ComplexMatrix::adjoint() const
    {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    ComplexMatrix ComplexMatrix::columns(std::size_t first, std::size_t count) const
    {
        if (first + count > cols_)
            throw std::out_of_range("ComplexMatrix::columns: range exceeds column count");
        ComplexMatrix out(rows_, count);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < count; ++c)
                out(r, c) = (*this)(r, first + c);
        return out;
    }

    ComplexMatrix ComplexMatrix::scale_columns(std::span<const double> factors) const
    {
        if (factors.size() != cols_)
            throw std::invalid_argument("ComplexMatrix::scale_columns: factor count mismatch");
        ComplexMatrix out(*this);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(r, c) *= factors[c];
        return out;
    }

    double ComplexMatrix::frobenius_norm() const
    {
        double s = 0.0;
        for (const auto &z : data_)
            s += std::norm(z);
        return std::sqrt(s);
    }

    cplx ComplexMatrix::trace() const
    {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
            t += (*this)(i, i);
        return t;
    }

    bool ComplexMatrix::all_finite() const
    {
        for (const auto &z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                return false;
        return true;
    }

    ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &rhs)
    {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("ComplexMatrix: shape mismatch in +=");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += rhs.data_[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &rhs)
    {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument("ComplexMatrix: shape mismatch in -=");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] -= rhs.data_[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator*=(cplx s)
    {
        for (auto &z : data_)
            z *= s;
        return *this;
    }

    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.cols() != b.rows())
            throw std::invalid_argument("ComplexMatrix: nonconformable product " + std::to_string(a.rows()) + "x" +
                                        std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                                        std::to_string(b.cols()));
        ComplexMatrix out(a.rows(), b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t k = 0; k < a.cols(); ++k)
            {
                const cplx aik = a(i, k);
                for (std::size_t j = 0; j < b.cols(); ++j)
                    out(i, j) += aik * b(k, j);
            }
        return out;
    }

    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    double orthonormality_defect(const ComplexMatrix &a)
    {
        return (a.adjoint() * a - ComplexMatrix::identity(a.cols())).frobenius_norm();
    }

} // namespace bdfrelay
