// SPDX-License-Identifier: Apache-2.0
#include "evqmc/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace evqmc {

double SymmetricSparseMatrix::entry(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("SymmetricSparseMatrix::entry: index out of range");
    if (i > j) std::swap(i, j);
    const auto& rs = *row_start_;
    const auto& cols = *col_;
    auto first = cols.begin() + rs[i];
    auto last = cols.begin() + rs[i + 1];
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val_[static_cast<std::size_t>(it - cols.begin())];
}

void SymmetricSparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw std::invalid_argument("SymmetricSparseMatrix::multiply: size mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    const int* rs = row_start_->data();
    const int* cols = col_->data();
    const double* v = val_.data();
    for (int i = 0; i < n_; ++i) {
        const double xi = x[i];
        double acc = 0.0;
        for (int k = rs[i]; k < rs[i + 1]; ++k) {
            const int j = cols[k];
            const double a = v[k];
            acc += a * x[j];
            if (j != i) y[j] += a * xi;
        }
        y[i] += acc;
    }
}

std::vector<double> SymmetricSparseMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(n_), 0.0);
    const int* rs = row_start_->data();
    const int* cols = col_->data();
    for (int i = 0; i < n_; ++i)
        for (int k = rs[i]; k < rs[i + 1]; ++k)
            if (cols[k] == i) d[static_cast<std::size_t>(i)] = val_[static_cast<std::size_t>(k)];
    return d;
}

double SymmetricSparseMatrix::inner(std::span<const double> x, std::span<const double> y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
        throw std::invalid_argument("SymmetricSparseMatrix::inner: size mismatch");
    const int* rs = row_start_->data();
    const int* cols = col_->data();
    const double* v = val_.data();
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
        for (int k = rs[i]; k < rs[i + 1]; ++k) {
            const int j = cols[k];
            const double a = v[k];
            acc += a * x[i] * y[j];
            if (j != i) acc += a * x[j] * y[i];
        }
    }
    return acc;
}

SymmetricSparseMatrix SymmetricSparseMatrix::same_pattern_zero() const {
    SymmetricSparseMatrix m;
    m.n_ = n_;
    m.row_start_ = row_start_;
    m.col_ = col_;
    m.val_.assign(val_.size(), 0.0);
    return m;
}

void SymmetricSparseMatrix::add_scaled(const SymmetricSparseMatrix& other, double c) {
    if (!same_pattern_as(other))
        throw std::invalid_argument("SymmetricSparseMatrix::add_scaled: pattern mismatch");
    const double* ov = other.val_.data();
    double* v = val_.data();
    const std::size_t nnz = val_.size();
    for (std::size_t k = 0; k < nnz; ++k) v[k] += c * ov[k];
}

void SymmetricSparseMatrix::scale(double c) {
    for (double& v : val_) v *= c;
}

void SymmetricSparseMatrix::adopt_pattern(const SymmetricSparseMatrix& proto) {
    if (!same_pattern_as(proto))
        throw std::invalid_argument("SymmetricSparseMatrix::adopt_pattern: pattern mismatch");
    row_start_ = proto.row_start_;
    col_ = proto.col_;
}

SparseBuilder::SparseBuilder(int n) : n_(n), upper_(static_cast<std::size_t>(n)) {
    if (n < 0) throw std::invalid_argument("SparseBuilder: negative size");
}

void SparseBuilder::add(int i, int j, double v) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("SparseBuilder::add: index out of range");
    if (i > j) std::swap(i, j);
    upper_[static_cast<std::size_t>(i)][j] += v;
}

SymmetricSparseMatrix SparseBuilder::finish() const {
    auto row_start = std::make_shared<std::vector<int>>();
    auto col = std::make_shared<std::vector<int>>();
    SymmetricSparseMatrix m;
    m.n_ = n_;
    row_start->resize(static_cast<std::size_t>(n_) + 1, 0);
    std::size_t nnz = 0;
    for (int i = 0; i < n_; ++i) nnz += upper_[static_cast<std::size_t>(i)].size();
    col->reserve(nnz);
    m.val_.reserve(nnz);
    for (int i = 0; i < n_; ++i) {
        (*row_start)[static_cast<std::size_t>(i)] = static_cast<int>(col->size());
        for (const auto& [j, v] : upper_[static_cast<std::size_t>(i)]) {
            col->push_back(j);
            m.val_.push_back(v);
        }
    }
    (*row_start)[static_cast<std::size_t>(n_)] = static_cast<int>(col->size());
    m.row_start_ = std::move(row_start);
    m.col_ = std::move(col);
    return m;
}

} // namespace evqmc
