// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <span>
#include <vector>

namespace evqmc {

// Sparse symmetric matrix storing the upper triangle (i <= j) in CSR form.
// entry(i,j) == entry(j,i) holds exactly because only one triangle exists.
// The structure arrays are shared between matrices assembled on the same mesh,
// so forming a0 + sum_j y_j a_j only touches the value array.
class SymmetricSparseMatrix {
public:
    SymmetricSparseMatrix() = default;

    int size() const { return n_; }
    std::size_t stored_count() const { return val_.size(); }

    double entry(int i, int j) const;

    // y = A x with symmetric expansion of the stored triangle
    void multiply(std::span<const double> x, std::span<double> y) const;

    std::vector<double> diagonal() const;

    // x^T A y
    double inner(std::span<const double> x, std::span<const double> y) const;

    // copy with the same (shared) structure and zeroed values
    SymmetricSparseMatrix same_pattern_zero() const;

    bool same_pattern_as(const SymmetricSparseMatrix& other) const {
        if (row_start_ == other.row_start_ && col_ == other.col_) return true;
        return n_ == other.n_ && row_start_ && other.row_start_ &&
               *row_start_ == *other.row_start_ && *col_ == *other.col_;
    }

    // share the structure arrays of proto (patterns must already match);
    // lets add_scaled take the pointer-equality fast path
    void adopt_pattern(const SymmetricSparseMatrix& proto);

    std::span<const double> values() const { return val_; }
    std::span<double> values_mut() { return val_; }

    // val += c * other.val; requires an identical shared structure
    void add_scaled(const SymmetricSparseMatrix& other, double c);

    void scale(double c);

private:
    friend class SparseBuilder;
    int n_ = 0;
    std::shared_ptr<const std::vector<int>> row_start_; // size n+1
    std::shared_ptr<const std::vector<int>> col_;       // cols >= row
    std::vector<double> val_;
};

// Accumulates (i, j, v) triplets; duplicate locations are summed.
class SparseBuilder {
public:
    explicit SparseBuilder(int n);
    int size() const { return n_; }
    void add(int i, int j, double v);
    SymmetricSparseMatrix finish() const;

private:
    int n_;
    std::vector<std::map<int, double>> upper_; // per-row, keys >= row index
};

} // namespace evqmc
