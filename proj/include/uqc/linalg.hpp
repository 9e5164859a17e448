#pragma once

#include "uqc/cyclo.hpp"

#include <optional>
#include <vector>

namespace uqc {

/// Dense matrix over Q(zeta_M). Row-major. All algorithms are deterministic
/// (first-nonzero pivoting) so repeated runs produce identical bases.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::shared_ptr<const CycloContext> ctx, long rows, long cols);

    static Mat identity(const std::shared_ptr<const CycloContext>& ctx, long n);

    long rows() const { return rows_; }
    long cols() const { return cols_; }
    const std::shared_ptr<const CycloContext>& context() const { return ctx_; }

    CycloNum& at(long r, long c) { return a_[r * cols_ + c]; }
    const CycloNum& at(long r, long c) const { return a_[r * cols_ + c]; }

    Mat operator*(const Mat& o) const;
    Mat operator+(const Mat& o) const;
    Mat operator-(const Mat& o) const;
    Mat scaled(const CycloNum& s) const;
    Mat transpose() const;
    bool operator==(const Mat& o) const;
    bool is_zero() const;

    Mat hstack(const Mat& o) const; // [this | o]
    Mat vstack(const Mat& o) const; // [this ; o]
    Mat cols_subset(const std::vector<long>& idx) const;

    std::string str() const;

private:
    std::shared_ptr<const CycloContext> ctx_;
    long rows_, cols_;
    std::vector<CycloNum> a_;
};

/// Row echelon data for a matrix; produced once, queried for rank / kernel /
/// solving.
struct Echelon {
    Mat rref;                    // reduced row echelon form
    std::vector<long> pivots;    // pivot column per nonzero row
    long rank() const { return static_cast<long>(pivots.size()); }
};

Echelon echelon(const Mat& m);
long rank(const Mat& m);

/// Basis of the right kernel {x : m x = 0}, as columns.
Mat nullspace(const Mat& m);

/// One solution of m x = b (b a column matrix), if any.
std::optional<Mat> solve(const Mat& m, const Mat& b);

/// Inverse of a square matrix, if invertible.
std::optional<Mat> inverse(const Mat& m);

/// Basis of the column space, as columns (subset of original columns,
/// deterministic).
Mat column_space(const Mat& m);

/// Indices such that the selected columns of m extend `inside`'s columns to a
/// basis of the full column space of [inside | m].
std::vector<long> extend_basis(const Mat& inside, const Mat& m);

} // namespace uqc
