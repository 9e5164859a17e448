#include "uqc/linalg.hpp"

#include <sstream>

namespace uqc {

Mat::Mat(std::shared_ptr<const CycloContext> ctx, long rows, long cols)
    : ctx_(std::move(ctx)), rows_(rows), cols_(cols) {
    a_.assign(static_cast<size_t>(rows) * cols, ctx_->zero());
}

Mat Mat::identity(const std::shared_ptr<const CycloContext>& ctx, long n) {
    Mat m(ctx, n, n);
    for (long i = 0; i < n; ++i) m.at(i, i) = ctx->one();
    return m;
}

Mat Mat::operator*(const Mat& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    Mat r(ctx_, rows_, o.cols_);
    for (long i = 0; i < rows_; ++i)
        for (long k = 0; k < cols_; ++k) {
            const CycloNum& x = at(i, k);
            if (x.is_zero()) continue;
            for (long j = 0; j < o.cols_; ++j) {
                const CycloNum& y = o.at(k, j);
                if (y.is_zero()) continue;
                r.at(i, j) += x * y;
            }
        }
    return r;
}

Mat Mat::operator+(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sum shape mismatch");
    Mat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
    return r;
}

Mat Mat::operator-(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix diff shape mismatch");
    Mat r = *this;
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
    return r;
}

Mat Mat::scaled(const CycloNum& s) const {
    Mat r = *this;
    for (auto& x : r.a_) x *= s;
    return r;
}

Mat Mat::transpose() const {
    Mat r(ctx_, cols_, rows_);
    for (long i = 0; i < rows_; ++i)
        for (long j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

bool Mat::operator==(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
        if (!(a_[i] == o.a_[i])) return false;
    return true;
}

bool Mat::is_zero() const {
    for (const auto& x : a_)
        if (!x.is_zero()) return false;
    return true;
}

Mat Mat::hstack(const Mat& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("hstack shape mismatch");
    Mat r(ctx_ ? ctx_ : o.ctx_, rows_, cols_ + o.cols_);
    for (long i = 0; i < rows_; ++i) {
        for (long j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
        for (long j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
    }
    return r;
}

Mat Mat::vstack(const Mat& o) const {
    if (cols_ != o.cols_) throw std::invalid_argument("vstack shape mismatch");
    Mat r(ctx_ ? ctx_ : o.ctx_, rows_ + o.rows_, cols_);
    for (long i = 0; i < rows_; ++i)
        for (long j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (long i = 0; i < o.rows_; ++i)
        for (long j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
    return r;
}

Mat Mat::cols_subset(const std::vector<long>& idx) const {
    Mat r(ctx_, rows_, static_cast<long>(idx.size()));
    for (long j = 0; j < static_cast<long>(idx.size()); ++j)
        for (long i = 0; i < rows_; ++i) r.at(i, j) = at(i, idx[j]);
    return r;
}

std::string Mat::str() const {
    std::ostringstream os;
    for (long i = 0; i < rows_; ++i) {
        os << "[ ";
        for (long j = 0; j < cols_; ++j) os << at(i, j).str() << (j + 1 < cols_ ? ", " : " ");
        os << "]\n";
    }
    return os.str();
}

Echelon echelon(const Mat& m) {
    Echelon e;
    e.rref = m;
    Mat& a = e.rref;
    long r = 0;
    for (long c = 0; c < a.cols() && r < a.rows(); ++c) {
        long piv = -1;
        for (long i = r; i < a.rows(); ++i)
            if (!a.at(i, c).is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (long j = 0; j < a.cols(); ++j) std::swap(a.at(piv, j), a.at(r, j));
        CycloNum ipiv = a.at(r, c).inv();
        for (long j = c; j < a.cols(); ++j)
            if (!a.at(r, j).is_zero()) a.at(r, j) *= ipiv;
        for (long i = 0; i < a.rows(); ++i) {
            if (i == r) continue;
            const CycloNum f = a.at(i, c);
            if (f.is_zero()) continue;
            for (long j = c; j < a.cols(); ++j) {
                if (a.at(r, j).is_zero()) continue;
                a.at(i, j) -= f * a.at(r, j);
            }
        }
        e.pivots.push_back(c);
        ++r;
    }
    return e;
}

long rank(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return echelon(m).rank();
}

Mat nullspace(const Mat& m) {
    if (m.cols() == 0) return Mat(m.context(), 0, 0);
    if (m.rows() == 0) return Mat::identity(m.context(), m.cols());
    Echelon e = echelon(m);
    std::vector<bool> is_piv(m.cols(), false);
    for (long p : e.pivots) is_piv[p] = true;
    std::vector<long> free_cols;
    for (long c = 0; c < m.cols(); ++c)
        if (!is_piv[c]) free_cols.push_back(c);
    Mat ker(m.context(), m.cols(), static_cast<long>(free_cols.size()));
    for (long k = 0; k < static_cast<long>(free_cols.size()); ++k) {
        long fc = free_cols[k];
        ker.at(fc, k) = m.context()->one();
        for (long i = 0; i < e.rank(); ++i) {
            const CycloNum& v = e.rref.at(i, fc);
            if (!v.is_zero()) ker.at(e.pivots[i], k) = -v;
        }
    }
    return ker;
}

std::optional<Mat> solve(const Mat& m, const Mat& b) {
    if (m.rows() != b.rows()) throw std::invalid_argument("solve shape mismatch");
    Mat aug = m.hstack(b);
    Echelon e = echelon(aug);
    // inconsistent if a pivot lands in the b-block
    for (long p : e.pivots)
        if (p >= m.cols()) return std::nullopt;
    Mat x(m.context(), m.cols(), b.cols());
    for (long i = 0; i < e.rank(); ++i)
        for (long j = 0; j < b.cols(); ++j) x.at(e.pivots[i], j) = e.rref.at(i, m.cols() + j);
    return x;
}

std::optional<Mat> inverse(const Mat& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    Mat aug = m.hstack(Mat::identity(m.context(), m.rows()));
    Echelon e = echelon(aug);
    if (e.rank() != m.rows()) return std::nullopt;
    for (long i = 0; i < e.rank(); ++i)
        if (e.pivots[i] != i) return std::nullopt;
    Mat inv(m.context(), m.rows(), m.rows());
    for (long i = 0; i < m.rows(); ++i)
        for (long j = 0; j < m.rows(); ++j) inv.at(i, j) = e.rref.at(i, m.cols() + j);
    return inv;
}

Mat column_space(const Mat& m) {
    Echelon e = echelon(m);
    return m.cols_subset(e.pivots);
}

std::vector<long> extend_basis(const Mat& inside, const Mat& m) {
    if (inside.cols() == 0 && m.cols() == 0) return {};
    Mat aug = inside.cols() > 0 ? inside.hstack(m) : m;
    Echelon e = echelon(aug);
    std::vector<long> out;
    for (long p : e.pivots)
        if (p >= inside.cols()) out.push_back(p - inside.cols());
    return out;
}

} // namespace uqc
