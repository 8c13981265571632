#ifndef EQUIDEFORM_LINALG_HPP
#define EQUIDEFORM_LINALG_HPP

// Dense matrices over F_p with exact Gaussian elimination.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <equideform/error.hpp>
#include <equideform/fp.hpp>

namespace equideform {

class FpMatrix {
public:
    FpMatrix(std::size_t rows, std::size_t cols, u64 p) : rows_(rows), cols_(cols), p_(p), a_(rows * cols, 0) {
        fp::check_modulus(p);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    u64 modulus() const noexcept { return p_; }

    u64 at(std::size_t r, std::size_t c) const { return a_.at(r * cols_ + c); }
    void set(std::size_t r, std::size_t c, u64 v) { a_.at(r * cols_ + c) = v % p_; }
    void set_column(std::size_t c, const std::vector<u64>& col) {
        for (std::size_t r = 0; r < rows_; ++r) set(r, c, r < col.size() ? col[r] : 0);
    }

    /// Columns [from, to) as a new matrix.
    FpMatrix columns(std::size_t from, std::size_t to) const {
        FpMatrix out(rows_, to - from, p_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = from; c < to; ++c) out.a_[r * out.cols_ + (c - from)] = at(r, c);
        }
        return out;
    }

    /// Row echelon form in place; returns pivot columns.
    std::vector<std::size_t> eliminate() {
        std::vector<std::size_t> pivots;
        std::size_t row = 0;
        for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
            std::size_t sel = row;
            while (sel < rows_ && at(sel, col) == 0) ++sel;
            if (sel == rows_) continue;
            if (sel != row) {
                for (std::size_t c = 0; c < cols_; ++c) std::swap(a_[sel * cols_ + c], a_[row * cols_ + c]);
            }
            const u64 inv = fp::inv(at(row, col), p_);
            for (std::size_t c = col; c < cols_; ++c) a_[row * cols_ + c] = fp::mul(a_[row * cols_ + c], inv, p_);
            for (std::size_t r = 0; r < rows_; ++r) {
                if (r == row) continue;
                const u64 f = at(r, col);
                if (f == 0) continue;
                for (std::size_t c = col; c < cols_; ++c) {
                    a_[r * cols_ + c] = fp::sub(a_[r * cols_ + c], fp::mul(f, a_[row * cols_ + c], p_), p_);
                }
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    std::size_t rank() const {
        FpMatrix m = *this;
        return m.eliminate().size();
    }

    std::size_t nullity() const { return cols_ - rank(); }

    /// Basis of {v : A v = 0}.
    std::vector<std::vector<u64>> nullspace() const {
        FpMatrix m = *this;
        const std::vector<std::size_t> piv = m.eliminate();
        std::vector<bool> is_pivot(cols_, false);
        for (std::size_t c : piv) is_pivot[c] = true;
        std::vector<std::vector<u64>> basis;
        for (std::size_t free = 0; free < cols_; ++free) {
            if (is_pivot[free]) continue;
            std::vector<u64> v(cols_, 0);
            v[free] = 1;
            for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = fp::neg(m.at(i, free), p_);
            basis.push_back(std::move(v));
        }
        return basis;
    }

    /// Some x with A x = b, or nullopt.
    std::optional<std::vector<u64>> solve(const std::vector<u64>& b) const {
        if (b.size() != rows_) throw InternalError("solve: right-hand side has wrong length");
        FpMatrix aug(rows_, cols_ + 1, p_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) aug.a_[r * (cols_ + 1) + c] = at(r, c);
            aug.a_[r * (cols_ + 1) + cols_] = b[r] % p_;
        }
        const std::vector<std::size_t> piv = aug.eliminate();
        if (!piv.empty() && piv.back() == cols_) return std::nullopt;
        std::vector<u64> x(cols_, 0);
        for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug.at(i, cols_);
        return x;
    }

    std::vector<u64> apply(const std::vector<u64>& v) const {
        std::vector<u64> out(rows_, 0);
        for (std::size_t r = 0; r < rows_; ++r) {
            u64 s = 0;
            for (std::size_t c = 0; c < cols_; ++c) s = fp::add(s, fp::mul(at(r, c), v.at(c), p_), p_);
            out[r] = s;
        }
        return out;
    }

    static FpMatrix identity(std::size_t n, u64 p) {
        FpMatrix out(n, n, p);
        for (std::size_t i = 0; i < n; ++i) out.a_[i * n + i] = 1 % p;
        return out;
    }

    FpMatrix operator*(const FpMatrix& b) const {
        if (cols_ != b.rows_ || p_ != b.p_) throw InternalError("matrix product: shape or modulus mismatch");
        FpMatrix out(rows_, b.cols_, p_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const u64 f = a_[r * cols_ + k];
                if (f == 0) continue;
                for (std::size_t c = 0; c < b.cols_; ++c) {
                    u64& dst = out.a_[r * b.cols_ + c];
                    dst = fp::add(dst, fp::mul(f, b.a_[k * b.cols_ + c], p_), p_);
                }
            }
        }
        return out;
    }

    FpMatrix operator+(const FpMatrix& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_ || p_ != b.p_) throw InternalError("matrix sum: shape mismatch");
        FpMatrix out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = fp::add(a_[i], b.a_[i], p_);
        return out;
    }

    FpMatrix operator-(const FpMatrix& b) const {
        if (rows_ != b.rows_ || cols_ != b.cols_ || p_ != b.p_) throw InternalError("matrix difference: shape mismatch");
        FpMatrix out = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = fp::sub(a_[i], b.a_[i], p_);
        return out;
    }

    FpMatrix scaled(u64 s) const {
        FpMatrix out = *this;
        for (u64& v : out.a_) v = fp::mul(v, s % p_, p_);
        return out;
    }

    /// Rows [from, to) as a new matrix.
    FpMatrix rows_range(std::size_t from, std::size_t to) const {
        FpMatrix out(to - from, cols_, p_);
        for (std::size_t r = from; r < to; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) out.a_[(r - from) * cols_ + c] = at(r, c);
        }
        return out;
    }

    bool operator==(const FpMatrix& b) const {
        return rows_ == b.rows_ && cols_ == b.cols_ && p_ == b.p_ && a_ == b.a_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    u64 p_;
    std::vector<u64> a_;
};

} // namespace equideform

#endif
