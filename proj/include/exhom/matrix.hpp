#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace exhom {

// Row-major sparse matrix over Q.  Stored coefficients are always nonzero.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_(rows) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::map<std::size_t, Rational>& row(std::size_t r) const { return row_[r]; }

    Rational at(std::size_t r, std::size_t c) const {
        auto it = row_[r].find(c);
        return it == row_[r].end() ? Rational(0) : it->second;
    }
    void set(std::size_t r, std::size_t c, const Rational& v) {
        if (v == 0)
            row_[r].erase(c);
        else
            row_[r][c] = v;
    }
    void add_at(std::size_t r, std::size_t c, const Rational& v) {
        auto& slot = row_[r][c];
        slot += v;
        if (slot == 0) row_[r].erase(c);
    }

    bool is_zero() const {
        for (auto& r : row_)
            if (!r.empty()) return false;
        return true;
    }
    std::size_t nnz() const {
        std::size_t t = 0;
        for (auto& r : row_) t += r.size();
        return t;
    }

    bool operator==(const SparseMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && row_ == o.row_; }

    SparseMatrix operator+(const SparseMatrix& o) const {
        SparseMatrix out = *this;
        for (std::size_t r = 0; r < o.rows_; ++r)
            for (auto& [c, v] : o.row_[r]) out.add_at(r, c, v);
        return out;
    }
    SparseMatrix operator-(const SparseMatrix& o) const { return *this + o.scaled(Rational(-1)); }

    SparseMatrix scaled(const Rational& s) const {
        SparseMatrix out(rows_, cols_);
        if (s == 0) return out;
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto& [c, v] : row_[r]) out.row_[r][c] = s * v;
        return out;
    }

    SparseMatrix operator*(const SparseMatrix& o) const {
        if (cols_ != o.rows_) fail(errc::schema, "matrix product dimension mismatch");
        SparseMatrix out(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto& [k, v] : row_[r])
                for (auto& [c, w] : o.row_[k]) out.add_at(r, c, v * w);
        return out;
    }

    std::vector<Rational> apply(const std::vector<Rational>& x) const {
        if (x.size() != cols_) fail(errc::schema, "matrix apply dimension mismatch");
        std::vector<Rational> out(rows_, Rational(0));
        for (std::size_t r = 0; r < rows_; ++r)
            for (auto& [c, v] : row_[r]) out[r] += v * x[c];
        return out;
    }

    static SparseMatrix identity(std::size_t n) {
        SparseMatrix out(n, n);
        for (std::size_t i = 0; i < n; ++i) out.row_[i][i] = 1;
        return out;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::map<std::size_t, Rational>> row_;
};

}  // namespace exhom
