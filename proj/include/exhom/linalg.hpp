#pragma once

// Exact linear algebra over Q with canonical (reduced-echelon) outputs, plus
// the Subquotient type that carries every homology group in the engine.

#include <optional>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace exhom {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;

inline QMat to_dense(const SparseMatrix& m) {
    QMat out(m.rows(), QVec(m.cols(), Rational(0)));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (auto& [c, v] : m.row(r)) out[r][c] = v;
    return out;
}

inline SparseMatrix from_rows(const QMat& rows, std::size_t cols) {
    SparseMatrix out(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (rows[r][c] != 0) out.set(r, c, rows[r][c]);
    return out;
}

// In-place reduced row echelon form; returns the pivot columns.
inline std::vector<std::size_t> rref(QMat& m) {
    std::vector<std::size_t> pivots;
    if (m.empty()) return pivots;
    std::size_t cols = m[0].size(), r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && m[p][c] == 0) ++p;
        if (p == m.size()) continue;
        std::swap(m[r], m[p]);
        Rational inv = 1 / m[r][c];
        for (auto& x : m[r]) x *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank_of(QMat m) { return rref(m).size(); }
inline std::size_t rank_of(const SparseMatrix& m) { return rank_of(to_dense(m)); }

// Canonical subspace basis: RREF rows with zero rows dropped.
inline QMat row_reduce(QMat rows) {
    auto pivots = rref(rows);
    rows.resize(pivots.size());
    return rows;
}

// Kernel basis in canonical free-coordinate form: one vector per free column
// f, with coordinate 1 at f and the back-substituted pivot entries.
inline QMat kernel_basis(QMat m, std::size_t cols) {
    auto pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    QMat out;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        QVec v(cols, Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][f];
        out.push_back(std::move(v));
    }
    return out;
}
inline QMat kernel_basis(const SparseMatrix& m) { return kernel_basis(to_dense(m), m.cols()); }

// Canonical image (column-space) basis: RREF of the transpose's rows.
inline QMat image_basis(const SparseMatrix& m) {
    QMat cols_as_rows(m.cols(), QVec(m.rows(), Rational(0)));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (auto& [c, v] : m.row(r)) cols_as_rows[c][r] = v;
    return row_reduce(std::move(cols_as_rows));
}

// Canonical particular solution (free coordinates zero), or absence.
inline std::optional<QVec> solve(QMat m, const QVec& rhs) {
    if (m.size() != rhs.size()) fail(errc::schema, "solve dimension mismatch");
    std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t r = 0; r < m.size(); ++r) m[r].push_back(rhs[r]);
    auto pivots = rref(m);
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
    QVec x(cols, Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = m[i][cols];
    return x;
}
inline std::optional<QVec> solve(const SparseMatrix& m, const QVec& rhs) { return solve(to_dense(m), rhs); }

// Coordinates of v in an RREF row basis; absent when v is outside the span.
inline std::optional<QVec> coords_in(const QMat& rref_rows, const std::vector<std::size_t>& pivots, QVec v) {
    QVec c(rref_rows.size(), Rational(0));
    for (std::size_t i = 0; i < rref_rows.size(); ++i) {
        c[i] = v[pivots[i]];
        if (c[i] == 0) continue;
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c[i] * rref_rows[i][j];
    }
    for (auto& x : v)
        if (x != 0) return std::nullopt;
    return c;
}

inline std::vector<std::size_t> pivots_of(const QMat& rref_rows) {
    std::vector<std::size_t> out;
    for (auto& row : rref_rows) {
        std::size_t c = 0;
        while (c < row.size() && row[c] == 0) ++c;
        out.push_back(c);
    }
    return out;
}

inline bool in_span(const QMat& rref_rows, const QVec& v) {
    return coords_in(rref_rows, pivots_of(rref_rows), v).has_value();
}

// Z/B with canonical reduced-echelon bases; B must lie in span(Z).
class Subquotient {
  public:
    Subquotient() = default;
    Subquotient(std::size_t ambient, QMat z_rows, QMat b_rows) : ambient_(ambient) {
        z_ = row_reduce(std::move(z_rows));
        b_ = row_reduce(std::move(b_rows));
        auto zp = pivots_of(z_);
        for (auto& b : b_)
            if (!coords_in(z_, zp, b)) fail(errc::verdict, "subquotient: B is not contained in Z");
        auto bp = pivots_of(b_);
        QMat red;
        for (auto z : z_) {
            for (std::size_t i = 0; i < b_.size(); ++i) {
                Rational f = z[bp[i]];
                if (f == 0) continue;
                for (std::size_t j = 0; j < ambient_; ++j) z[j] -= f * b_[i][j];
            }
            red.push_back(std::move(z));
        }
        reps_ = row_reduce(std::move(red));
        if (reps_.size() != z_.size() - b_.size()) fail(errc::verdict, "subquotient: dimension bookkeeping failed");
    }

    std::size_t ambient() const { return ambient_; }
    std::size_t dim() const { return reps_.size(); }
    const QMat& z() const { return z_; }
    const QMat& b() const { return b_; }
    const QMat& reps() const { return reps_; }

    // Class coordinates of an ambient vector lying in span(Z).
    QVec class_of(const QVec& v) const {
        QVec w = v;
        auto bp = pivots_of(b_);
        for (std::size_t i = 0; i < b_.size(); ++i) {
            Rational f = w[bp[i]];
            if (f == 0) continue;
            for (std::size_t j = 0; j < ambient_; ++j) w[j] -= f * b_[i][j];
        }
        auto c = coords_in(reps_, pivots_of(reps_), w);
        if (!c) fail(errc::verdict, "subquotient: vector not in span(Z) + span(B)");
        return *c;
    }

  private:
    std::size_t ambient_ = 0;
    QMat z_, b_, reps_;
};

// Matrix of the map induced by f on quotient bases.  Well-definedness is
// checked, not assumed: f(Z_src) must land in span(Z_dst) and f(B_src) in
// span(B_dst); violations raise a verdict error naming a witness row.
inline SparseMatrix subquotient_induced_map(const SparseMatrix& f, const Subquotient& src, const Subquotient& dst) {
    if (f.cols() != src.ambient() || f.rows() != dst.ambient())
        fail(errc::schema, "induced map: ambient dimension mismatch");
    auto dz = dst.z();
    auto dzp = pivots_of(dz);
    for (std::size_t i = 0; i < src.z().size(); ++i)
        if (!coords_in(dz, dzp, f.apply(src.z()[i])))
            fail(errc::verdict, "induced map not well-defined: f(Z) escapes Z at source row " + std::to_string(i));
    auto db = dst.b();
    auto dbp = pivots_of(db);
    for (std::size_t i = 0; i < src.b().size(); ++i)
        if (!coords_in(db, dbp, f.apply(src.b()[i])))
            fail(errc::verdict, "induced map not well-defined: f(B) escapes B at source row " + std::to_string(i));
    SparseMatrix out(dst.dim(), src.dim());
    for (std::size_t j = 0; j < src.dim(); ++j) {
        QVec c = dst.class_of(f.apply(src.reps()[j]));
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0) out.set(i, j, c[i]);
    }
    return out;
}

}  // namespace exhom
