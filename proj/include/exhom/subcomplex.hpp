#pragma once

// Flat subcomplexes T (simultaneous kernels of curvature components), their
// restricted differentials, and exotic homology in both gradings.

#include <map>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "operator.hpp"

namespace exhom {

// T per degree = intersection of the kernels of the given operators, stored
// as canonical (echelon) row bases in model coordinates.
class FlatSubcomplex {
  public:
    FlatSubcomplex(const Model& m, std::vector<FormOperator> curvature)
        : model_(&m), curvature_(std::move(curvature)), rows_(m.n() + 1), pivots_(m.n() + 1) {
        for (int deg = 0; deg <= m.n(); ++deg) {
            QMat stacked;
            for (auto& c : curvature_)
                for (auto& [key, b] : c.blocks()) {
                    if (key.first != deg) continue;
                    QMat dense = to_dense(b);
                    stacked.insert(stacked.end(), dense.begin(), dense.end());
                }
            if (stacked.empty()) {
                rows_[deg] = to_dense(SparseMatrix::identity(m.dim(deg)));
            } else {
                rows_[deg] = row_reduce(kernel_basis(std::move(stacked), m.dim(deg)));
            }
            pivots_[deg] = pivots_of(rows_[deg]);
        }
    }

    const Model& model() const { return *model_; }
    const std::vector<FormOperator>& curvature() const { return curvature_; }

    const QMat& rows(int deg) const {
        static const QMat empty;
        if (deg < 0 || deg > model_->n()) return empty;
        return rows_[deg];
    }
    std::size_t dim(int deg) const { return rows(deg).size(); }
    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> out;
        for (int d = 0; d <= model_->n(); ++d) out.push_back(rows_[d].size());
        return out;
    }
    std::size_t total_dim() const {
        std::size_t t = 0;
        for (auto& r : rows_) t += r.size();
        return t;
    }

    // coordinates of an ambient vector in the T basis; error if outside
    QVec coords(int deg, const QVec& v) const {
        auto c = coords_in(rows(deg), pivots_[deg], v);
        if (!c) fail(errc::verdict, "vector in degree " + std::to_string(deg) + " lies outside the flat subcomplex");
        return *c;
    }
    bool contains(int deg, const QVec& v) const { return coords_in(rows(deg), pivots_[deg], v).has_value(); }

    // The block T_src -> T_dst of an operator that preserves T; exact failure
    // (with the offending degree) otherwise.
    SparseMatrix restrict_block(const FormOperator& op, int src, int dst) const {
        SparseMatrix b = op.block(src, dst);
        SparseMatrix out(dim(dst), dim(src));
        for (std::size_t j = 0; j < dim(src); ++j) {
            QVec img = b.apply(rows(src)[j]);
            auto c = coords_in(rows(dst), pivots_[dst], img);
            if (!c)
                fail(errc::verdict, "operator does not preserve the subcomplex: image of T_" + std::to_string(src) +
                                        " basis vector " + std::to_string(j) + " leaves T_" + std::to_string(dst));
            for (std::size_t i = 0; i < c->size(); ++i)
                if ((*c)[i] != 0) out.set(i, j, (*c)[i]);
        }
        return out;
    }

    bool preserves(const FormOperator& op) const {
        for (auto& [key, b] : op.blocks()) {
            if (key.first < 0 || key.first > model_->n()) continue;
            for (auto& row : rows(key.first))
                if (!in_span(rows(key.second), b.apply(row))) return false;
        }
        return true;
    }

    // curvature * T = 0 by construction; rechecked on demand
    bool annihilated_by_curvature() const {
        for (auto& c : curvature_)
            for (int deg = 0; deg <= model_->n(); ++deg)
                for (auto& row : rows_[deg]) {
                    GradedVec v;
                    v[deg] = row;
                    if (!c.apply(v).empty()) return false;
                }
        return true;
    }

    SparseMatrix restricted_d(int deg) const { return restrict_block(op_d(*model_), deg, deg + 1); }

  private:
    const Model* model_;
    std::vector<FormOperator> curvature_;
    std::vector<QMat> rows_;
    std::vector<std::vector<std::size_t>> pivots_;
};

inline FlatSubcomplex full_subcomplex(const Model& m) { return FlatSubcomplex(m, {}); }

// T = ker(omega ^ .) per degree.
inline FlatSubcomplex omega_subcomplex(const Model& m, const Form& omega) {
    return FlatSubcomplex(m, {op_wedge(omega)});
}

// T = ker grad_x = the forms invariant under the flow of x; closed under d.
inline FlatSubcomplex invariant_subcomplex(const Model& m, const MultiVector& x) {
    FlatSubcomplex t(m, {op_lie(x)});
    for (int deg = 0; deg < m.n(); ++deg) t.restrict_block(op_d(m), deg, deg + 1);
    return t;
}

inline FlatSubcomplex invariant_subcomplex(const Model& m, const std::vector<MultiVector>& xs) {
    std::vector<FormOperator> ops;
    for (auto& x : xs) ops.push_back(op_lie(x));
    FlatSubcomplex t(m, std::move(ops));
    for (int deg = 0; deg < m.n(); ++deg) t.restrict_block(op_d(m), deg, deg + 1);
    return t;
}

// T for a symbolic perturbed differential: simultaneous kernel of every
// parameter-monomial component of (d')^2, with d'(T) included verified for
// the differential itself and each perturbation operator.
inline FlatSubcomplex flat_subcomplex(const ExtSpace& s, const ExtOperator& dp,
                                      const std::vector<PerturbationTerm>& terms) {
    auto comps = dp.square().components();
    std::vector<FormOperator> curvature;
    for (auto& [mono, op] : comps) curvature.push_back(op);
    FlatSubcomplex t(s.model(), std::move(curvature));
    const Model& m = s.model();
    for (int deg = 0; deg < m.n(); ++deg) t.restrict_block(op_d(m), deg, deg + 1);
    for (auto& term : terms)
        for (auto& [key, b] : term.op.blocks()) t.restrict_block(term.op, key.first, key.second);
    return t;
}

// Numeric curvature: T = ker (dp^2) for a concrete odd operator.
inline FlatSubcomplex flat_subcomplex(const FormOperator& dp) {
    if (dp.parity() != 1) fail(errc::schema, "perturbed differential must be odd");
    return FlatSubcomplex(dp.model(), {dp * dp});
}

// ---------------------------------------------------------------------------

// Kernel-profile verification for a contact-type pair (Omega, X) on a model
// of odd dimension 2n+1 with Omega a closed 2n-form annihilated by X:
//   T^0 = 0,  T^1 = { a : (a, X) = 0 },  T^k = full space for k >= 2.
struct OmegaProfile {
    bool t0_trivial = false;
    bool t1_matches_field_kernel = false;
    bool top_degrees_full = false;
    std::vector<std::size_t> dims;
    bool ok() const { return t0_trivial && t1_matches_field_kernel && top_degrees_full; }
};

inline OmegaProfile omega_profile_check(const Model& m, const Form& omega, const MultiVector& reeb) {
    if (m.n() % 2 == 0 || omega.deg != m.n() - 1)
        fail(errc::verdict, "profile check needs a (2n)-form on a (2n+1)-dimensional model");
    if (!apply_d(omega).is_zero()) fail(errc::verdict, "omega is not closed");
    if (!contract(reeb, omega).is_zero()) fail(errc::verdict, "contraction of omega with the field is nonzero");

    FlatSubcomplex t = omega_subcomplex(m, omega);
    OmegaProfile out;
    out.dims = t.dims();
    out.t0_trivial = t.dim(0) == 0;
    QMat ker1 = row_reduce(kernel_basis(op_contract(reeb).block(1, 0)));
    out.t1_matches_field_kernel = (t.rows(1) == ker1);
    out.top_degrees_full = true;
    for (int k = 2; k <= m.n(); ++k) out.top_degrees_full &= (t.dim(k) == m.dim(k));
    return out;
}

// ---------------------------------------------------------------------------

// Homology of the restricted differential: Z-graded at zero parameters,
// Z2-graded once any parameter takes a nonzero numeric value.
struct ExoticHomology {
    bool z2 = false;
    std::vector<Subquotient> groups;  // per degree, or {even, odd}

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> out;
        for (auto& g : groups) out.push_back(g.dim());
        return out;
    }
    std::size_t total() const {
        std::size_t t = 0;
        for (auto& g : groups) t += g.dim();
        return t;
    }
};

inline ExoticHomology exotic_homology(const FlatSubcomplex& t) {
    const Model& m = t.model();
    ExoticHomology out;
    for (int deg = 0; deg <= m.n(); ++deg) {
        SparseMatrix down = deg > 0 ? t.restricted_d(deg - 1) : SparseMatrix(t.dim(0), 0);
        SparseMatrix up = deg < m.n() ? t.restricted_d(deg) : SparseMatrix(0, t.dim(m.n()));
        QMat z = kernel_basis(up);
        QMat b = image_basis(down);
        out.groups.emplace_back(t.dim(deg), std::move(z), std::move(b));
    }
    return out;
}

namespace detail {

// stacked coordinates of one parity class: all T_deg with deg = par (mod 2)
inline std::vector<std::size_t> parity_offsets(const FlatSubcomplex& t, int par, std::size_t& total) {
    std::vector<std::size_t> off(t.model().n() + 1, 0);
    total = 0;
    for (int deg = par; deg <= t.model().n(); deg += 2) {
        off[deg] = total;
        total += t.dim(deg);
    }
    return off;
}

inline SparseMatrix stacked_restriction(const FlatSubcomplex& t, const FormOperator& dp, int src_par) {
    std::size_t src_total = 0, dst_total = 0;
    auto src_off = parity_offsets(t, src_par, src_total);
    auto dst_off = parity_offsets(t, 1 - src_par, dst_total);
    SparseMatrix out(dst_total, src_total);
    const int n = t.model().n();
    for (auto& [key, b] : dp.blocks()) {
        auto [src, dst] = key;
        if (src < 0 || src > n || dst < 0 || dst > n) continue;
        if (src % 2 != src_par) continue;
        SparseMatrix r = t.restrict_block(dp, src, dst);
        for (std::size_t i = 0; i < r.rows(); ++i)
            for (auto& [j, v] : r.row(i)) out.add_at(dst_off[dst] + i, src_off[src] + j, v);
    }
    return out;
}

}  // namespace detail

inline ExoticHomology exotic_homology_z2(const FlatSubcomplex& t, const FormOperator& dp) {
    if (dp.parity() != 1) fail(errc::schema, "perturbed differential must be odd");
    SparseMatrix e = detail::stacked_restriction(t, dp, 0);
    SparseMatrix o = detail::stacked_restriction(t, dp, 1);
    if (!(o * e).is_zero() || !(e * o).is_zero())
        fail(errc::verdict, "restricted differential does not square to zero on the flat subcomplex");
    ExoticHomology out;
    out.z2 = true;
    out.groups.emplace_back(e.cols(), kernel_basis(e), image_basis(o));
    out.groups.emplace_back(o.cols(), kernel_basis(o), image_basis(e));
    return out;
}

// d' at a numeric parameter assignment.  Every parameter must be assigned;
// Grassmann parameters only admit zero.
inline FormOperator numeric_perturbed_d(const Model& m, const Ring& r, const std::vector<PerturbationTerm>& terms,
                                        const std::map<std::string, Rational>& values) {
    for (auto& [name, v] : values)
        if (!r.has_generator(name)) fail(errc::schema, "value assigned to unknown parameter '" + name + "'");
    FormOperator dp = op_d(m);
    for (auto& t : terms) {
        auto it = values.find(t.param);
        if (it == values.end()) fail(errc::schema, "no value assigned to parameter '" + t.param + "'");
        if (it->second == 0) continue;
        if (r.generator_parity(t.param) == 1)
            fail(errc::unsupported, "Grassmann parameter '" + t.param + "' cannot take a nonzero numeric value");
        dp = dp + t.op.scaled(it->second);
    }
    return dp;
}

}  // namespace exhom
