#pragma once

// Degree-block operators on a model's form space, the perturbed differential
// d' = d + sum(param_i * term_i) on R-valued forms, and its curvature (d')^2.
//
// R-valued forms are the graded tensor algebra Lambda tensor R with product
// (f(x)r)(g(x)s) = (-1)^{|r||g|} (f^g)(x)(rs).  A perturbation term with ring
// parameter p and form-level operator A acts by
//     phi(x)rho  |->  (-1)^{|p||phi|} (A phi)(x)(p rho),
// which is left multiplication when A is a wedge.  Under the parity rule
// |p| + |A| = 1 every summand of d' is odd and squares combine exactly as in
// the anticommutator calculus.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "form.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "ring.hpp"

namespace exhom {

// Graded vector: one coordinate block per form degree.
using GradedVec = std::map<int, QVec>;

inline QVec form_coords(const Form& f) {
    const Model& m = *f.model;
    QVec v(m.dim(f.deg), Rational(0));
    for (auto& [mono, c] : f.terms) v[m.index_of(mono)] = c;
    return v;
}

inline Form form_from_coords(const Model& m, int deg, const QVec& v) {
    Form f = zero_form(m, deg);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) f.add_term(m.basis(deg)[i], v[i]);
    return f;
}

class FormOperator {
  public:
    FormOperator() = default;
    FormOperator(const Model& m, int parity) : model_(&m), parity_(parity) {}

    const Model& model() const { return *model_; }
    int parity() const { return parity_; }

    const std::map<std::pair<int, int>, SparseMatrix>& blocks() const { return blocks_; }

    SparseMatrix block(int src, int dst) const {
        auto it = blocks_.find({src, dst});
        if (it != blocks_.end()) return it->second;
        return SparseMatrix(model_->dim(dst), model_->dim(src));
    }

    void set_block(int src, int dst, SparseMatrix b) {
        if ((dst - src - parity_) % 2 != 0) fail(errc::schema, "operator block violates declared parity");
        if (b.is_zero())
            blocks_.erase({src, dst});
        else
            blocks_[{src, dst}] = std::move(b);
    }

    bool is_zero() const { return blocks_.empty(); }

    // Uniform degree shift when every block has the same one.
    std::optional<int> uniform_shift() const {
        std::optional<int> s;
        for (auto& [key, b] : blocks_) {
            int d = key.second - key.first;
            if (!s)
                s = d;
            else if (*s != d)
                return std::nullopt;
        }
        return s;
    }

    GradedVec apply(const GradedVec& v) const {
        GradedVec out;
        for (auto& [key, b] : blocks_) {
            auto it = v.find(key.first);
            if (it == v.end()) continue;
            QVec w = b.apply(it->second);
            auto& slot = out[key.second];
            if (slot.empty()) slot.assign(w.size(), Rational(0));
            for (std::size_t i = 0; i < w.size(); ++i) slot[i] += w[i];
        }
        for (auto it = out.begin(); it != out.end();) {
            bool zero = true;
            for (auto& x : it->second) zero &= (x == 0);
            it = zero ? out.erase(it) : std::next(it);
        }
        return out;
    }

    Form apply(const Form& f) const {
        GradedVec v;
        if (!f.is_zero()) v[f.deg] = form_coords(f);
        GradedVec w = apply(v);
        if (w.empty()) {
            auto s = uniform_shift();
            return zero_form(*model_, f.deg + (s ? *s : 0));
        }
        if (w.size() > 1) fail(errc::unsupported, "operator image is not degree-homogeneous");
        return form_from_coords(*model_, w.begin()->first, w.begin()->second);
    }

    FormOperator operator+(const FormOperator& o) const {
        if (parity_ != o.parity_) fail(errc::unsupported, "adding operators of different parity");
        FormOperator out = *this;
        for (auto& [key, b] : o.blocks_) {
            SparseMatrix sum = out.block(key.first, key.second) + b;
            out.set_block(key.first, key.second, std::move(sum));
        }
        return out;
    }

    FormOperator scaled(const Rational& s) const {
        FormOperator out(*model_, parity_);
        for (auto& [key, b] : blocks_) out.set_block(key.first, key.second, b.scaled(s));
        return out;
    }

    FormOperator operator*(const FormOperator& o) const {  // composition: this after o
        FormOperator out(*model_, (parity_ + o.parity_) % 2);
        for (auto& [okey, ob] : o.blocks_) {
            for (auto& [key, b] : blocks_) {
                if (key.first != okey.second) continue;
                SparseMatrix sum = out.block(okey.first, key.second) + b * ob;
                out.set_block(okey.first, key.second, std::move(sum));
            }
        }
        return out;
    }

    bool operator==(const FormOperator& o) const { return parity_ == o.parity_ && blocks_ == o.blocks_; }

  private:
    const Model* model_ = nullptr;
    int parity_ = 0;
    std::map<std::pair<int, int>, SparseMatrix> blocks_;
};

inline FormOperator anticommutator(const FormOperator& p, const FormOperator& q) { return p * q + q * p; }

inline FormOperator op_zero(const Model& m, int parity = 0) { return FormOperator(m, parity); }

inline FormOperator op_identity(const Model& m) {
    FormOperator out(m, 0);
    for (int d = 0; d <= m.n(); ++d)
        if (m.dim(d)) out.set_block(d, d, SparseMatrix::identity(m.dim(d)));
    return out;
}

inline FormOperator op_d(const Model& m) {
    FormOperator out(m, 1);
    for (int d = 0; d < m.n(); ++d) out.set_block(d, d + 1, m.d_block(d));
    return out;
}

inline FormOperator op_wedge(const Form& w) {
    const Model& m = *w.model;
    FormOperator out(m, w.deg % 2);
    for (int d = 0; d + w.deg <= m.n() && d <= m.n(); ++d) {
        SparseMatrix b(m.dim(d + w.deg), m.dim(d));
        for (std::size_t c = 0; c < m.dim(d); ++c) {
            Form img = wedge(w, basis_form(m, m.basis(d)[c]));
            for (auto& [mono, coef] : img.terms) b.add_at(m.index_of(mono), c, coef);
        }
        out.set_block(d, d + w.deg, std::move(b));
    }
    return out;
}

inline FormOperator op_contract(const MultiVector& x) {
    const Model& m = *x.model;
    FormOperator out(m, x.order % 2);
    for (int d = x.order; d <= m.n(); ++d) {
        SparseMatrix b(m.dim(d - x.order), m.dim(d));
        for (std::size_t c = 0; c < m.dim(d); ++c) {
            Form img = contract(x, basis_form(m, m.basis(d)[c]));
            for (auto& [mono, coef] : img.terms) b.add_at(m.index_of(mono), c, coef);
        }
        out.set_block(d, d - x.order, std::move(b));
    }
    return out;
}

inline FormOperator op_lie(const MultiVector& x) {
    if (x.order != 1) fail(errc::unsupported, "lie operator requires an order-1 field");
    return anticommutator(op_d(*x.model), op_contract(x));
}

// Creation a^i = dx^i (or e^i) wedge; annihilation a^+_j = iota_{d_j}.
inline FormOperator op_creation(const Model& m, int i) {
    return op_wedge(basis_form(m, FormMonomial{m.zero_freq(), {i}}));
}
inline FormOperator op_annihilation(const Model& m, int j) {
    MultiVector x{&m, 1, {}};
    x.terms[FormMonomial{m.zero_freq(), {j}}] = 1;
    return op_contract(x);
}

// ---------------------------------------------------------------------------
// Extended space: (form basis) x (truncated ring monomials), graded by form
// degree.  Carries d' and its curvature with symbolic parameters.

struct PerturbationTerm {
    std::string param;   // ring generator name
    FormOperator op;     // wedge or contraction block operator
    int op_parity = 1;   // parity of op on forms
};

class ExtOperator;

class ExtSpace {
  public:
    ExtSpace(const Model& m, const Ring& r) : model_(&m), ring_(&r) {}

    const Model& model() const { return *model_; }
    const Ring& ring() const { return *ring_; }
    std::size_t dim(int deg) const { return model_->dim(deg) * ring_->mono_count(); }
    std::size_t index(std::size_t form_idx, std::size_t ring_idx) const {
        return form_idx * ring_->mono_count() + ring_idx;
    }
    std::pair<std::size_t, std::size_t> split(std::size_t i) const {
        return {i / ring_->mono_count(), i % ring_->mono_count()};
    }

  private:
    const Model* model_;
    const Ring* ring_;
};

class ExtOperator {
  public:
    ExtOperator() = default;
    explicit ExtOperator(const ExtSpace& s, int parity) : space_(&s), parity_(parity) {}

    const ExtSpace& space() const { return *space_; }
    int parity() const { return parity_; }
    const std::map<std::pair<int, int>, SparseMatrix>& blocks() const { return blocks_; }

    SparseMatrix block(int src, int dst) const {
        auto it = blocks_.find({src, dst});
        if (it != blocks_.end()) return it->second;
        return SparseMatrix(space_->dim(dst), space_->dim(src));
    }
    void set_block(int src, int dst, SparseMatrix b) {
        if (b.is_zero())
            blocks_.erase({src, dst});
        else
            blocks_[{src, dst}] = std::move(b);
    }
    bool is_zero() const { return blocks_.empty(); }

    ExtOperator operator+(const ExtOperator& o) const {
        ExtOperator out = *this;
        for (auto& [key, b] : o.blocks_) {
            SparseMatrix sum = out.block(key.first, key.second) + b;
            out.set_block(key.first, key.second, std::move(sum));
        }
        return out;
    }
    ExtOperator operator*(const ExtOperator& o) const {
        ExtOperator out(*space_, (parity_ + o.parity_) % 2);
        for (auto& [okey, ob] : o.blocks_)
            for (auto& [key, b] : blocks_) {
                if (key.first != okey.second) continue;
                SparseMatrix sum = out.block(okey.first, key.second) + b * ob;
                out.set_block(okey.first, key.second, std::move(sum));
            }
        return out;
    }
    bool operator==(const ExtOperator& o) const { return blocks_ == o.blocks_; }

    ExtOperator square() const { return (*this) * (*this); }

    // Parameter-monomial components as form-level operators: the coefficient
    // of each ring monomial in the action on (phi tensor 1).
    std::map<RingMono, FormOperator> components() const {
        std::map<RingMono, FormOperator> out;
        const Model& m = space_->model();
        const Ring& r = space_->ring();
        std::size_t one = r.mono_index(r.one());
        for (auto& [key, b] : blocks_) {
            auto [src, dst] = key;
            for (std::size_t row = 0; row < b.rows(); ++row)
                for (auto& [col, v] : b.row(row)) {
                    auto [fi, ri] = space_->split(col);
                    if (ri != one) continue;
                    auto [fj, rj] = space_->split(row);
                    auto it = out.find(r.mono(rj));
                    if (it == out.end())
                        it = out.emplace(r.mono(rj), FormOperator(m, (dst - src) % 2 == 0 ? 0 : 1)).first;
                    SparseMatrix blk = it->second.block(src, dst);
                    blk.add_at(fj, fi, v);
                    it->second.set_block(src, dst, std::move(blk));
                }
        }
        return out;
    }

  private:
    const ExtSpace* space_ = nullptr;
    int parity_ = 1;
    std::map<std::pair<int, int>, SparseMatrix> blocks_;
};

// Lift a form-level operator with ring-parameter p to the extended space:
// phi rho |-> (-1)^{|p| deg(phi)} (A phi) (p rho).
inline ExtOperator ext_term(const ExtSpace& s, const RingMono& p, const FormOperator& a) {
    const Ring& r = s.ring();
    ExtOperator out(s, (p.parity() + a.parity()) % 2);
    for (auto& [key, b] : a.blocks()) {
        auto [src, dst] = key;
        SparseMatrix eb(s.dim(dst), s.dim(src));
        int psign = (p.parity() && (src % 2)) ? -1 : 1;
        for (std::size_t row = 0; row < b.rows(); ++row)
            for (auto& [col, v] : b.row(row))
                for (std::size_t ri = 0; ri < r.mono_count(); ++ri) {
                    RingMono pm;
                    int rsign;
                    if (!r.mul_mono(p, r.mono(ri), pm, rsign)) continue;
                    eb.add_at(s.index(row, r.mono_index(pm)), s.index(col, ri), v * rsign * psign);
                }
        out.set_block(src, dst, std::move(eb));
    }
    return out;
}

// d' = d + sum(param_i term_i) on the extended space.  Parity rule enforced:
// parity(param) + parity(term) must be odd for every summand.
inline ExtOperator build_perturbed_d(const ExtSpace& s, const std::vector<PerturbationTerm>& terms) {
    const Ring& r = s.ring();
    ExtOperator out = ext_term(s, r.one(), op_d(s.model()));
    for (auto& t : terms) {
        int pp = r.generator_parity(t.param);
        if ((pp + t.op_parity) % 2 != 1)
            fail(errc::schema, "parity rule violated for term with parameter '" + t.param +
                                   "': parity(param) + parity(operator) must be odd");
        out = out + ext_term(s, r.generator(t.param), t.op);
    }
    return out;
}

inline ExtOperator scale_ext(const ExtOperator& a, const Rational& c) {
    ExtOperator out(a.space(), a.parity());
    for (auto& [key, b] : a.blocks()) out.set_block(key.first, key.second, b.scaled(c));
    return out;
}

// The expected curvature of d' = d + sum_i p_i A_i, built independently of
// build_perturbed_d from the super-Leibniz calculus.  With the lift
// ext(p, A): phi rho -> (-1)^{|p||phi|}(A phi)(p rho) one computes
//   {ext(p_a, A_a), ext(p_b, A_b)}
//     = ext(p_a p_b, (-1)^{|p_a|+|p_a||p_b|} A_a A_b + (-1)^{|p_b|} A_b A_a),
//   ext(p, A)^2 = ext(p^2, A^2),   {ext(1, d), ext(p, A)} = ext(p, dA + (-1)^{|p|} A d),
// so for admissible terms (|p|+|A| odd) the linear component is the graded
// commutator [d, A], which for even parameters is the anticommutator {d, A}.
inline ExtOperator expected_curvature(const ExtSpace& s, const std::vector<PerturbationTerm>& terms) {
    const Ring& r = s.ring();
    ExtOperator out(s, 0);
    FormOperator d = op_d(s.model());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const RingMono pi = r.generator(terms[i].param);
        const int api = pi.parity();
        FormOperator lin = d * terms[i].op + (terms[i].op * d).scaled(api ? Rational(-1) : Rational(1));
        if (!lin.is_zero()) out = out + ext_term(s, pi, lin);
        RingMono sq;
        int ssq;
        if (r.mul_mono(pi, pi, sq, ssq)) {
            FormOperator a2 = terms[i].op * terms[i].op;
            if (!a2.is_zero()) out = out + scale_ext(ext_term(s, sq, a2), Rational(ssq));
        }
        for (std::size_t j = 0; j < i; ++j) {
            const RingMono pj = r.generator(terms[j].param);
            const int apj = pj.parity();
            RingMono m;
            int sm;
            if (!r.mul_mono(pj, pi, m, sm)) continue;  // p_j p_i = sm * m
            FormOperator cross = (terms[j].op * terms[i].op).scaled(((apj + apj * api) % 2) ? Rational(-1) : Rational(1)) +
                                 (terms[i].op * terms[j].op).scaled(api ? Rational(-1) : Rational(1));
            if (!cross.is_zero()) out = out + scale_ext(ext_term(s, m, cross), Rational(sm));
        }
    }
    return out;
}

}  // namespace exhom
