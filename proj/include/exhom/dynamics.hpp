#pragma once
// Rotation cycles of linear torus flows and the special pairing differential
// d2 = contraction with X, mapping H^1 of the invariant complex into H^0.
// The trajectory-average limit defining the cycle has a closed form only for
// constant fields on torus models, so everything else is rejected as
// unsupported rather than approximated.

#include "exhom/subcomplex.hpp"

namespace exhom {

// Asymptotic homology class of the flow, in the basis [dx^1], ..., [dx^n].
struct RotationCycle {
    QVec coords;

    bool is_zero() const {
        for (const auto& c : coords)
            if (c != 0) return false;
        return true;
    }
};

inline RotationCycle rotation_cycle(const Model& m, const MultiVector& x) {
    if (!x.is_zero() && x.model != &m) fail(errc::schema, "field belongs to a different model");
    if (!m.is_torus()) fail(errc::unsupported, "rotation cycle is only computable on torus models");
    if (x.order != 1) fail(errc::unsupported, "rotation cycle needs an order-one field");
    RotationCycle a{QVec((std::size_t)m.n(), Rational(0))};
    for (const auto& [mono, c] : x.terms) {
        if (mono.freq != m.zero_freq())
            fail(errc::unsupported, "non-constant field: the trajectory limit has no closed form");
        a.coords[(std::size_t)(mono.idx.at(0) - 1)] += c;
    }
    return a;
}

// The class of iota_X u in H^0 of the invariant complex.  For a closed
// invariant one-form the contraction is a closed zero-form, hence a constant,
// and the class is that scalar: the pairing of [u] with the rotation cycle.
inline Rational d2_evaluation(const Model& m, const MultiVector& x, const Form& u) {
    if (!x.is_zero() && x.model != &m) fail(errc::schema, "field belongs to a different model");
    if (!u.is_zero() && u.model != &m) fail(errc::schema, "form belongs to a different model");
    if (x.order != 1) fail(errc::schema, "the pairing contracts with an order-one field");
    if (u.deg != 1) fail(errc::schema, "the pairing takes a one-form");
    if (!apply_d(u).is_zero()) fail(errc::verdict, "the form is not closed");
    if (!lie_derivative(x, u).is_zero()) fail(errc::verdict, "the form is not invariant under the field");
    Form w = contract(x, u);
    Rational out(0);
    for (const auto& [mono, c] : w.terms) {
        if (mono.freq != m.zero_freq()) fail(errc::verdict, "pairing did not land on the constants");
        out += c;
    }
    return out;
}

struct Lemma6Report {
    QVec cycle;            // rotation cycle coordinates
    QVec pairings;         // d2 evaluated on the chosen basis of H^1_inv
    std::size_t d2_rank;   // rank of d2 : H^1_inv -> H^0_inv (0 or 1)
    bool zero_cycle;       // a = 0, i.e. the vanishing criterion applies
};

// When the rotation cycle vanishes, the pairing differential must vanish on
// all of H^1_inv; a nonzero value there would contradict the theory, so it is
// reported as a verdict failure.  For a nonzero cycle the rank is informative.
inline Lemma6Report lemma6_check(const Model& m, const MultiVector& x) {
    RotationCycle a = rotation_cycle(m, x);
    FlatSubcomplex t = invariant_subcomplex(m, x);
    SparseMatrix d1 = m.n() > 1 ? t.restricted_d(1) : SparseMatrix(0, t.dim(1));
    Subquotient h1(t.dim(1), kernel_basis(d1), image_basis(t.restricted_d(0)));

    Lemma6Report rep{a.coords, {}, 0, a.is_zero()};
    const auto& amb = m.basis(1);
    for (const auto& r : h1.reps()) {
        Form u = zero_form(m, 1);
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (r[i] == 0) continue;
            const QVec& row = t.rows(1)[i];
            for (std::size_t c = 0; c < row.size(); ++c)
                if (row[c] != 0) u = add(u, basis_form(m, amb[c], r[i] * row[c]));
        }
        rep.pairings.push_back(d2_evaluation(m, x, u));
        if (rep.pairings.back() != 0) rep.d2_rank = 1;
    }
    if (rep.zero_cycle && rep.d2_rank != 0)
        fail(errc::verdict, "zero rotation cycle with a nonzero pairing differential");
    return rep;
}

}  // namespace exhom
