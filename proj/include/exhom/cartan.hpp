#pragma once
// Cartan model for commuting torus actions: d' = d + sum_i a_i iota_i acting
// on invariant forms with coefficients in Q[a_1..a_m], deg a_i = 2, truncated
// at polynomial degree D.  Total degree = form degree + twice the polynomial
// degree.  Truncation cannot disturb cycles or boundaries in total degree
// <= 2D-2, so homology is only reported on that range.

#include <algorithm>
#include <array>
#include <string>

#include "exhom/spectral.hpp"

namespace exhom {

namespace detail {

// exponent vectors in m variables summing to exactly p, first entry largest
inline void monomials_of(int m, int p, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (m == 0) {
        if (p == 0) out.push_back(cur);
        return;
    }
    if ((int)cur.size() == m - 1) {
        cur.push_back(p);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int e = p; e >= 0; --e) {
        cur.push_back(e);
        monomials_of(m, p - e, cur, out);
        cur.pop_back();
    }
}

inline void place_block(SparseMatrix& dst, const SparseMatrix& src, std::size_t r0, std::size_t c0) {
    for (std::size_t r = 0; r < src.rows(); ++r)
        for (const auto& [c, v] : src.row(r)) dst.add_at(r0 + r, c0 + c, v);
}

}  // namespace detail

struct CartanComplex {
    const Model* model;
    std::vector<MultiVector> fields;
    int cutoff;                        // polynomial degree bound D
    FlatSubcomplex inv;                // simultaneous invariant subcomplex
    std::vector<std::size_t> dims;     // per total degree 0 .. n + 2D
    std::vector<SparseMatrix> blocks;  // d' : total degree t -> t + 1
};

inline CartanComplex build_cartan(const Model& m, const std::vector<MultiVector>& fields, int cutoff) {
    if (cutoff < 2) fail(errc::schema, "polynomial cutoff must be at least 2");
    std::vector<MultiVector> fs = fields;
    for (auto& x : fs) {
        if (!x.is_zero() && x.model != &m) fail(errc::schema, "field belongs to a different model");
        if (x.order != 1) fail(errc::schema, "fields must be order one");
        if (x.is_zero()) x = MultiVector{&m, 1, {}};
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
        FormOperator li = op_lie(fs[i]);
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            FormOperator lj = op_lie(fs[j]);
            if (!(li * lj + (lj * li).scaled(-1)).is_zero())
                fail(errc::verdict, "fields " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                        " do not commute");
        }
    }

    CartanComplex c{&m, fs, cutoff, invariant_subcomplex(m, fs), {}, {}};
    int n = m.n();
    int mf = (int)fs.size();
    int tmax = n + 2 * cutoff;

    // restricted operator blocks on the invariant complex
    std::vector<SparseMatrix> dblk(n + 1);
    for (int f = 0; f <= n; ++f)
        dblk[f] = f < n ? c.inv.restricted_d(f) : SparseMatrix(0, c.inv.dim(f));
    std::vector<std::vector<SparseMatrix>> cblk(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        FormOperator ci = op_contract(fs[i]);
        cblk[i].resize(n + 1);
        for (int f = 0; f <= n; ++f)
            cblk[i][f] = f > 0 ? c.inv.restrict_block(ci, f, f - 1) : SparseMatrix(0, c.inv.dim(0));
    }

    // polynomial monomial tables per degree
    std::vector<std::vector<std::vector<int>>> monos(cutoff + 1);
    std::vector<std::map<std::vector<int>, std::size_t>> mono_pos(cutoff + 1);
    for (int p = 0; p <= cutoff; ++p) {
        std::vector<int> cur;
        detail::monomials_of(mf, p, cur, monos[p]);
        for (std::size_t a = 0; a < monos[p].size(); ++a) mono_pos[p][monos[p][a]] = a;
    }

    // slots of a total degree: (form degree, poly degree) pairs, p increasing
    auto slots_of = [&](int t) {
        std::vector<std::array<int, 2>> out;
        for (int p = 0; p <= cutoff; ++p) {
            int f = t - 2 * p;
            if (f >= 0 && f <= n) out.push_back({f, p});
        }
        return out;
    };
    auto offset_of = [&](int t, int f, int p) {
        std::size_t off = 0;
        for (auto [g, q] : slots_of(t)) {
            if (g == f && q == p) return off;
            off += c.inv.dim(g) * monos[q].size();
        }
        fail(errc::schema, "internal slot lookup out of range");
        return off;
    };

    c.dims.assign(tmax + 1, 0);
    for (int t = 0; t <= tmax; ++t)
        for (auto [f, p] : slots_of(t)) c.dims[t] += c.inv.dim(f) * monos[p].size();

    c.blocks.assign(tmax + 1, SparseMatrix());
    for (int t = 0; t <= tmax; ++t) {
        SparseMatrix blk(t + 1 <= tmax ? c.dims[t + 1] : 0, c.dims[t]);
        std::size_t col0 = 0;
        for (auto [f, p] : slots_of(t)) {
            std::size_t df = c.inv.dim(f);
            for (std::size_t a = 0; a < monos[p].size(); ++a) {
                std::size_t cb = col0 + a * df;
                if (f + 1 <= n && dblk[f].rows() > 0)
                    detail::place_block(blk, dblk[f], offset_of(t + 1, f + 1, p) + a * c.inv.dim(f + 1), cb);
                if (p + 1 <= cutoff && f >= 1) {
                    for (int i = 0; i < mf; ++i) {
                        if (cblk[i][f].is_zero()) continue;
                        std::vector<int> alpha = monos[p][a];
                        ++alpha[i];
                        std::size_t a2 = mono_pos[p + 1].at(alpha);
                        detail::place_block(blk, cblk[i][f],
                                            offset_of(t + 1, f - 1, p + 1) + a2 * c.inv.dim(f - 1), cb);
                    }
                }
            }
            col0 += df * monos[p].size();
        }
        c.blocks[t] = std::move(blk);
    }

    for (int t = 0; t + 1 <= tmax; ++t)
        if (!(c.blocks[t + 1] * c.blocks[t]).is_zero())
            fail(errc::verdict, "the Cartan operator does not square to zero");
    return c;
}

struct EquivariantReport {
    int cutoff;
    int safe_through;               // truncation cannot bite at or below this degree
    std::vector<std::size_t> dims;  // per total degree 0 .. safe_through
};

inline EquivariantReport equivariant_cohomology(const CartanComplex& c) {
    EquivariantReport rep{c.cutoff, 2 * c.cutoff - 2, {}};
    for (int t = 0; t <= rep.safe_through; ++t) {
        std::size_t cycles = c.dims[t] - rank_of(c.blocks[t]);
        std::size_t bounds = t > 0 ? rank_of(c.blocks[t - 1]) : 0;
        rep.dims.push_back(cycles - bounds);
    }
    return rep;
}

// The a-adic filtration collapses to a perturbation filtration once every a_i
// is set to the same parameter: the pages of d + eps * sum_i iota_i on the
// invariant complex come straight from the spectral machinery.
inline SpectralReport cartan_spectral(const CartanComplex& c, int max_page = 0) {
    FormOperator p = op_zero(*c.model, 1);
    for (const auto& x : c.fields) p = p + op_contract(x);
    return spectral_sequence(c.inv, p, max_page);
}

}  // namespace exhom
