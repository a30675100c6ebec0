#pragma once

// Forms and multivectors in the fermionic calculus: wedge (creation words),
// contraction (annihilation words), d, and the Cartan-formula Lie derivative.
// All window escapes are hard errors naming the frequency.

#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "rational.hpp"

namespace exhom {

// Homogeneous form: degree + sparse monomial terms.
struct Form {
    const Model* model = nullptr;
    int deg = 0;
    std::map<FormMonomial, Rational> terms;

    bool is_zero() const { return terms.empty(); }
    void add_term(const FormMonomial& m, const Rational& c) {
        if (c == 0) return;
        auto& slot = terms[m];
        slot += c;
        if (slot == 0) terms.erase(m);
    }
};

// Multivector of order k: skew tensor with canonically increasing indices.
struct MultiVector {
    const Model* model = nullptr;
    int order = 1;
    std::map<FormMonomial, Rational> terms;  // idx = upper indices, length = order

    bool is_zero() const { return terms.empty(); }
    bool constant() const {
        for (auto& [m, c] : terms)
            for (int v : m.freq)
                if (v != 0) return false;
        return true;
    }
};

inline Form zero_form(const Model& m, int deg) { return Form{&m, deg, {}}; }

inline Form basis_form(const Model& m, const FormMonomial& mono, const Rational& c = Rational(1)) {
    Form f{&m, mono.degree(), {}};
    f.add_term(mono, c);
    return f;
}

namespace detail {

inline void check_window(const Model& m, const std::vector<int>& freq) {
    if (!m.in_window(freq)) {
        std::string s = "(";
        for (std::size_t i = 0; i < freq.size(); ++i) s += (i ? "," : "") + std::to_string(freq[i]);
        fail(errc::window, "frequency " + s + ") escapes the window");
    }
}

// Single annihilation a^+_j on a monomial: position sign (-1)^(t-1).
inline bool contract_index(int j, const FormMonomial& m, int& sign, FormMonomial& out) {
    for (std::size_t t = 0; t < m.idx.size(); ++t)
        if (m.idx[t] == j) {
            sign = (t % 2 == 0) ? 1 : -1;
            out = m;
            out.idx.erase(out.idx.begin() + t);
            return true;
        }
    return false;
}

}  // namespace detail

inline Form wedge(const Form& a, const Form& b) {
    if (a.model != b.model) fail(errc::schema, "wedge across different models");
    const Model& mod = *a.model;
    Form out = zero_form(mod, a.deg + b.deg);
    for (auto& [ma, ca] : a.terms)
        for (auto& [mb, cb] : b.terms) {
            std::vector<int> seq = ma.idx;
            seq.insert(seq.end(), mb.idx.begin(), mb.idx.end());
            int s = sort_indices(seq);
            if (s == 0) continue;
            std::vector<int> freq(mod.n());
            for (int i = 0; i < mod.n(); ++i) freq[i] = ma.freq[i] + mb.freq[i];
            detail::check_window(mod, freq);
            out.add_term(FormMonomial{freq, seq}, s * ca * cb);
        }
    return out;
}

inline Form apply_d(const Form& f) {
    const Model& mod = *f.model;
    Form out = zero_form(mod, f.deg + 1);
    for (auto& [m, c] : f.terms)
        for (auto& [dc, dm] : mod.d_mono(m)) out.add_term(dm, c * dc);
    return out;
}

// Contraction by an order-k multivector: the annihilation word
// a^+_{i_1}...a^+_{i_k} applied rightmost-first, per index set.
inline Form contract(const MultiVector& x, const Form& f) {
    if (x.model != f.model) fail(errc::schema, "contraction across different models");
    const Model& mod = *x.model;
    Form out = zero_form(mod, f.deg - x.order);
    if (f.deg < x.order) return out;
    for (auto& [xm, xc] : x.terms)
        for (auto& [fm, fc] : f.terms) {
            FormMonomial cur = fm;
            int total_sign = 1;
            bool dead = false;
            for (auto it = xm.idx.rbegin(); it != xm.idx.rend(); ++it) {
                int s;
                FormMonomial next;
                if (!detail::contract_index(*it, cur, s, next)) {
                    dead = true;
                    break;
                }
                total_sign *= s;
                cur = next;
            }
            if (dead) continue;
            std::vector<int> freq(mod.n());
            for (int i = 0; i < mod.n(); ++i) freq[i] = xm.freq[i] + cur.freq[i];
            detail::check_window(mod, freq);
            cur.freq = freq;
            out.add_term(cur, total_sign * xc * fc);
        }
    return out;
}

// Cartan formula as the definition.
inline Form lie_derivative(const MultiVector& x, const Form& f) {
    if (x.order != 1) fail(errc::unsupported, "lie_derivative requires an order-1 field");
    Form a = apply_d(contract(x, f));
    Form b = contract(x, apply_d(f));
    Form out = zero_form(*f.model, f.deg);
    for (auto& [m, c] : a.terms) out.add_term(m, c);
    for (auto& [m, c] : b.terms) out.add_term(m, c);
    return out;
}

inline Form scale(const Form& f, const Rational& s) {
    Form out = zero_form(*f.model, f.deg);
    for (auto& [m, c] : f.terms) out.add_term(m, s * c);
    return out;
}

inline Form add(const Form& a, const Form& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.deg != b.deg) fail(errc::schema, "adding forms of different degrees");
    Form out = a;
    for (auto& [m, c] : b.terms) out.add_term(m, c);
    return out;
}

}  // namespace exhom
