#pragma once

// The two model kinds: Chevalley-Eilenberg complexes of Lie algebras
// (constant structure data, d^2 = 0 <=> Jacobi, verified at build) and
// frequency-window torus models (formal characters chi_k, k in a finite
// window containing 0).  Both give finite-dimensional differential graded
// algebras carrying wedge, contraction and d.

#include <array>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace exhom {

struct FormMonomial {
    std::vector<int> freq;  // length n; all zero on lie_algebra models
    std::vector<int> idx;   // strictly increasing, entries in 1..n

    int degree() const { return (int)idx.size(); }
    bool operator<(const FormMonomial& o) const { return std::tie(idx, freq) < std::tie(o.idx, o.freq); }
    bool operator==(const FormMonomial& o) const { return freq == o.freq && idx == o.idx; }
};

// Sort a wedge index sequence into canonical order; 0 when an index repeats.
inline int sort_indices(std::vector<int>& v) {
    int sign = 1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) return 0;
            if (v[i] > v[j]) sign = -sign;
        }
    std::sort(v.begin(), v.end());
    return sign;
}

enum class ModelKind { lie_algebra, torus };

class Model {
  public:
    static Model lie_algebra(int n, const std::map<std::tuple<int, int, int>, Rational>& structure) {
        Model m;
        m.kind_ = ModelKind::lie_algebra;
        m.n_ = n;
        m.structure_ = structure;
        m.validate_common();
        for (auto& [key, c] : structure) {
            auto [i, j, k] = key;
            if (i < 1 || i > n || j < 1 || j > n || k < 1 || k > n)
                fail(errc::schema, "structure constant index out of range");
            if (!(j < k)) fail(errc::schema, "structure constants must be stored with j < k");
            if (c == 0) fail(errc::schema, "zero structure constant stored");
        }
        m.build_basis();
        m.check_d_squared();
        return m;
    }

    static Model torus(int n, const std::vector<std::array<int, 2>>& window) {
        Model m;
        m.kind_ = ModelKind::torus;
        m.n_ = n;
        m.window_ = window;
        m.validate_common();
        if ((int)window.size() != n) fail(errc::schema, "window length must equal the dimension");
        for (auto& [lo, hi] : window) {
            if (lo > hi) fail(errc::schema, "empty window interval");
            if (lo > 0 || hi < 0) fail(errc::model, "torus window must contain frequency 0");
        }
        m.build_basis();
        m.check_d_squared();
        return m;
    }

    ModelKind kind() const { return kind_; }
    bool is_torus() const { return kind_ == ModelKind::torus; }
    int n() const { return n_; }
    const std::map<std::tuple<int, int, int>, Rational>& structure() const { return structure_; }
    const std::vector<std::array<int, 2>>& window() const { return window_; }

    bool in_window(const std::vector<int>& k) const {
        if (!is_torus()) {
            for (int v : k)
                if (v != 0) return false;
            return true;
        }
        for (int i = 0; i < n_; ++i)
            if (k[i] < window_[i][0] || k[i] > window_[i][1]) return false;
        return true;
    }

    std::vector<int> zero_freq() const { return std::vector<int>(n_, 0); }

    const std::vector<FormMonomial>& basis(int deg) const {
        static const std::vector<FormMonomial> empty;
        if (deg < 0 || deg > n_) return empty;
        return basis_[deg];
    }
    std::size_t dim(int deg) const { return basis(deg).size(); }
    std::size_t index_of(const FormMonomial& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) fail(errc::window, "frequency " + freq_str(m.freq) + " escapes the window");
        return it->second;
    }
    bool has(const FormMonomial& m) const { return index_.count(m) != 0; }

    std::string mono_name(const FormMonomial& m) const {
        std::string out;
        if (is_torus()) {
            bool nonzero = false;
            for (int v : m.freq) nonzero |= (v != 0);
            if (nonzero) out += "chi" + freq_str(m.freq);
            for (int i : m.idx) out += "dx" + std::to_string(i);
            if (out.empty()) out = "1";
        } else {
            for (int i : m.idx) out += (out.empty() ? "" : "^") + ("e" + std::to_string(i));
            if (out.empty()) out = "1";
        }
        return out;
    }

    // d of a basis monomial as a sparse list of (coefficient, monomial).
    std::vector<std::pair<Rational, FormMonomial>> d_mono(const FormMonomial& m) const {
        std::vector<std::pair<Rational, FormMonomial>> out;
        if (is_torus()) {
            for (int j = 1; j <= n_; ++j) {
                if (m.freq[j - 1] == 0) continue;
                std::vector<int> seq;
                seq.push_back(j);
                seq.insert(seq.end(), m.idx.begin(), m.idx.end());
                int s = sort_indices(seq);
                if (s == 0) continue;
                out.emplace_back(Rational(m.freq[j - 1]) * s, FormMonomial{m.freq, seq});
            }
        } else {
            for (std::size_t t = 0; t < m.idx.size(); ++t) {
                int target = m.idx[t];
                int pos_sign = (t % 2 == 0) ? 1 : -1;
                for (auto& [key, c] : structure_) {
                    auto [i, j, k] = key;
                    if (i != target) continue;
                    std::vector<int> seq(m.idx.begin(), m.idx.begin() + t);
                    seq.push_back(j);
                    seq.push_back(k);
                    seq.insert(seq.end(), m.idx.begin() + t + 1, m.idx.end());
                    int s = sort_indices(seq);
                    if (s == 0) continue;
                    out.emplace_back(c * pos_sign * s, FormMonomial{m.freq, seq});
                }
            }
        }
        return out;
    }

    const SparseMatrix& d_block(int deg) const { return d_blocks_[deg]; }

    // Per-degree dims of ker d / im d over Q (computed by callers via linalg;
    // stored here would couple layers — see homology.hpp).

  private:
    void validate_common() const {
        if (n_ < 1) fail(errc::schema, "model dimension must be positive");
        if (n_ > 16) fail(errc::unsupported, "model dimension too large for exact enumeration");
    }

    static std::string freq_str(const std::vector<int>& k) {
        std::string out = "(";
        for (std::size_t i = 0; i < k.size(); ++i) out += (i ? "," : "") + std::to_string(k[i]);
        return out + ")";
    }

    void build_basis() {
        std::vector<std::vector<int>> modes;
        if (is_torus()) {
            std::vector<int> cur(n_, 0);
            rec_mode(0, cur, modes);
        } else {
            modes.push_back(std::vector<int>(n_, 0));
        }
        basis_.assign(n_ + 1, {});
        for (int deg = 0; deg <= n_; ++deg) {
            std::vector<int> cur;
            rec_idx(1, deg, cur, modes, basis_[deg]);
            for (auto& m : basis_[deg]) index_[m] = &m - basis_[deg].data();
        }
        d_blocks_.clear();
        for (int deg = 0; deg <= n_; ++deg) {
            SparseMatrix b(dim(deg + 1), dim(deg));
            for (std::size_t c = 0; c < dim(deg); ++c)
                for (auto& [coef, tm] : d_mono(basis_[deg][c])) b.add_at(index_of(tm), c, coef);
            d_blocks_.push_back(std::move(b));
        }
    }
    void rec_mode(int i, std::vector<int>& cur, std::vector<std::vector<int>>& out) const {
        if (i == n_) {
            out.push_back(cur);
            return;
        }
        for (int v = window_[i][0]; v <= window_[i][1]; ++v) {
            cur[i] = v;
            rec_mode(i + 1, cur, out);
        }
    }
    void rec_idx(int start, int left, std::vector<int>& cur, const std::vector<std::vector<int>>& modes,
                 std::vector<FormMonomial>& out) const {
        if (left == 0) {
            for (auto& k : modes) out.push_back(FormMonomial{k, cur});
            return;
        }
        for (int i = start; i <= n_; ++i) {
            cur.push_back(i);
            rec_idx(i + 1, left - 1, cur, modes, out);
            cur.pop_back();
        }
    }

    void check_d_squared() const {
        for (int deg = 0; deg + 2 <= n_; ++deg)
            for (auto& m : basis_[deg]) {
                std::map<FormMonomial, Rational> acc;
                for (auto& [c1, m1] : d_mono(m))
                    for (auto& [c2, m2] : d_mono(m1)) {
                        auto& slot = acc[m2];
                        slot += c1 * c2;
                        if (slot == 0) acc.erase(m2);
                    }
                if (!acc.empty())
                    fail(errc::model, "d^2 != 0 on basis monomial " + mono_name(m) +
                                          " (Jacobi identity fails for the given structure constants)");
            }
    }

    ModelKind kind_ = ModelKind::lie_algebra;
    int n_ = 0;
    std::map<std::tuple<int, int, int>, Rational> structure_;
    std::vector<std::array<int, 2>> window_;
    std::vector<std::vector<FormMonomial>> basis_;
    std::map<FormMonomial, std::size_t> index_;
    std::vector<SparseMatrix> d_blocks_;
};

}  // namespace exhom
