#pragma once

// Z2-graded supercommutative coefficient ring: Grassmann generators (odd,
// exponent <= 1, anticommuting) tensor a polynomial ring (even, central)
// truncated at total even degree `cutoff`.  The truncation ideal is generated
// by high even monomials, so ring identities descend exactly to the quotient.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace exhom {

struct RingMono {
    std::vector<int> odd;   // 0/1 per odd generator
    std::vector<int> even;  // exponent per even generator

    int even_degree() const {
        int t = 0;
        for (int e : even) t += e;
        return t;
    }
    int parity() const {
        int t = 0;
        for (int o : odd) t += o;
        return t & 1;
    }
    bool is_one() const {
        for (int o : odd)
            if (o) return false;
        for (int e : even)
            if (e) return false;
        return true;
    }
    bool operator<(const RingMono& o) const {
        return std::tie(odd, even) < std::tie(o.odd, o.even);
    }
    bool operator==(const RingMono& o) const { return odd == o.odd && even == o.even; }
};

using RingElem = std::map<RingMono, Rational>;

class Ring {
  public:
    Ring() = default;
    Ring(std::vector<std::string> odd_names, std::vector<std::string> even_names, int cutoff)
        : odd_names_(std::move(odd_names)), even_names_(std::move(even_names)), cutoff_(cutoff) {
        if (cutoff_ < 0) fail(errc::schema, "ring cutoff must be nonnegative");
        enumerate();
    }

    int cutoff() const { return cutoff_; }
    std::size_t mono_count() const { return monos_.size(); }
    const RingMono& mono(std::size_t i) const { return monos_[i]; }
    std::size_t mono_index(const RingMono& m) const {
        auto it = index_.find(m);
        if (it == index_.end()) fail(errc::schema, "ring monomial outside the truncated basis");
        return it->second;
    }

    RingMono one() const { return RingMono{std::vector<int>(odd_names_.size(), 0), std::vector<int>(even_names_.size(), 0)}; }

    // Generator lookup by name; parity 0 = even, 1 = odd.
    bool has_generator(const std::string& name) const { return find(name).first >= 0; }
    int generator_parity(const std::string& name) const {
        auto [i, odd] = find(name);
        if (i < 0) fail(errc::schema, "unknown ring generator '" + name + "'");
        return odd ? 1 : 0;
    }
    RingMono generator(const std::string& name) const {
        auto [i, odd] = find(name);
        if (i < 0) fail(errc::schema, "unknown ring generator '" + name + "'");
        RingMono m = one();
        (odd ? m.odd[i] : m.even[i]) = 1;
        return m;
    }

    // Product of monomials with the Koszul sign; returns false when the
    // product dies (odd repeat or even degree beyond the cutoff).
    bool mul_mono(const RingMono& a, const RingMono& b, RingMono& out, int& sign) const {
        out = one();
        sign = 1;
        int pending = 0;  // odd generators of b already passed over a's tail
        for (std::size_t i = 0; i < a.odd.size(); ++i) {
            if (a.odd[i] && b.odd[i]) return false;
            out.odd[i] = a.odd[i] | b.odd[i];
        }
        // sign: count inversions between a's odd support and b's odd support
        for (std::size_t i = 0; i < a.odd.size(); ++i)
            if (a.odd[i])
                for (std::size_t j = 0; j < i; ++j)
                    if (b.odd[j]) pending ^= 1;
        if (pending) sign = -1;
        for (std::size_t i = 0; i < a.even.size(); ++i) out.even[i] = a.even[i] + b.even[i];
        return out.even_degree() <= cutoff_;
    }

    RingElem mul(const RingElem& a, const RingElem& b) const {
        RingElem out;
        for (auto& [ma, ca] : a)
            for (auto& [mb, cb] : b) {
                RingMono m;
                int s;
                if (!mul_mono(ma, mb, m, s)) continue;
                Rational& slot = out[m];
                slot += s * ca * cb;
                if (slot == 0) out.erase(m);
            }
        return out;
    }

    static RingElem add(const RingElem& a, const RingElem& b) {
        RingElem out = a;
        for (auto& [m, c] : b) {
            Rational& slot = out[m];
            slot += c;
            if (slot == 0) out.erase(m);
        }
        return out;
    }

  private:
    std::pair<int, bool> find(const std::string& name) const {
        for (std::size_t i = 0; i < odd_names_.size(); ++i)
            if (odd_names_[i] == name) return {(int)i, true};
        for (std::size_t i = 0; i < even_names_.size(); ++i)
            if (even_names_[i] == name) return {(int)i, false};
        return {-1, false};
    }

    // Deterministic basis order: (even degree, odd support, even exponents).
    void enumerate() {
        std::vector<std::vector<int>> evens;
        std::vector<int> cur(even_names_.size(), 0);
        rec_even(0, 0, cur, evens);
        std::vector<std::vector<int>> odds;
        std::vector<int> oc(odd_names_.size(), 0);
        rec_odd(0, oc, odds);
        for (auto& e : evens)
            for (auto& o : odds) monos_.push_back(RingMono{o, e});
        std::sort(monos_.begin(), monos_.end(), [](const RingMono& x, const RingMono& y) {
            return std::make_tuple(x.even_degree(), x.odd, x.even) < std::make_tuple(y.even_degree(), y.odd, y.even);
        });
        for (std::size_t i = 0; i < monos_.size(); ++i) index_[monos_[i]] = i;
    }
    void rec_even(std::size_t i, int sum, std::vector<int>& cur, std::vector<std::vector<int>>& out) const {
        if (i == cur.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v + sum <= cutoff_; ++v) {
            cur[i] = v;
            rec_even(i + 1, sum + v, cur, out);
        }
        cur[i] = 0;
    }
    void rec_odd(std::size_t i, std::vector<int>& cur, std::vector<std::vector<int>>& out) const {
        if (i == cur.size()) {
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= 1; ++v) {
            cur[i] = v;
            rec_odd(i + 1, cur, out);
        }
        cur[i] = 0;
    }

    std::vector<std::string> odd_names_, even_names_;
    int cutoff_ = 0;
    std::vector<RingMono> monos_;
    std::map<RingMono, std::size_t> index_;
};

}  // namespace exhom
