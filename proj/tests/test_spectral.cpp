// Perturbation spectral sequence: frozen page tables, stabilization against
// sampled perturbed homology, chain-route cross-checks, and page invariants.

#include <catch2/catch_amalgamated.hpp>

#include "exhom/spectral.hpp"

using namespace exhom;

namespace {

Model h3() { return Model::lie_algebra(3, {{{3, 1, 2}, Rational(1)}}); }

Model h5() {
    return Model::lie_algebra(5, {{{5, 1, 2}, Rational(1)}, {{5, 3, 4}, Rational(1)}});
}

Form mono_form(const Model& m, std::vector<int> idx, long c = 1) {
    return basis_form(m, FormMonomial{m.zero_freq(), idx}, Rational(c));
}

MultiVector field(const Model& m, std::vector<int> idx, long c = 1) {
    MultiVector x{&m, (int)idx.size(), {}};
    if (c != 0) x.terms[FormMonomial{m.zero_freq(), idx}] = Rational(c);
    return x;
}

using dims_t = std::vector<std::size_t>;

long chi(const dims_t& dims) {
    long out = 0;
    long sign = 1;
    for (auto d : dims) {
        out += sign * (long)d;
        sign = -sign;
    }
    return out;
}

int target_of(const SpectralPage& page, int k, int slots) {
    int t = k + page.shift;
    if (page.z2) return ((t % 2) + 2) % 2;
    return (t >= 0 && t < slots) ? t : -1;
}

// Structural facts every run must satisfy: page numbering, odd differentials,
// Euler characteristic preserved page to page, d o d = 0, and the slot-wise
// recursion dim E_{l+1} = dim ker d_l - dim im d_l.
void page_invariants(const SpectralReport& rep) {
    REQUIRE(!rep.pages.empty());
    CHECK(rep.pages.front().page == 2);
    CHECK(rep.pages.back().page == rep.stable_page);
    CHECK(rep.pages.back().diff_rank() == 0);
    CHECK(rep.einf == rep.pages.back().dims());
    CHECK(rep.einf_total == rep.pages.back().total());
    for (const auto& page : rep.pages) {
        CHECK(page.z2 == rep.z2);
        CHECK(page.shift % 2 != 0);
        CHECK(chi(page.dims()) == chi(rep.t_dims));
        REQUIRE(page.groups.size() == rep.t_dims.size());
        REQUIRE(page.diff.size() == page.groups.size());
        int slots = (int)page.groups.size();
        for (int k = 0; k < slots; ++k) {
            int t1 = target_of(page, k, slots);
            if (t1 < 0) {
                CHECK(page.diff[k].rows() == 0);
                continue;
            }
            CHECK(page.diff[k].rows() == page.groups[t1].dim());
            int t2 = target_of(page, t1, slots);
            if (t2 >= 0) CHECK((page.diff[t1] * page.diff[k]).is_zero());
        }
    }
    for (std::size_t i = 0; i + 1 < rep.pages.size(); ++i) {
        const SpectralPage& a = rep.pages[i];
        const SpectralPage& b = rep.pages[i + 1];
        CHECK(b.page == a.page + 1);
        int slots = (int)a.groups.size();
        for (int k = 0; k < slots; ++k) {
            std::size_t in_rank = 0;
            for (int s = 0; s < slots; ++s)
                if (target_of(a, s, slots) == k) in_rank += rank_of(a.diff[s]);
            CHECK(b.groups[k].dim() == a.groups[k].dim() - rank_of(a.diff[k]) - in_rank);
        }
    }
}

// Drive the chain route over every class of every page; it raises a verdict
// error internally whenever its result disagrees with the page differential.
void massey_crosscheck(const FlatSubcomplex& t, const FormOperator& p, const SpectralReport& rep) {
    for (const auto& page : rep.pages) {
        int slots = (int)page.groups.size();
        for (int k = 0; k < slots; ++k) {
            for (std::size_t j = 0; j < page.groups[k].dim(); ++j) {
                QVec cls(page.groups[k].dim(), Rational(0));
                cls[j] = 1;
                MasseyChain chain;
                QVec val = massey_differential(t, p, rep, page.page, (std::size_t)k, cls, &chain);
                CHECK(chain.terms.size() == (std::size_t)(page.page - 1));
                QVec normative = page.diff[k].apply(cls);
                if (val.empty()) {
                    for (const auto& v : normative) CHECK(v == 0);
                } else {
                    CHECK(val == normative);
                }
            }
        }
    }
}

}  // namespace

TEST_CASE("heisenberg wedge sequence collapses at page three") {
    Model m = h3();
    Form e3 = mono_form(m, {3});
    FlatSubcomplex t = omega_subcomplex(m, apply_d(e3));
    FormOperator p = op_wedge(e3);

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(!rep.z2);
    CHECK(rep.t_dims == dims_t{0, 2, 3, 1});
    REQUIRE(rep.pages.size() == 2);
    CHECK(rep.pages[0].dims() == dims_t{0, 2, 3, 1});
    CHECK(rep.pages[0].dims() == exotic_homology(t).dims());
    CHECK(rep.pages[0].dims()[0] + rep.pages[0].dims()[2] == 3);  // even part
    CHECK(rep.pages[0].dims()[1] + rep.pages[0].dims()[3] == 3);  // odd part
    CHECK(rep.pages[0].diff_rank() == 3);
    CHECK(rep.stable_page == 3);
    CHECK(rep.einf == dims_t{0, 0, 0, 0});
    CHECK(rep.einf_total == 0);
    for (const auto& page : rep.pages) CHECK(page.shift == 1);
    page_invariants(rep);
    massey_crosscheck(t, p, rep);

    ComparisonReport cmp = perturbed_homology_compare(t, p, {Rational(1), Rational(2), Rational(-3)}, &rep);
    REQUIRE(cmp.samples.size() == 3);
    for (const auto& s : cmp.samples) CHECK(s.dims == dims_t{0, 0});
    CHECK(cmp.min_total == 0);
    CHECK(cmp.einf_total == 0);
    CHECK(cmp.match);
}

TEST_CASE("torus wedge run sees the resonant sample but matches on the minimum") {
    Model m = Model::torus(2, {{-1, 1}, {-1, 1}});
    FlatSubcomplex t = full_subcomplex(m);
    REQUIRE(t.total_dim() == 36);
    FormOperator p = op_wedge(mono_form(m, {1}));

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(!rep.z2);
    CHECK(rep.t_dims == dims_t{9, 18, 9});
    REQUIRE(rep.pages.size() == 2);
    CHECK(rep.pages[0].dims() == dims_t{1, 2, 1});
    CHECK(rep.pages[0].diff_rank() == 2);
    CHECK(rep.stable_page == 3);
    CHECK(rep.einf == dims_t{0, 0, 0});
    page_invariants(rep);
    massey_crosscheck(t, p, rep);

    // lambda = 1 shifts the k1 = -1 modes onto zero frequency and the
    // homology jumps; the two generic samples agree with the limit
    ComparisonReport cmp = perturbed_homology_compare(t, p, {Rational(1), Rational(1) / 2, Rational(5)}, &rep);
    CHECK(cmp.samples[0].dims == dims_t{2, 2});
    CHECK(cmp.samples[1].dims == dims_t{0, 0});
    CHECK(cmp.samples[2].dims == dims_t{0, 0});
    CHECK(cmp.min_total == 0);
    CHECK(cmp.match);
}

TEST_CASE("torus contraction run obeys the degree law of the page shifts") {
    Model m = Model::torus(2, {{-1, 1}, {-1, 1}});
    MultiVector x = field(m, {1});
    FlatSubcomplex t = invariant_subcomplex(m, x);
    REQUIRE(t.total_dim() == 12);
    FormOperator p = op_contract(x);

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(!rep.z2);
    CHECK(rep.t_dims == dims_t{3, 6, 3});
    REQUIRE(rep.pages.size() == 2);
    CHECK(rep.pages[0].dims() == dims_t{1, 2, 1});
    CHECK(rep.pages[0].diff_rank() == 2);
    CHECK(rep.stable_page == 3);
    CHECK(rep.einf == dims_t{0, 0, 0});
    for (const auto& page : rep.pages) CHECK(page.shift == -2 * page.page + 3);
    page_invariants(rep);
    massey_crosscheck(t, p, rep);

    ComparisonReport cmp = perturbed_homology_compare(t, p, {Rational(1), Rational(1) / 2, Rational(5)}, &rep);
    for (const auto& s : cmp.samples) CHECK(s.dims == dims_t{0, 0});
    CHECK(cmp.match);
}

TEST_CASE("five-dimensional wedge run wipes twenty dimensions in one page") {
    Model m = h5();
    Form e5 = mono_form(m, {5});
    FlatSubcomplex t = omega_subcomplex(m, apply_d(e5));
    REQUIRE(t.dims() == dims_t{0, 0, 5, 9, 5, 1});
    FormOperator p = op_wedge(e5);

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(rep.pages[0].dims() == dims_t{0, 0, 5, 9, 5, 1});
    CHECK(rep.pages[0].diff_rank() == 10);
    CHECK(rep.stable_page == 3);  // every later differential is forced to vanish
    CHECK(rep.einf == dims_t{0, 0, 0, 0, 0, 0});
    CHECK(rep.einf_total == 0);
    page_invariants(rep);
    massey_crosscheck(t, p, rep);
}

TEST_CASE("mixed-shift perturbation runs in the parity grading") {
    Model m = Model::torus(2, {{-1, 1}, {-1, 1}});
    MultiVector x2 = field(m, {2});
    FlatSubcomplex t = invariant_subcomplex(m, x2);
    REQUIRE(t.total_dim() == 12);
    FormOperator p = op_wedge(mono_form(m, {1})) + op_contract(x2);
    REQUIRE(!p.uniform_shift().has_value());

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(rep.z2);
    CHECK(rep.t_dims == dims_t{6, 6});
    REQUIRE(rep.pages.size() == 2);
    CHECK(rep.pages[0].dims() == dims_t{2, 2});
    CHECK(rep.pages[0].dims() == exotic_homology_z2(t, op_d(m)).dims());
    CHECK(rep.pages[0].diff_rank() == 2);
    CHECK(rank_of(rep.pages[0].diff[0]) == 1);
    CHECK(rank_of(rep.pages[0].diff[1]) == 1);
    CHECK(rep.stable_page == 3);
    CHECK(rep.einf == dims_t{0, 0});
    page_invariants(rep);
    massey_crosscheck(t, p, rep);

    ComparisonReport cmp = perturbed_homology_compare(t, p, {Rational(1) / 2, Rational(2), Rational(3)}, &rep);
    for (const auto& s : cmp.samples) CHECK(s.dims == dims_t{0, 0});
    CHECK(cmp.match);
}

TEST_CASE("zero perturbation stabilizes on the homology page") {
    Model m = h3();
    FlatSubcomplex t = full_subcomplex(m);
    FormOperator p(m, 1);
    REQUIRE(p.is_zero());

    SpectralReport rep = spectral_sequence(t, p);
    CHECK(!rep.z2);
    CHECK(rep.stable_page == 2);
    REQUIRE(rep.pages.size() == 1);
    CHECK(rep.pages[0].diff_rank() == 0);
    CHECK(rep.einf == dims_t{1, 2, 2, 1});
    CHECK(rep.einf == exotic_homology(t).dims());
    page_invariants(rep);
    massey_crosscheck(t, p, rep);

    ComparisonReport cmp = perturbed_homology_compare(t, p, {Rational(1), Rational(2), Rational(7)}, &rep);
    for (const auto& s : cmp.samples) CHECK(s.total() == 6);
    CHECK(cmp.min_total == 6);
    CHECK(cmp.match);
}

TEST_CASE("spectral preconditions and bad inputs are rejected") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const error& e) {
            return e.code;
        }
        return errc::ok;
    };

    Model m = Model::torus(2, {{-1, 1}, {-1, 1}});
    FlatSubcomplex full = full_subcomplex(m);

    // even perturbation
    FormOperator even_p = op_wedge(basis_form(m, FormMonomial{{0, 0}, {1, 2}}));
    CHECK(code_of([&] { spectral_sequence(full, even_p); }) == errc::schema);

    // contraction does not anticommute with d off the invariant complex
    MultiVector x = field(m, {1});
    CHECK(code_of([&] { spectral_sequence(full, op_contract(x)); }) == errc::verdict);

    // operator from a different model
    Model h = h3();
    CHECK(code_of([&] { spectral_sequence(full, op_wedge(mono_form(h, {3}))); }) == errc::schema);

    // contraction by the central field is flat on the whole algebra, yet
    // iota_3 e3 = 1 leaves ker(e1 e3 ^ .), whose degree-zero part is empty
    FlatSubcomplex t13 = omega_subcomplex(h, mono_form(h, {1, 3}));
    REQUIRE(t13.dims() == dims_t{0, 2, 3, 1});
    CHECK(code_of([&] { spectral_sequence(t13, op_contract(field(h, {3}))); }) == errc::verdict);

    // page caps: too small to be a page, or preventing stabilization
    Form e3 = mono_form(h, {3});
    FlatSubcomplex t = omega_subcomplex(h, apply_d(e3));
    FormOperator p = op_wedge(e3);
    CHECK(code_of([&] { spectral_sequence(t, p, 1); }) == errc::schema);
    CHECK(code_of([&] { spectral_sequence(t, p, 2); }) == errc::verdict);

    // comparison sample validation
    SpectralReport rep = spectral_sequence(t, p);
    CHECK(code_of([&] { perturbed_homology_compare(t, p, {Rational(1), Rational(2)}, &rep); }) == errc::schema);
    CHECK(code_of([&] { perturbed_homology_compare(t, p, {Rational(1), Rational(0), Rational(2)}, &rep); }) ==
          errc::schema);

    // chain-route argument validation
    CHECK(code_of([&] { massey_differential(t, p, rep, 9, 0, {}); }) == errc::schema);
    CHECK(code_of([&] { massey_differential(t, p, rep, 2, 17, {}); }) == errc::schema);
    CHECK(code_of([&] { massey_differential(t, p, rep, 2, 1, QVec(5, Rational(0))); }) == errc::schema);
}
