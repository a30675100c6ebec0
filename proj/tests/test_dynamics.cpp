// Rotation cycle of linear torus flows and the contraction pairing:
// frozen values, the pairing law, and the zero-cycle vanishing criterion.

#include <catch2/catch_amalgamated.hpp>

#include "exhom/dynamics.hpp"

using namespace exhom;

namespace {

Model t2() { return Model::torus(2, {{-1, 1}, {-1, 1}}); }
Model t3() { return Model::torus(3, {{-1, 1}, {-1, 1}, {-1, 1}}); }

MultiVector constant_field(const Model& m, const QVec& comps) {
    MultiVector x{&m, 1, {}};
    for (std::size_t i = 0; i < comps.size(); ++i)
        if (comps[i] != 0) x.terms[FormMonomial{m.zero_freq(), {(int)i + 1}}] = comps[i];
    return x;
}

Form constant_one_form(const Model& m, const QVec& comps) {
    Form u = zero_form(m, 1);
    for (std::size_t i = 0; i < comps.size(); ++i)
        if (comps[i] != 0) u = add(u, basis_form(m, FormMonomial{m.zero_freq(), {(int)i + 1}}, comps[i]));
    return u;
}

}  // namespace

TEST_CASE("rotation cycle of a linear flow is the field itself") {
    Model m = t2();
    CHECK(rotation_cycle(m, MultiVector{&m, 1, {}}).is_zero());
    CHECK(rotation_cycle(m, constant_field(m, {Rational(1), Rational(2)})).coords ==
          QVec{Rational(1), Rational(2)});
    CHECK(rotation_cycle(m, constant_field(m, {Rational(1) / 2, Rational(-3) / 4})).coords ==
          QVec{Rational(1) / 2, Rational(-3) / 4});

    Model m3 = t3();
    RotationCycle a = rotation_cycle(m3, constant_field(m3, {Rational(0), Rational(0), Rational(1)}));
    CHECK(a.coords == QVec{Rational(0), Rational(0), Rational(1)});
    CHECK(!a.is_zero());
}

TEST_CASE("contraction pairing evaluates classes on the cycle") {
    Model m = t2();
    Form dx1 = constant_one_form(m, {Rational(1), Rational(0)});
    CHECK(d2_evaluation(m, constant_field(m, {Rational(0), Rational(1)}), dx1) == 0);
    CHECK(d2_evaluation(m, constant_field(m, {Rational(1), Rational(2)}), dx1) == 1);
    CHECK(d2_evaluation(m, constant_field(m, {Rational(1), Rational(2)}),
                        constant_one_form(m, {Rational(1), Rational(3)})) == 7);
}

TEST_CASE("pairing law holds for constant data") {
    Model m2 = t2();
    Model m3 = t3();
    std::vector<std::pair<QVec, QVec>> cases = {
        {{Rational(2), Rational(-5)}, {Rational(3), Rational(1) / 3}},
        {{Rational(-1) / 2, Rational(7)}, {Rational(4), Rational(-2)}},
        {{Rational(0), Rational(1) / 6}, {Rational(-6), Rational(5) / 2}},
    };
    for (const auto& [uc, xc] : cases) {
        Rational expect = uc[0] * xc[0] + uc[1] * xc[1];
        CHECK(d2_evaluation(m2, constant_field(m2, xc), constant_one_form(m2, uc)) == expect);
    }
    QVec uc = {Rational(1) / 5, Rational(-2), Rational(3)};
    QVec xc = {Rational(10), Rational(1) / 2, Rational(4) / 3};
    CHECK(d2_evaluation(m3, constant_field(m3, xc), constant_one_form(m3, uc)) ==
          uc[0] * xc[0] + uc[1] * xc[1] + uc[2] * xc[2]);
}

TEST_CASE("pairing only depends on the class of the form") {
    // u and u + d(chi_{(0,1)}) represent the same invariant class for the
    // flow along the first coordinate
    Model m = t2();
    MultiVector x = constant_field(m, {Rational(1), Rational(0)});
    Form u = constant_one_form(m, {Rational(1), Rational(0)});
    Form exact = apply_d(basis_form(m, FormMonomial{{0, 1}, {}}));
    REQUIRE(!exact.is_zero());
    CHECK(d2_evaluation(m, x, u) == 1);
    CHECK(d2_evaluation(m, x, add(u, exact)) == 1);
}

TEST_CASE("zero-cycle criterion and informational ranks") {
    Model m = t2();

    Lemma6Report zero = lemma6_check(m, MultiVector{&m, 1, {}});
    CHECK(zero.zero_cycle);
    CHECK(zero.d2_rank == 0);
    REQUIRE(zero.pairings.size() == 2);  // H^1 of the full complex
    for (const auto& v : zero.pairings) CHECK(v == 0);

    Lemma6Report r10 = lemma6_check(m, constant_field(m, {Rational(1), Rational(0)}));
    CHECK(!r10.zero_cycle);
    CHECK(r10.cycle == QVec{Rational(1), Rational(0)});
    CHECK(r10.d2_rank == 1);
    REQUIRE(r10.pairings.size() == 2);
    int nonzero = 0;
    for (const auto& v : r10.pairings)
        if (v != 0) ++nonzero;
    CHECK(nonzero == 1);

    Lemma6Report r12 = lemma6_check(m, constant_field(m, {Rational(1), Rational(2)}));
    CHECK(!r12.zero_cycle);
    CHECK(r12.d2_rank == 1);
    CHECK(r12.pairings.size() == 2);

    Model m3 = t3();
    Lemma6Report r3 = lemma6_check(m3, constant_field(m3, {Rational(2), Rational(-1), Rational(0)}));
    CHECK(!r3.zero_cycle);
    CHECK(r3.d2_rank == 1);
    CHECK(r3.pairings.size() == 3);
}

TEST_CASE("dynamics rejects what it cannot compute exactly") {
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const error& e) {
            return e.code;
        }
        return errc::ok;
    };

    Model m = t2();
    Model h = Model::lie_algebra(3, {{{3, 1, 2}, Rational(1)}});

    // not a torus
    MultiVector xh{&h, 1, {}};
    xh.terms[FormMonomial{h.zero_freq(), {3}}] = 1;
    CHECK(code_of([&] { rotation_cycle(h, xh); }) == errc::unsupported);
    CHECK(code_of([&] { lemma6_check(h, xh); }) == errc::unsupported);

    // not constant
    MultiVector mod{&m, 1, {}};
    mod.terms[FormMonomial{{1, 0}, {1}}] = 1;
    CHECK(code_of([&] { rotation_cycle(m, mod); }) == errc::unsupported);

    // not order one
    MultiVector biv{&m, 2, {}};
    biv.terms[FormMonomial{m.zero_freq(), {1, 2}}] = 1;
    CHECK(code_of([&] { rotation_cycle(m, biv); }) == errc::unsupported);
    CHECK(code_of([&] { d2_evaluation(m, biv, constant_one_form(m, {Rational(1), Rational(0)})); }) ==
          errc::schema);

    // pairing preconditions
    MultiVector x = constant_field(m, {Rational(1), Rational(2)});
    CHECK(code_of([&] { d2_evaluation(m, x, basis_form(m, FormMonomial{{0, 0}, {1, 2}})); }) == errc::schema);
    CHECK(code_of([&] { d2_evaluation(m, x, basis_form(m, FormMonomial{{0, 1}, {1}})); }) == errc::verdict);
    CHECK(code_of([&] { d2_evaluation(m, x, basis_form(m, FormMonomial{{1, 0}, {1}})); }) == errc::verdict);

    // mixed models
    Form uh = basis_form(h, FormMonomial{h.zero_freq(), {1}});
    CHECK(code_of([&] { d2_evaluation(m, x, uh); }) == errc::schema);
}
