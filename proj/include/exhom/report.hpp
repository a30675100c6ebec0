#pragma once
// Canonical reports: insertion-ordered JSON with fixed key order, rationals
// as "p/q" strings, no environment-dependent content.  Every report carries
// an "ok" flag; the CLI exits 1 when it is false.

#include "exhom/cartan.hpp"
#include "exhom/dynamics.hpp"
#include "exhom/exact_sequence.hpp"
#include "exhom/problem.hpp"

namespace exhom {

inline Json json_qvec(const QVec& v) {
    Json out = Json::array();
    for (const auto& q : v) out.push_back(rational_str(q));
    return out;
}

inline Json json_ring_mono(const RingMono& m) {
    Json out;
    Json odd = Json::array();
    for (std::size_t i = 0; i < m.odd.size(); ++i)
        if (m.odd[i]) odd.push_back(i);
    out["odd"] = odd;
    out["even"] = m.even;
    return out;
}

inline Json json_form_terms(const Form& f) {
    Json out = Json::array();
    for (const auto& [mono, c] : f.terms) {
        Json t;
        t["coeff"] = rational_str(c);
        t["freq"] = mono.freq;
        t["idx"] = mono.idx;
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------

inline Json run_validate(const Problem& p) {
    Json out;
    out["command"] = "validate";
    Json mj;
    mj["kind"] = p.model.is_torus() ? "torus" : "lie_algebra";
    mj["dim"] = p.model.n();
    std::vector<std::size_t> dims;
    for (int k = 0; k <= p.model.n(); ++k) dims.push_back(p.model.dim(k));
    mj["basis_dims"] = dims;
    out["model"] = mj;
    Json fn = Json::array(), xn = Json::array();
    for (const auto& [name, f] : p.forms) fn.push_back(name);
    for (const auto& [name, x] : p.multivectors) xn.push_back(name);
    out["forms"] = fn;
    out["multivectors"] = xn;
    out["operator_terms"] = p.op_terms.size();
    out["ok"] = true;
    return out;
}

inline Json run_identities(const Problem& p) {
    const Model& m = p.model;
    FormOperator d = op_d(m);
    std::vector<std::pair<std::string, bool>> checks;
    checks.emplace_back("d squared is zero", (d * d).is_zero());

    bool ferm = true;
    for (int i = 1; i <= m.n(); ++i)
        for (int j = 1; j <= m.n(); ++j) {
            FormOperator ai = op_creation(m, i), aj = op_creation(m, j);
            FormOperator bi = op_annihilation(m, i), bj = op_annihilation(m, j);
            ferm = ferm && anticommutator(ai, aj).is_zero() && anticommutator(bi, bj).is_zero();
            FormOperator mix = anticommutator(ai, bj);
            ferm = ferm && (i == j ? mix == op_identity(m) : mix.is_zero());
        }
    checks.emplace_back("fermionic anticommutator relations", ferm);

    for (const auto& [name, x] : p.multivectors)
        if (x.order == 1)
            checks.emplace_back("Cartan formula for '" + name + "'",
                                op_lie(x) == anticommutator(d, op_contract(x)));

    if (!p.op_terms.empty()) {
        Ring r = ring_for(p);
        ExtSpace s(m, r);
        auto terms = build_terms(p);
        ExtOperator dp = build_perturbed_d(s, terms);
        checks.emplace_back("perturbed square matches the curvature formula",
                            dp.square() == expected_curvature(s, terms));
    }

    Json out;
    out["command"] = "identities";
    Json arr = Json::array();
    bool ok = true;
    for (const auto& [name, pass] : checks) {
        Json e;
        e["identity"] = name;
        e["pass"] = pass;
        arr.push_back(e);
        ok = ok && pass;
    }
    out["identities"] = arr;
    out["ok"] = ok;
    return out;
}

inline Json run_exotic(const Problem& p) {
    const Model& m = p.model;
    Json out;
    out["command"] = "exotic";
    if (!p.values.empty()) {
        Ring r = ring_for(p);
        FormOperator dp = numeric_perturbed_d(m, r, build_terms(p), p.values);
        FlatSubcomplex t = flat_subcomplex(dp);
        ExoticHomology h = exotic_homology_z2(t, dp);
        out["mode"] = "numeric";
        Json vals;
        for (const auto& [k, v] : p.values) vals[k] = rational_str(v);
        out["values"] = vals;
        out["t_dims"] = t.dims();
        Json hj;
        hj["grading"] = "Z2";
        hj["dims"] = h.dims();
        hj["total"] = h.total();
        out["homology"] = hj;
    } else {
        Ring r = ring_for(p);
        ExtSpace s(m, r);
        auto terms = build_terms(p);
        ExtOperator dp = build_perturbed_d(s, terms);
        Json comps = Json::array();
        for (const auto& [mono, op] : dp.square().components()) comps.push_back(json_ring_mono(mono));
        FlatSubcomplex t = flat_subcomplex(s, dp, terms);
        ExoticHomology h = exotic_homology(t);
        out["mode"] = "symbolic";
        out["curvature_components"] = comps;
        out["t_dims"] = t.dims();
        Json hj;
        hj["grading"] = "Z";
        hj["dims"] = h.dims();
        hj["total"] = h.total();
        out["homology"] = hj;
    }
    out["ok"] = true;
    return out;
}

inline Json run_exact_seq(const Problem& p) {
    const Form* omega = p.form("omega");
    const MultiVector* x = p.multivector("X");
    if (!omega) fail(errc::schema, "exact-seq needs a form named 'omega'");
    if (!x) fail(errc::schema, "exact-seq needs a multivector named 'X'");
    std::optional<Form> theta;
    if (p.theta) theta = *p.form(*p.theta);
    ExactSequenceReport rep = exact_sequence(p.model, *omega, *x, theta);

    Json out;
    out["command"] = "exact-seq";
    Json nodes = Json::array();
    for (std::size_t i = 0; i < rep.node_dims.size(); ++i) {
        Json nj;
        nj["name"] = sequence_node_name(i);
        nj["dim"] = rep.node_dims[i];
        nj["exact"] = (bool)rep.node_exact[i];
        nodes.push_back(nj);
    }
    out["nodes"] = nodes;
    out["map_ranks"] = rep.map_ranks;
    out["alternating_sum"] = rep.alternating_sum;
    out["theta"] = json_form_terms(rep.theta);
    out["theta_stable"] = rep.theta_stable;
    if (rep.failed_node) {
        out["failed_node"] = sequence_node_name(*rep.failed_node);
        out["witness"] = json_qvec(rep.witness);
    }
    out["ok"] = rep.exact() && rep.theta_stable;
    return out;
}

inline Json run_ss(const Problem& p, const std::vector<Rational>& samples, int max_page) {
    const Model& m = p.model;
    std::set<std::string> params;
    for (const auto& t : p.op_terms) params.insert(t.param);
    if (params.size() > 1)
        fail(errc::unsupported, "the perturbation filtration needs a single parameter");
    for (const auto& t : p.op_terms)
        if (t.parity == 1)
            fail(errc::unsupported, "spectral filtration over an odd parameter is not supported");

    Ring r = ring_for(p);
    ExtSpace s(m, r);
    auto terms = build_terms(p);
    ExtOperator dp = build_perturbed_d(s, terms);
    FlatSubcomplex t = flat_subcomplex(s, dp, terms);
    FormOperator pert(m, 1);
    for (const auto& term : terms) pert = pert + term.op;

    SpectralReport rep = spectral_sequence(t, pert, max_page);
    ComparisonReport cmp = perturbed_homology_compare(t, pert, samples, &rep);

    Json out;
    out["command"] = "ss";
    out["convention"] =
        "page 2 is the homology of T under d; the page-l differential is induced by "
        "perturbation chains of length l-1";
    out["grading"] = rep.z2 ? "Z2" : "Z";
    out["t_dims"] = rep.t_dims;
    Json pages = Json::array();
    for (const auto& page : rep.pages) {
        Json pj;
        pj["page"] = page.page;
        pj["dims"] = page.dims();
        std::vector<std::size_t> ranks;
        for (const auto& dblk : page.diff) ranks.push_back(rank_of(dblk));
        pj["diff_ranks"] = ranks;
        pj["shift"] = page.shift;
        pages.push_back(pj);
    }
    out["pages"] = pages;
    out["stable_page"] = rep.stable_page;
    out["einf"] = rep.einf;
    out["einf_total"] = rep.einf_total;
    Json cj;
    Json sarr = Json::array();
    for (const auto& sh : cmp.samples) {
        Json sj;
        sj["value"] = rational_str(sh.value);
        sj["dims"] = sh.dims;
        sj["total"] = sh.total();
        sarr.push_back(sj);
    }
    cj["samples"] = sarr;
    cj["min_total"] = cmp.min_total;
    cj["einf_total"] = cmp.einf_total;
    cj["match"] = cmp.match;
    out["comparison"] = cj;
    out["ok"] = cmp.match;
    return out;
}

inline Json run_dynamics(const Problem& p) {
    const MultiVector* x = p.multivector("X");
    if (!x) fail(errc::schema, "dynamics needs a multivector named 'X'");
    Lemma6Report rep = lemma6_check(p.model, *x);

    Json out;
    out["command"] = "dynamics";
    out["rotation_cycle"] = json_qvec(rep.cycle);
    out["h1_dim"] = rep.pairings.size();
    out["pairings"] = json_qvec(rep.pairings);
    out["d2_rank"] = rep.d2_rank;
    out["lemma6"] = rep.zero_cycle ? "pass" : "not-applicable(a!=0)";
    if (const Form* u = p.form("u")) out["pairing"] = rational_str(d2_evaluation(p.model, *x, *u));
    out["ok"] = true;
    return out;
}

inline Json run_equivariant(const Problem& p, int cutoff) {
    if (p.multivectors.empty()) fail(errc::schema, "equivariant needs at least one multivector");
    std::vector<MultiVector> fields;
    for (const auto& [name, x] : p.multivectors) fields.push_back(x);
    CartanComplex c = build_cartan(p.model, fields, cutoff);
    EquivariantReport rep = equivariant_cohomology(c);

    Json out;
    out["command"] = "equivariant";
    out["cutoff"] = rep.cutoff;
    out["truncation_safe_through"] = rep.safe_through;
    out["dims"] = rep.dims;
    out["ok"] = true;
    return out;
}

}  // namespace exhom
