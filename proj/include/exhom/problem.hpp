#pragma once
// Problem files: strict JSON for a model, named forms and multivectors, the
// d' operator specification, and command parameters.  Unknown keys anywhere
// are hard schema errors; nothing is silently tolerated.

#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "exhom/operator.hpp"

namespace exhom {

using Json = nlohmann::ordered_json;

namespace detail {

inline void check_keys(const Json& j, const std::string& what, const std::set<std::string>& allowed) {
    if (!j.is_object()) fail(errc::schema, what + " must be an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key())) fail(errc::schema, "unknown key '" + item.key() + "' in " + what);
}

inline long long get_int(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) fail(errc::schema, what + " must be an integer");
    return j.get<long long>();
}

inline std::string get_str(const Json& j, const std::string& what) {
    if (!j.is_string()) fail(errc::schema, what + " must be a string");
    return j.get<std::string>();
}

inline Rational get_rational(const Json& j, const std::string& what) {
    return parse_rational(get_str(j, what));
}

inline std::vector<int> get_int_vec(const Json& j, const std::string& what) {
    if (!j.is_array()) fail(errc::schema, what + " must be an array");
    std::vector<int> out;
    for (const auto& e : j) out.push_back((int)get_int(e, "entry of " + what));
    return out;
}

}  // namespace detail

inline Model model_from_json(const Json& j) {
    detail::check_keys(j, "model", {"kind", "dim", "structure", "window"});
    if (!j.contains("kind") || !j.contains("dim")) fail(errc::schema, "model needs 'kind' and 'dim'");
    std::string kind = detail::get_str(j.at("kind"), "model kind");
    int n = (int)detail::get_int(j.at("dim"), "model dim");
    if (kind == "lie_algebra") {
        if (j.contains("window")) fail(errc::schema, "'window' only applies to torus models");
        std::map<std::tuple<int, int, int>, Rational> structure;
        if (j.contains("structure")) {
            if (!j.at("structure").is_array()) fail(errc::schema, "'structure' must be an array");
            for (const auto& e : j.at("structure")) {
                detail::check_keys(e, "structure entry", {"target", "j", "k", "coeff"});
                if (!e.contains("target") || !e.contains("j") || !e.contains("k") || !e.contains("coeff"))
                    fail(errc::schema, "structure entry needs 'target', 'j', 'k', 'coeff'");
                auto key = std::make_tuple((int)detail::get_int(e.at("target"), "structure target"),
                                           (int)detail::get_int(e.at("j"), "structure j"),
                                           (int)detail::get_int(e.at("k"), "structure k"));
                structure[key] += detail::get_rational(e.at("coeff"), "structure coeff");
            }
        }
        return Model::lie_algebra(n, structure);
    }
    if (kind == "torus") {
        if (j.contains("structure")) fail(errc::schema, "'structure' only applies to lie_algebra models");
        if (!j.contains("window")) fail(errc::schema, "torus model needs 'window'");
        if (!j.at("window").is_array()) fail(errc::schema, "'window' must be an array");
        std::vector<std::array<int, 2>> window;
        for (const auto& e : j.at("window")) {
            std::vector<int> lu = detail::get_int_vec(e, "window interval");
            if (lu.size() != 2) fail(errc::schema, "window interval must be a pair");
            window.push_back({lu[0], lu[1]});
        }
        return Model::torus(n, window);
    }
    fail(errc::schema, "unknown model kind '" + kind + "'");
}

namespace detail {

// shared literal shape of forms and multivectors: [{coeff, freq, idx}...]
inline std::vector<std::tuple<Rational, std::vector<int>, std::vector<int>>> parse_terms(
    const Model& m, const Json& j, const std::string& name) {
    if (!j.is_array()) fail(errc::schema, "'" + name + "' must be an array of terms");
    std::vector<std::tuple<Rational, std::vector<int>, std::vector<int>>> out;
    for (const auto& e : j) {
        check_keys(e, "term of '" + name + "'", {"coeff", "freq", "idx"});
        if (!e.contains("coeff") || !e.contains("freq") || !e.contains("idx"))
            fail(errc::schema, "term of '" + name + "' needs 'coeff', 'freq', 'idx'");
        Rational c = get_rational(e.at("coeff"), "coeff of '" + name + "'");
        std::vector<int> freq = get_int_vec(e.at("freq"), "freq of '" + name + "'");
        std::vector<int> idx = get_int_vec(e.at("idx"), "idx of '" + name + "'");
        if ((int)freq.size() != m.n()) fail(errc::schema, "freq length mismatch in '" + name + "'");
        if (!m.is_torus())
            for (int k : freq)
                if (k != 0) fail(errc::schema, "lie_algebra forms carry zero frequency ('" + name + "')");
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            if (idx[i] >= idx[i + 1])
                fail(errc::schema, "indices must be strictly increasing in '" + name + "'");
        for (int i : idx)
            if (i < 1 || i > m.n()) fail(errc::schema, "index out of range in '" + name + "'");
        out.emplace_back(std::move(c), std::move(freq), std::move(idx));
    }
    return out;
}

}  // namespace detail

inline Form form_from_json(const Model& m, const Json& j, const std::string& name) {
    auto terms = detail::parse_terms(m, j, name);
    if (terms.empty()) fail(errc::schema, "form '" + name + "' has no terms");
    Form out = zero_form(m, (int)std::get<2>(terms.front()).size());
    for (auto& [c, freq, idx] : terms) {
        if (c == 0) continue;
        out = add(out, basis_form(m, FormMonomial{freq, idx}, c));
    }
    return out;
}

// An empty literal is the order-one zero field.
inline MultiVector multivector_from_json(const Model& m, const Json& j, const std::string& name) {
    auto terms = detail::parse_terms(m, j, name);
    MultiVector out{&m, terms.empty() ? 1 : (int)std::get<2>(terms.front()).size(), {}};
    for (auto& [c, freq, idx] : terms) {
        if ((int)idx.size() != out.order)
            fail(errc::schema, "mixed orders in multivector '" + name + "'");
        if (c == 0) continue;
        FormMonomial mono{freq, idx};
        detail::check_window(m, mono.freq);
        auto& slot = out.terms[mono];
        slot += c;
        if (slot == 0) out.terms.erase(mono);
    }
    return out;
}

struct OperatorTermSpec {
    std::string param;
    int parity = 0;  // declared parity of the formal parameter
    std::string kind;
    std::string ref;
};

struct Problem {
    Model model;
    std::vector<std::pair<std::string, Form>> forms;
    std::vector<std::pair<std::string, MultiVector>> multivectors;
    std::vector<OperatorTermSpec> op_terms;
    std::map<std::string, Rational> values;
    std::vector<Rational> samples;
    std::optional<int> cutoff;
    std::optional<int> max_page;
    std::optional<std::string> theta;

    const Form* form(const std::string& name) const {
        for (const auto& [k, v] : forms)
            if (k == name) return &v;
        return nullptr;
    }
    const MultiVector* multivector(const std::string& name) const {
        for (const auto& [k, v] : multivectors)
            if (k == name) return &v;
        return nullptr;
    }
};

// Heap-allocated so forms keep pointing at the problem's own model.
inline std::unique_ptr<Problem> problem_from_json(const Json& j) {
    detail::check_keys(j, "problem file",
                       {"model", "forms", "multivectors", "operator", "values", "samples", "cutoff",
                        "max_page", "theta"});
    if (!j.contains("model")) fail(errc::schema, "problem file needs 'model'");
    auto p = std::make_unique<Problem>(Problem{model_from_json(j.at("model")), {}, {}, {}, {}, {}, {}, {}, {}});

    if (j.contains("forms")) {
        if (!j.at("forms").is_object()) fail(errc::schema, "'forms' must be an object");
        for (const auto& item : j.at("forms").items()) {
            if (p->form(item.key())) fail(errc::schema, "duplicate form '" + item.key() + "'");
            p->forms.emplace_back(item.key(), form_from_json(p->model, item.value(), item.key()));
        }
    }
    if (j.contains("multivectors")) {
        if (!j.at("multivectors").is_object()) fail(errc::schema, "'multivectors' must be an object");
        for (const auto& item : j.at("multivectors").items()) {
            if (p->multivector(item.key())) fail(errc::schema, "duplicate multivector '" + item.key() + "'");
            p->multivectors.emplace_back(item.key(),
                                         multivector_from_json(p->model, item.value(), item.key()));
        }
    }
    if (j.contains("operator")) {
        detail::check_keys(j.at("operator"), "operator", {"terms"});
        if (!j.at("operator").contains("terms") || !j.at("operator").at("terms").is_array())
            fail(errc::schema, "operator needs a 'terms' array");
        for (const auto& e : j.at("operator").at("terms")) {
            detail::check_keys(e, "operator term", {"param", "parity", "kind", "ref"});
            if (!e.contains("param") || !e.contains("parity") || !e.contains("kind") || !e.contains("ref"))
                fail(errc::schema, "operator term needs 'param', 'parity', 'kind', 'ref'");
            OperatorTermSpec t{detail::get_str(e.at("param"), "operator param"),
                               (int)detail::get_int(e.at("parity"), "operator parity"),
                               detail::get_str(e.at("kind"), "operator kind"),
                               detail::get_str(e.at("ref"), "operator ref")};
            if (t.param.empty()) fail(errc::schema, "operator param must be nonempty");
            if (t.parity != 0 && t.parity != 1) fail(errc::schema, "operator parity must be 0 or 1");
            if (t.kind == "wedge") {
                if (!p->form(t.ref)) fail(errc::schema, "operator references unknown form '" + t.ref + "'");
            } else if (t.kind == "contract") {
                if (!p->multivector(t.ref))
                    fail(errc::schema, "operator references unknown multivector '" + t.ref + "'");
            } else {
                fail(errc::schema, "operator kind must be 'wedge' or 'contract'");
            }
            for (const auto& prev : p->op_terms)
                if (prev.param == t.param && prev.parity != t.parity)
                    fail(errc::schema, "parameter '" + t.param + "' declared with two parities");
            p->op_terms.push_back(std::move(t));
        }
    }
    if (j.contains("values")) {
        if (!j.at("values").is_object()) fail(errc::schema, "'values' must be an object");
        for (const auto& item : j.at("values").items()) {
            bool known = false;
            for (const auto& t : p->op_terms) known = known || t.param == item.key();
            if (!known) fail(errc::schema, "value for unknown parameter '" + item.key() + "'");
            p->values[item.key()] = detail::get_rational(item.value(), "value of '" + item.key() + "'");
        }
    }
    if (j.contains("samples")) {
        if (!j.at("samples").is_array()) fail(errc::schema, "'samples' must be an array");
        for (const auto& e : j.at("samples")) p->samples.push_back(detail::get_rational(e, "sample"));
    }
    if (j.contains("cutoff")) p->cutoff = (int)detail::get_int(j.at("cutoff"), "cutoff");
    if (j.contains("max_page")) p->max_page = (int)detail::get_int(j.at("max_page"), "max_page");
    if (j.contains("theta")) {
        p->theta = detail::get_str(j.at("theta"), "theta");
        if (!p->form(*p->theta)) fail(errc::schema, "theta references unknown form '" + *p->theta + "'");
    }
    return p;
}

inline std::unique_ptr<Problem> load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::schema, "cannot read file '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        fail(errc::schema, std::string("invalid JSON: ") + e.what());
    }
    return problem_from_json(j);
}

// Materialized perturbation terms, with the parity rule checked up front.
inline std::vector<PerturbationTerm> build_terms(const Problem& p) {
    std::vector<PerturbationTerm> out;
    for (const auto& t : p.op_terms) {
        FormOperator op = t.kind == "wedge" ? op_wedge(*p.form(t.ref)) : op_contract(*p.multivector(t.ref));
        if ((t.parity + op.parity()) % 2 != 1)
            fail(errc::schema, "parity rule violated for term with parameter '" + t.param +
                                   "': parity(param) + parity(operator) must be odd");
        out.push_back({t.param, op, op.parity()});
    }
    return out;
}

// The parameter ring generated by the declared parameters, in file order.
inline Ring ring_for(const Problem& p, int cutoff = 2) {
    std::vector<std::string> odd, even;
    for (const auto& t : p.op_terms) {
        auto& dst = t.parity ? odd : even;
        bool seen = false;
        for (const auto& s : odd) seen = seen || s == t.param;
        for (const auto& s : even) seen = seen || s == t.param;
        if (!seen) dst.push_back(t.param);
    }
    return Ring(odd, even, cutoff);
}

}  // namespace exhom
