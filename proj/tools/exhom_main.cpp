// exhom: exact homology of perturbed differentials on de Rham models.
//
// usage: exhom <command> <problem.json> [flags]
// commands: validate identities exotic exact-seq ss dynamics equivariant
// flags: --samples v1,v2,...   parameter values for the comparison run (ss)
//        --cutoff D            polynomial cutoff (equivariant)
//        --max-page L          page cap override (ss)
//        --quiet               suppress the stderr summary
//
// The JSON report goes to stdout; a one-line summary goes to stderr.
// Exit codes: 0 ok, 1 a mathematical check failed, 2 malformed input,
// 3 inconsistent model data, 4 frequency window overflow, 5 unsupported.

#include "exhom/report.hpp"

#include <iostream>
#include <sstream>

namespace {

using exhom::Json;

struct Args {
    std::string command;
    std::string file;
    std::vector<exhom::Rational> samples;
    bool have_samples = false;
    int cutoff = 0;
    bool have_cutoff = false;
    int max_page = 0;
    bool have_max_page = false;
    bool quiet = false;
};

const char* kUsage =
    "usage: exhom <command> <problem.json> [--samples v1,v2,...] [--cutoff D]\n"
    "             [--max-page L] [--quiet]\n"
    "commands: validate identities exotic exact-seq ss dynamics equivariant\n";

std::vector<exhom::Rational> parse_samples(const std::string& text) {
    std::vector<exhom::Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(exhom::parse_rational(item));
    if (out.empty()) exhom::fail(exhom::errc::schema, "--samples needs at least one value");
    return out;
}

int parse_int(const std::string& text, const std::string& flag) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        exhom::fail(exhom::errc::schema, flag + " needs an integer, got '" + text + "'");
    }
}

Args parse_args(int argc, char** argv) {
    Args a;
    std::vector<std::string> positional;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        std::string value;
        bool inline_value = false;
        if (arg.rfind("--", 0) == 0) {
            auto eq = arg.find('=');
            if (eq != std::string::npos) {
                value = arg.substr(eq + 1);
                arg = arg.substr(0, eq);
                inline_value = true;
            }
        }
        auto take_value = [&](const std::string& flag) {
            if (inline_value) return value;
            if (i + 1 >= argc) exhom::fail(exhom::errc::schema, flag + " needs a value");
            return std::string(argv[++i]);
        };
        if (arg == "--samples") {
            a.samples = parse_samples(take_value(arg));
            a.have_samples = true;
        } else if (arg == "--cutoff") {
            a.cutoff = parse_int(take_value(arg), arg);
            a.have_cutoff = true;
        } else if (arg == "--max-page") {
            a.max_page = parse_int(take_value(arg), arg);
            a.have_max_page = true;
        } else if (arg == "--quiet") {
            a.quiet = true;
        } else if (arg.rfind("--", 0) == 0) {
            exhom::fail(exhom::errc::schema, "unknown flag '" + arg + "'");
        } else {
            positional.push_back(arg);
        }
    }
    if (positional.size() != 2) exhom::fail(exhom::errc::schema, "expected <command> <problem.json>");
    a.command = positional[0];
    a.file = positional[1];
    return a;
}

std::string dims_str(const Json& arr) {
    std::string out = "(";
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ", ";
        out += arr[i].dump();
    }
    return out + ")";
}

void summarize(const Json& rep, std::ostream& os) {
    const std::string cmd = rep.at("command").get<std::string>();
    if (cmd == "validate") {
        const Json& m = rep.at("model");
        os << "ok: " << m.at("kind").get<std::string>() << " dim " << m.at("dim")
           << ", basis dims " << dims_str(m.at("basis_dims")) << "\n";
    } else if (cmd == "identities") {
        std::size_t pass = 0;
        const Json& arr = rep.at("identities");
        for (const auto& e : arr)
            if (e.at("pass").get<bool>()) ++pass;
        os << "identities: " << pass << "/" << arr.size() << " pass";
        for (const auto& e : arr)
            if (!e.at("pass").get<bool>()) os << "; FAIL " << e.at("identity").get<std::string>();
        os << "\n";
    } else if (cmd == "exotic") {
        os << rep.at("mode").get<std::string>() << "; T dims " << dims_str(rep.at("t_dims"))
           << "; homology dims " << dims_str(rep.at("homology").at("dims")) << " total "
           << rep.at("homology").at("total") << "\n";
    } else if (cmd == "exact-seq") {
        Json nd = Json::array();
        for (const auto& n : rep.at("nodes")) nd.push_back(n.at("dim"));
        os << "nodes " << dims_str(nd);
        if (rep.at("ok").get<bool>())
            os << "; exact\n";
        else if (rep.contains("failed_node"))
            os << "; NOT exact at " << rep.at("failed_node").get<std::string>() << "\n";
        else
            os << "; theta unstable\n";
    } else if (cmd == "ss") {
        os << "E2 " << dims_str(rep.at("pages")[0].at("dims")) << "; stable at page "
           << rep.at("stable_page") << "; E_inf total " << rep.at("einf_total") << "; comparison "
           << (rep.at("comparison").at("match").get<bool>() ? "match" : "MISMATCH") << "\n";
    } else if (cmd == "dynamics") {
        os << "rotation cycle " << dims_str(rep.at("rotation_cycle")) << "; d2 rank "
           << rep.at("d2_rank") << "; lemma6 " << rep.at("lemma6").get<std::string>() << "\n";
    } else if (cmd == "equivariant") {
        os << "dims " << dims_str(rep.at("dims")) << " (cutoff " << rep.at("cutoff")
           << ", safe through " << rep.at("truncation_safe_through") << ")\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << kUsage;
        return (int)exhom::errc::schema;
    }
    try {
        Args a = parse_args(argc, argv);
        auto prob = exhom::load_problem(a.file);
        Json rep;
        if (a.command == "validate") {
            rep = exhom::run_validate(*prob);
        } else if (a.command == "identities") {
            rep = exhom::run_identities(*prob);
        } else if (a.command == "exotic") {
            rep = exhom::run_exotic(*prob);
        } else if (a.command == "exact-seq") {
            rep = exhom::run_exact_seq(*prob);
        } else if (a.command == "ss") {
            std::vector<exhom::Rational> samples = a.have_samples ? a.samples
                                                 : !prob->samples.empty()
                                                     ? prob->samples
                                                     : std::vector<exhom::Rational>{1, 2, -3};
            int max_page = a.have_max_page ? a.max_page : prob->max_page.value_or(0);
            rep = exhom::run_ss(*prob, samples, max_page);
        } else if (a.command == "dynamics") {
            rep = exhom::run_dynamics(*prob);
        } else if (a.command == "equivariant") {
            int cutoff = a.have_cutoff ? a.cutoff : prob->cutoff.value_or(0);
            if (cutoff == 0)
                exhom::fail(exhom::errc::schema,
                            "equivariant needs a cutoff (file key \"cutoff\" or --cutoff)");
            rep = exhom::run_equivariant(*prob, cutoff);
        } else {
            exhom::fail(exhom::errc::schema, "unknown command '" + a.command + "'");
        }
        std::cout << rep.dump(2) << "\n";
        if (!a.quiet) summarize(rep, std::cerr);
        return rep.at("ok").get<bool>() ? 0 : 1;
    } catch (const exhom::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return (int)e.code;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
