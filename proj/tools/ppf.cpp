// ppf: compile Presburger formulas into population protocols and check them.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppf/fixtures.hpp"
#include "ppf/pipeline.hpp"
#include "ppf/verify.hpp"

using nlohmann::json;
using namespace ppf;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void write_json(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw UsageError("cannot write " + out);
    f << j.dump(2) << "\n";
}

Formula parse_formula(const std::string& s) {
    try {
        return parse(s);
    } catch (const ParseError& e) {
        throw UsageError(std::string("parse error: ") + e.what());
    }
}

Valuation parse_input(const std::string& s) {
    Valuation v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("bad input item '" + item + "', expected var=count");
        std::string x = item.substr(0, eq);
        x.erase(0, x.find_first_not_of(' '));
        x.erase(x.find_last_not_of(' ') + 1);
        try {
            v[x] = std::stoll(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("bad count in '" + item + "'");
        }
    }
    return v;
}

// Valuations up to `max_size` whose initial configuration has at least two agents.
std::vector<Valuation> valid_inputs(Machine& m, int lo, int hi) {
    std::vector<Valuation> out;
    for (auto& v : inputs_between(m.vars, lo, hi)) {
        try {
            m.initial(v);
            out.push_back(std::move(v));
        } catch (const std::invalid_argument&) {
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compile Presburger formulas into leaderless population protocols"};
    app.require_subcommand(1);

    std::string formula, mode = "full", out, protocol_path, input, guard = "none", kind, name;
    int size = 0, max_size = 0, jobs = 1, max_pop = 3, depth = 0, n = 0;
    std::uint64_t seed = 1, max_steps = 1000000, window = 50000;
    std::size_t node_cap = default_node_cap();

    auto* compile_cmd = app.add_subcommand("compile", "Compile a formula");
    compile_cmd->add_option("--formula", formula)->required();
    compile_cmd->add_option("--mode", mode)->check(CLI::IsMember(compile_modes()));
    compile_cmd->add_option("--size", size);
    compile_cmd->add_option("--out", out);

    auto* stats_cmd = app.add_subcommand("stats", "Print stage statistics");
    stats_cmd->add_option("--protocol", protocol_path)->required();

    auto* sim_cmd = app.add_subcommand("simulate", "Run a random fair execution");
    sim_cmd->add_option("--protocol", protocol_path)->required();
    sim_cmd->add_option("--input", input)->required();
    sim_cmd->add_option("--seed", seed);
    sim_cmd->add_option("--max-steps", max_steps);
    sim_cmd->add_option("--window", window);

    auto* verify_cmd = app.add_subcommand("verify", "Exhaustively check a protocol against a formula");
    verify_cmd->add_option("--protocol", protocol_path)->required();
    verify_cmd->add_option("--formula", formula)->required();
    verify_cmd->add_option("--guard", guard);
    verify_cmd->add_option("--max-size", max_size)->required();
    verify_cmd->add_option("--node-cap", node_cap);
    verify_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);

    auto* rdi_cmd = app.add_subcommand("check-rdi", "Check the RDI properties of an atom's protocol");
    rdi_cmd->add_option("--formula", formula)->required();
    rdi_cmd->add_option("--kind", kind)->required()->check(CLI::IsMember({"threshold", "remainder"}));
    rdi_cmd->add_option("--max-pop", max_pop);
    rdi_cmd->add_option("--depth", depth);
    rdi_cmd->add_option("--node-cap", node_cap);

    auto* halt_cmd = app.add_subcommand("check-halting", "Check the halting property at one size");
    halt_cmd->add_option("--protocol", protocol_path)->required();
    halt_cmd->add_option("--size", size)->required();
    halt_cmd->add_option("--node-cap", node_cap);

    auto* fix_cmd = app.add_subcommand("fixtures", "Emit a reference protocol");
    fix_cmd->add_option("--name", name)->required()->check(CLI::IsMember({"pn", "ppn"}));
    fix_cmd->add_option("--n", n)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*compile_cmd) {
            Formula phi = parse_formula(formula);
            write_json(compile(phi, mode, size).to_json(), out);
            return kOk;
        }
        if (*stats_cmd) {
            json doc = read_json(protocol_path);
            if (doc.contains("stats")) {
                write_json(doc.at("stats"), "");
            } else {
                const json& p = doc.contains("protocol") ? doc.at("protocol") : doc;
                Protocol proto = p.contains("dagger") ? rdi_from_json(p).with_dagger() : protocol_from_json(p);
                write_json(stats_json({stat_of("protocol", proto)}), "");
            }
            return kOk;
        }
        if (*sim_cmd) {
            MachinePtr m = load_machine(read_json(protocol_path))();
            write_json(simulate(*m, parse_input(input), seed, max_steps, window).to_json(), "");
            return kOk;
        }
        if (*verify_cmd) {
            Formula phi = parse_formula(formula);
            MachineFactory make = load_machine(read_json(protocol_path));
            MachinePtr probe = make();
            Report r = check_computes(make, guarded(phi, guard), valid_inputs(*probe, 0, max_size), node_cap, jobs);
            write_json(r.to_json(), "");
            return r.ok() ? kOk : kFailed;
        }
        if (*rdi_cmd) {
            Formula phi = parse_formula(formula);
            CompilationResult c = compile(phi, "rdi-" + kind);
            RdiOptions opt;
            opt.max_pop = max_pop;
            opt.max_depth = depth;
            opt.node_cap = node_cap;
            RdiReport r = check_rdi(*c.rdi, guarded(phi, "none"), opt);
            write_json(r.to_json(), "");
            return r.ok() ? kOk : kFailed;
        }
        if (*halt_cmd) {
            MachinePtr m = load_machine(read_json(protocol_path))();
            HaltingReport r = check_halting(*m, valid_inputs(*m, size, size), node_cap);
            write_json(r.to_json(), "");
            return r.ok() ? kOk : kFailed;
        }
        if (*fix_cmd) {
            write_json(to_json(name == "pn" ? fixture_pn(n) : fixture_ppn(n)), "");
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "ppf: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
