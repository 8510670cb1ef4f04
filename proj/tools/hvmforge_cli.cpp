// hvmforge: command-line front end for systems of random variables,
// hidden variable models, and the exact noncontextuality decision.
//
// Exit codes: 0 ok; 1 the input is fine but the check failed (signaling
// detected, model does not reproduce the system, no noncontextual model
// exists); 2 usage, file or schema errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hvmforge/hvmforge.hpp"

namespace {

using hvmforge::Json;

struct Report {
    std::string command;
    std::vector<std::string> argv_echo;
    std::string status = "ok";  // ok | violation | infeasible | error
    Json payload = Json::object();
    std::vector<std::string> lines;
};

int exit_code_for(const std::string& status) {
    if (status == "ok") return 0;
    if (status == "violation" || status == "infeasible") return 1;
    return 2;
}

void emit(const Report& report, bool as_json) {
    if (as_json) {
        Json root = Json::object();
        root["schema"] = "1";
        root["command"] = report.command;
        root["argv"] = report.argv_echo;
        root["status"] = report.status;
        root["exit_code"] = exit_code_for(report.status);
        root["payload"] = report.payload;
        std::cout << root.dump(2) << "\n";
        return;
    }
    for (const std::string& line : report.lines) std::cout << line << "\n";
    std::cout << "status: " << report.status << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hvmforge::Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hvmforge::Error("cannot write '" + path + "'");
    out << content;
}

hvmforge::System load_system(const std::string& path) {
    try {
        return hvmforge::parse_system(read_file(path));
    } catch (const hvmforge::Error& e) {
        throw hvmforge::Error(path + ": " + e.what());
    }
}

hvmforge::Hvm load_hvm(const std::string& path) {
    try {
        return hvmforge::parse_hvm(read_file(path));
    } catch (const hvmforge::Error& e) {
        throw hvmforge::Error(path + ": " + e.what());
    }
}

Json marginal_to_json(const hvmforge::Dist& d) {
    Json arr = Json::array();
    for (const hvmforge::Point& p : d.alphabet()) {
        Json cell = Json::object();
        cell["outcome"] = p.label();
        cell["p"] = hvmforge::format_rational(d.mass(p));
        arr.push_back(std::move(cell));
    }
    return arr;
}

Json joint_cells_to_json(const hvmforge::JointDist& joint,
                         const std::vector<std::string>& property_order) {
    Json cells = Json::array();
    for (const hvmforge::Point& tuple : joint.dist().alphabet()) {
        const hvmforge::Rational& mass = joint.mass(tuple);
        if (mass == 0) continue;
        Json cell = Json::object();
        Json outcomes = Json::array();
        for (const std::string& q : property_order) outcomes.push_back(tuple.at(q).label());
        cell["outcomes"] = std::move(outcomes);
        cell["p"] = hvmforge::format_rational(mass);
        cells.push_back(std::move(cell));
    }
    return cells;
}

std::string outcomes_line(const Json& cell) {
    std::string line = "P(";
    bool first = true;
    for (const auto& o : cell["outcomes"]) {
        if (!first) line += ",";
        first = false;
        line += o.get<std::string>();
    }
    line += ") = " + cell["p"].get<std::string>();
    return line;
}

void run_audit(Report& report, const std::string& system_path) {
    hvmforge::System s = load_system(system_path);
    hvmforge::SystemReport audit = hvmforge::is_consistently_connected(s);
    report.payload["consistent"] = audit.consistent;
    Json violations = Json::array();
    for (const hvmforge::MarginalViolation& v : audit.violations) {
        Json node = Json::object();
        node["property"] = v.property;
        node["context_a"] = v.context_a;
        node["context_b"] = v.context_b;
        node["marginal_a"] = marginal_to_json(v.marginal_a);
        node["marginal_b"] = marginal_to_json(v.marginal_b);
        violations.push_back(std::move(node));
        report.lines.push_back("marginal of " + v.property + " differs between " +
                               v.context_a + " and " + v.context_b);
    }
    report.payload["violations"] = std::move(violations);
    if (audit.consistent) {
        report.lines.push_back("no-disturbance audit passed: all marginals agree");
    } else {
        report.status = "violation";
    }
}

void run_realize(Report& report, const std::string& hvm_path, const std::string& context_id) {
    hvmforge::Hvm m = load_hvm(hvm_path);
    hvmforge::JointDist joint = hvmforge::realize(m, context_id);
    report.payload["context"] = context_id;
    const std::vector<std::string>& order =
        hvmforge::structure_of(m).context(context_id).properties;
    report.payload["properties"] = order;
    report.payload["distribution"] = joint_cells_to_json(joint, order);
    report.lines.push_back("realized distribution in context " + context_id + ":");
    for (const auto& cell : report.payload["distribution"]) {
        report.lines.push_back("  " + outcomes_line(cell));
    }
}

void run_verify(Report& report, const std::string& hvm_path,
                const std::string& system_path) {
    hvmforge::Hvm m = load_hvm(hvm_path);
    hvmforge::System s = load_system(system_path);
    const bool ok = hvmforge::models(m, s);
    report.payload["models"] = ok;
    if (ok) {
        report.lines.push_back("model reproduces every context distribution exactly");
        return;
    }
    report.status = "violation";
    Json mismatched = Json::array();
    for (const hvmforge::Context& c : s.structure().contexts()) {
        if (!hvmforge::dist_eq(hvmforge::realize(m, c.id).dist(),
                               s.context_dist(c.id).dist())) {
            mismatched.push_back(c.id);
            report.lines.push_back("context " + c.id + ": realized distribution differs");
        }
    }
    report.payload["mismatched_contexts"] = std::move(mismatched);
}

void run_transform(Report& report, const std::string& hvm_path, const std::string& to,
                   const std::string& out_path, const std::string& coupling) {
    hvmforge::Hvm m = load_hvm(hvm_path);
    const hvmforge::HvmForm from = hvmforge::form_of(m);

    hvmforge::CouplingStrategy strategy = hvmforge::product_coupling;
    if (coupling == "monotone") {
        strategy = hvmforge::monotone_coupling;
    } else if (coupling != "product") {
        throw hvmforge::Error("unknown coupling strategy '" + coupling + "'");
    }

    auto unsupported = [&]() -> hvmforge::Hvm {
        throw hvmforge::Error(std::string("no transformation from form '") +
                              hvmforge::form_name(from) + "' to '" + to + "'");
    };

    hvmforge::Hvm result = [&]() -> hvmforge::Hvm {
        if (to == "fc") {
            if (from == hvmforge::HvmForm::ci) {
                return hvmforge::ci_to_fc(std::get<hvmforge::CiHvm>(m), strategy);
            }
            if (from == hvmforge::HvmForm::general) {
                return hvmforge::general_to_fc(std::get<hvmforge::GeneralHvm>(m), strategy);
            }
            if (from == hvmforge::HvmForm::nc) {
                return hvmforge::nc_to_fc(std::get<hvmforge::NcHvm>(m));
            }
            return unsupported();
        }
        if (to == "ci") {
            if (from == hvmforge::HvmForm::fc) {
                return hvmforge::fc_to_ci(std::get<hvmforge::FcHvm>(m));
            }
            if (from == hvmforge::HvmForm::nc) {
                return hvmforge::nc_to_ci(std::get<hvmforge::NcHvm>(m));
            }
            return unsupported();
        }
        if (to == "general") {
            if (from == hvmforge::HvmForm::fc) {
                return hvmforge::fc_to_general(std::get<hvmforge::FcHvm>(m));
            }
            if (from == hvmforge::HvmForm::xi) {
                return hvmforge::xi_to_general(std::get<hvmforge::XiHvm>(m));
            }
            if (from == hvmforge::HvmForm::nc) {
                return hvmforge::nc_to_general(std::get<hvmforge::NcHvm>(m));
            }
            return unsupported();
        }
        if (to == "nc") {
            // Reaching the nc form from the other forms is a decision
            // problem, not a construction; use nc-check for that.
            if (from == hvmforge::HvmForm::rho) {
                return hvmforge::rho_to_nc(std::get<hvmforge::RhoHvm>(m));
            }
            return unsupported();
        }
        throw hvmforge::Error("unknown target form '" + to + "'");
    }();

    report.payload["from"] = hvmforge::form_name(from);
    report.payload["to"] = to;
    const std::string text = hvmforge::serialize_hvm(result);
    if (!out_path.empty()) {
        write_file(out_path, text);
        report.payload["out"] = out_path;
        report.lines.push_back("wrote " + out_path);
    } else {
        report.payload["hvm"] = Json::parse(text);
        report.lines.push_back(std::string("transformed ") +
                               hvmforge::form_name(from) + " -> " + to);
    }
}

void run_nc_check(Report& report, const std::string& system_path,
                  const std::string& out_path, std::size_t cap) {
    hvmforge::System s = load_system(system_path);
    hvmforge::NcDecision decision = hvmforge::find_nc_hvm(s, cap);
    report.payload["feasible"] = decision.feasible();
    if (decision.feasible()) {
        const hvmforge::NcHvm& witness = decision.witness();
        report.payload["witness_support"] = witness.hidden().masses().size();
        const std::string text = hvmforge::serialize_hvm(hvmforge::Hvm(witness));
        if (!out_path.empty()) {
            write_file(out_path, text);
            report.payload["out"] = out_path;
        } else {
            report.payload["witness"] = Json::parse(text);
        }
        report.lines.push_back(
            "noncontextual model found (support size " +
            std::to_string(witness.hidden().masses().size()) + ")");
        if (!out_path.empty()) report.lines.push_back("wrote " + out_path);
    } else {
        report.status = "infeasible";
        const hvmforge::FarkasCertificate& cert = decision.certificate();
        Json entries = Json::array();
        for (std::size_t i = 0; i < cert.y.size(); ++i) {
            if (cert.y[i] == 0) continue;
            Json node = Json::object();
            node["constraint"] = cert.row_labels[i];
            node["y"] = hvmforge::format_rational(cert.y[i]);
            entries.push_back(std::move(node));
        }
        report.payload["certificate"] = std::move(entries);
        report.lines.push_back("no noncontextual model exists");
        report.lines.push_back("Farkas certificate (A^T y >= 0, b^T y < 0):");
        for (const auto& node : report.payload["certificate"]) {
            report.lines.push_back("  y[" + node["constraint"].get<std::string>() +
                                   "] = " + node["y"].get<std::string>());
        }
    }
}

void run_cycle_max(Report& report, const std::string& system_path) {
    hvmforge::System s = load_system(system_path);
    auto [value, signs] = hvmforge::cycle_max_with_signs(s);
    report.payload["value"] = hvmforge::format_rational(value);
    Json signs_json = Json::array();
    std::string signs_text;
    for (int sign : signs) {
        signs_json.push_back(sign > 0 ? "+" : "-");
        signs_text += sign > 0 ? " +" : " -";
    }
    report.payload["signs"] = std::move(signs_json);
    report.lines.push_back("cycle max = " + hvmforge::format_rational(value) +
                           " at signs" + signs_text);
}

void run_example(Report& report, const std::string& name,
                 const std::vector<std::string>& e_values, const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, std::string>> files;
    if (name == "pr-box") {
        files.emplace_back("pr-box.system.json",
                           hvmforge::serialize_system(hvmforge::pr_box_system()));
        files.emplace_back("pr-box.hvm.json",
                           hvmforge::serialize_hvm(hvmforge::Hvm(hvmforge::pr_box_fc_hvm())));
    } else if (name == "classical") {
        files.emplace_back("classical.system.json",
                           hvmforge::serialize_system(hvmforge::classical_system()));
        files.emplace_back(
            "classical.hvm.json",
            hvmforge::serialize_hvm(hvmforge::Hvm(hvmforge::classical_nc_hvm())));
    } else if (name == "cyclic4") {
        if (e_values.size() != 4) {
            throw hvmforge::Error("cyclic4 requires --e with four rationals, e.g. "
                                  "--e 1,1,1,-1");
        }
        std::array<hvmforge::Rational, 4> e;
        for (std::size_t i = 0; i < 4; ++i) e[i] = hvmforge::parse_rational(e_values[i]);
        files.emplace_back("cyclic4.system.json",
                           hvmforge::serialize_system(hvmforge::cyclic4(e)));
    } else {
        throw hvmforge::Error("unknown example '" + name +
                              "' (expected pr-box, classical or cyclic4)");
    }

    Json written = Json::array();
    for (const auto& [file_name, content] : files) {
        const std::string path = (fs::path(dir) / file_name).string();
        write_file(path, content);
        written.push_back(path);
        report.lines.push_back("wrote " + path);
    }
    report.payload["written"] = std::move(written);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact toolkit for systems of random variables and hidden variable models"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "emit a machine-readable report");

    std::string system_path;
    std::string hvm_path;
    std::string context_id;
    std::string target_form;
    std::string out_path;
    std::string coupling = "product";
    std::string example_name;
    std::vector<std::string> e_values;
    std::string example_dir = ".";
    std::size_t cap = 1'000'000;

    CLI::App* audit = app.add_subcommand("audit", "no-disturbance audit of a system file");
    audit->add_option("system", system_path, "system JSON file")->required();
    audit->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* realize = app.add_subcommand("realize", "realize an HVM in one context");
    realize->add_option("hvm", hvm_path, "HVM JSON file")->required();
    realize->add_option("--context", context_id, "context id")->required();
    realize->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* verify =
        app.add_subcommand("verify", "check that an HVM reproduces a system exactly");
    verify->add_option("hvm", hvm_path, "HVM JSON file")->required();
    verify->add_option("system", system_path, "system JSON file")->required();
    verify->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* transform =
        app.add_subcommand("transform", "rewrite an HVM into an equivalent form");
    transform->add_option("--to", target_form, "target form: fc, ci, general or nc")
        ->required();
    transform->add_option("hvm", hvm_path, "HVM JSON file")->required();
    transform->add_option("--out", out_path, "write the result here");
    transform->add_option("--coupling", coupling, "coupling strategy: product or monotone");
    transform->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* nc_check =
        app.add_subcommand("nc-check", "decide existence of a noncontextual model");
    nc_check->add_option("system", system_path, "system JSON file")->required();
    nc_check->add_option("--out", out_path, "write the witness HVM here");
    nc_check->add_option("--cap", cap, "global assignment cap");
    nc_check->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* cycle_max_cmd =
        app.add_subcommand("cycle-max", "maximal odd-signed correlation sum of a cycle");
    cycle_max_cmd->add_option("system", system_path, "system JSON file")->required();
    cycle_max_cmd->add_flag("--json", as_json, "emit a machine-readable report");

    CLI::App* example = app.add_subcommand("example", "write canonical example files");
    example->add_option("name", example_name, "pr-box, classical or cyclic4")->required();
    example->add_option("--e", e_values, "four rationals for cyclic4, e.g. 1,1,1,-1")
        ->delimiter(',');
    example->add_option("--dir", example_dir, "output directory");
    example->add_flag("--json", as_json, "emit a machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: see 'hvmforge --help' for usage\n";
        return 2;
    }

    Report report;
    for (int i = 1; i < argc; ++i) report.argv_echo.emplace_back(argv[i]);
    try {
        if (app.got_subcommand(audit)) {
            report.command = "audit";
            run_audit(report, system_path);
        } else if (app.got_subcommand(realize)) {
            report.command = "realize";
            run_realize(report, hvm_path, context_id);
        } else if (app.got_subcommand(verify)) {
            report.command = "verify";
            run_verify(report, hvm_path, system_path);
        } else if (app.got_subcommand(transform)) {
            report.command = "transform";
            run_transform(report, hvm_path, target_form, out_path, coupling);
        } else if (app.got_subcommand(nc_check)) {
            report.command = "nc-check";
            run_nc_check(report, system_path, out_path, cap);
        } else if (app.got_subcommand(cycle_max_cmd)) {
            report.command = "cycle-max";
            run_cycle_max(report, system_path);
        } else if (app.got_subcommand(example)) {
            report.command = "example";
            run_example(report, example_name, e_values, example_dir);
        }
    } catch (const std::exception& e) {
        report.status = "error";
        report.payload = Json::object();
        report.payload["error"] = e.what();
        report.lines = {std::string("error: ") + e.what()};
    }

    emit(report, as_json);
    return exit_code_for(report.status);
}
