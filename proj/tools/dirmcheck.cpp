// Command-line front end for the opacity checker: validation,
// projection and history queries, augmentation, estimator construction,
// verification, brute-force cross-checks and DOT export.
//
// Exit codes: 0 success (verify: opaque), 1 verify: violated or
// oracle-check: mismatches, 2 invalid model or arguments, 3 resource
// cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dirm/augment.hpp"
#include "dirm/model.hpp"
#include "dirm/observer.hpp"
#include "dirm/semantics.hpp"
#include "dirm/verify.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw dirm::ParseError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw dirm::ParseError("cannot write to '" + path + "'");
    out << content;
}

const char* severity_token(dirm::Finding::Severity s) {
    switch (s) {
        case dirm::Finding::Severity::Error: return "error";
        case dirm::Finding::Severity::Warning: return "warning";
        case dirm::Finding::Severity::Info: return "info";
    }
    return "";
}

// Non-validate subcommands surface findings on stderr so stdout stays a
// clean, reproducible result stream.
dirm::Model load_model(const std::string& path, bool allow_immediate_release) {
    dirm::Model m = dirm::parse_model(read_file(path));
    auto report = dirm::validate(m, {allow_immediate_release});
    for (const auto& f : report.findings)
        std::cerr << severity_token(f.severity) << ": " << f.message << "\n";
    if (report.has_errors()) throw dirm::ModelError("model does not validate");
    return m;
}

int cmd_validate(const std::string& path, bool json, bool allow) {
    dirm::Model m = dirm::parse_model(read_file(path));
    auto report = dirm::validate(m, {allow});
    if (json) {
        nlohmann::ordered_json j;
        j["findings"] = nlohmann::ordered_json::array();
        for (const auto& f : report.findings)
            j["findings"].push_back({{"severity", severity_token(f.severity)},
                                     {"code", f.code},
                                     {"message", f.message}});
        std::cout << j.dump(2) << "\n";
    } else if (report.empty()) {
        std::cout << "ok\n";
    } else {
        for (const auto& f : report.findings)
            std::cout << severity_token(f.severity) << ": " << f.message << "\n";
    }
    return report.has_errors() ? 2 : 0;
}

int cmd_verify(const std::string& path, bool json, std::size_t cap, bool allow) {
    dirm::Model m = load_model(path, allow);
    dirm::Verdict v = dirm::verify_opacity(m, {cap, false});
    if (json) {
        std::cout << dirm::to_json(v).dump(2) << "\n";
    } else {
        std::cout << "status: " << (v.status == dirm::Status::Opaque ? "opaque" : "violated")
                  << "\n";
        if (v.witness) {
            std::string joined;
            for (std::size_t i = 0; i < v.witness->size(); ++i)
                joined += (i ? "." : "") + (*v.witness)[i];
            if (joined.empty()) joined = "eps";
            std::cout << "witness: " << joined << "\n";
            std::cout << "observation: " << *v.observation << "\n";
            std::cout << "history: {";
            for (std::size_t i = 0; i < v.history->size(); ++i)
                std::cout << (i ? ", " : "") << (*v.history)[i];
            std::cout << "}\n";
            std::cout << "estimate: {";
            for (std::size_t i = 0; i < v.estimate->size(); ++i)
                std::cout << (i ? ", " : "") << (*v.estimate)[i];
            std::cout << "}\n";
        }
        std::cout << "augmented_states: " << v.stats.augmented_states << "\n"
                  << "observer_states: " << v.stats.observer_states << "\n"
                  << "observer_transitions: " << v.stats.observer_transitions << "\n";
    }
    return v.status == dirm::Status::Opaque ? 0 : 1;
}

int cmd_oracle_check(const std::string& path, std::size_t bound, std::size_t cap, bool allow) {
    dirm::Model m = load_model(path, allow);
    dirm::CrosscheckReport report = dirm::crosscheck_bruteforce(m, bound, cap);
    std::cout << "words_checked: " << report.words_checked << "\n"
              << "mismatches: " << report.mismatches.size() << "\n";
    for (const auto& e : report.mismatches) {
        dirm::Word w = e.word;
        std::cout << "mismatch: word=" << dirm::format_word(m, w)
                  << " oracle=" << dirm::format_state_set(m, e.oracle)
                  << " estimate=" << dirm::format_state_set(m, e.estimate_base)
                  << " containment=" << (e.oracle_contained ? "ok" : "VIOLATED")
                  << " secrecy=" << (e.secrecy_agrees ? "agrees" : "DISAGREES") << "\n";
    }
    return report.clean() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"current-state opacity checker for finite systems with "
                 "state-dependent information release"};
    app.require_subcommand(1);

    std::string model_path;
    std::string word_csv;
    std::string dot_path;
    std::size_t bound = 6;
    std::size_t cap = 1'000'000;
    bool json = false;
    bool allow_release = false;

    auto add_common = [&](CLI::App* cmd, bool with_cap) {
        cmd->add_option("model", model_path, "model document")->required();
        cmd->add_flag("--allow-immediate-release", allow_release,
                      "silence the immediate-release warning");
        if (with_cap)
            cmd->add_option("--max-observer-states", cap, "observer construction cap");
    };

    auto* validate = app.add_subcommand("validate", "report violated model invariants");
    add_common(validate, false);
    validate->add_flag("--json", json, "machine-readable output");

    auto* project = app.add_subcommand("project", "projected observation of a word");
    add_common(project, false);
    project->add_option("--string", word_csv, "comma-separated event names ('' for the empty word)")
        ->required();

    auto* hist = app.add_subcommand("history", "observation history of a word");
    add_common(hist, false);
    hist->add_option("--string", word_csv, "comma-separated event names")->required();

    auto* est = app.add_subcommand("estimate", "observer's current-state estimate after a word");
    add_common(est, false);
    est->add_option("--string", word_csv, "comma-separated event names")->required();
    est->add_flag("--json", json, "machine-readable output");

    auto* aug_cmd = app.add_subcommand("augment", "emit the augmented system document");
    add_common(aug_cmd, false);

    auto* obs_cmd = app.add_subcommand("observer", "build the estimator and report sizes");
    add_common(obs_cmd, true);
    obs_cmd->add_option("--dot", dot_path, "also write a Graphviz rendering to this path");

    auto* verify = app.add_subcommand("verify", "decide current-state opacity");
    add_common(verify, true);
    verify->add_flag("--json", json, "machine-readable output");

    auto* oracle = app.add_subcommand("oracle-check", "cross-check estimates against brute force");
    add_common(oracle, true);
    oracle->add_option("--bound", bound, "word-length bound for the enumeration");

    auto* dot_cmd = app.add_subcommand("export-dot", "Graphviz rendering of the estimator");
    add_common(dot_cmd, true);
    dot_cmd->add_option("--dot", dot_path, "output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(model_path, json, allow_release);

        if (app.got_subcommand(project)) {
            dirm::Model m = load_model(model_path, allow_release);
            dirm::Word w = dirm::parse_word(m, word_csv);
            std::cout << dirm::format_word(m, dirm::dirm_projection(m, w)) << "\n";
            return 0;
        }
        if (app.got_subcommand(hist)) {
            dirm::Model m = load_model(model_path, allow_release);
            dirm::Word w = dirm::parse_word(m, word_csv);
            std::cout << dirm::format_history(m, dirm::history(m, w)) << "\n";
            return 0;
        }
        if (app.got_subcommand(est)) {
            dirm::Model m = load_model(model_path, allow_release);
            dirm::Word w = dirm::parse_word(m, word_csv);
            dirm::AugModel aug = dirm::augment(m);
            dirm::StateSet e = dirm::estimate(aug, w);
            if (json) {
                nlohmann::ordered_json j;
                j["estimate"] = nlohmann::ordered_json::array();
                for (dirm::StateId x : e) j["estimate"].push_back(aug.automaton.state_name(x));
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << dirm::format_state_set(aug.automaton, e) << "\n";
            }
            return 0;
        }
        if (app.got_subcommand(aug_cmd)) {
            dirm::Model m = load_model(model_path, allow_release);
            std::cout << dirm::serialize(dirm::augment(m));
            return 0;
        }
        if (app.got_subcommand(obs_cmd)) {
            dirm::Model m = load_model(model_path, allow_release);
            dirm::AugModel aug = dirm::augment(m);
            dirm::ObserverAutomaton obs = dirm::build_observer(aug, {cap, false});
            std::cout << "augmented_states: " << aug.automaton.state_count() << "\n"
                      << "observer_states: " << obs.state_count() << "\n"
                      << "observer_transitions: " << obs.transition_count() << "\n";
            if (!dot_path.empty()) write_file(dot_path, dirm::to_dot(obs));
            return 0;
        }
        if (app.got_subcommand(verify)) return cmd_verify(model_path, json, cap, allow_release);
        if (app.got_subcommand(oracle)) return cmd_oracle_check(model_path, bound, cap, allow_release);
        if (app.got_subcommand(dot_cmd)) {
            dirm::Model m = load_model(model_path, allow_release);
            dirm::ObserverAutomaton obs = dirm::build_observer(dirm::augment(m), {cap, false});
            std::string dot = dirm::to_dot(obs);
            if (dot_path.empty())
                std::cout << dot;
            else
                write_file(dot_path, dot);
            return 0;
        }
    } catch (const dirm::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
