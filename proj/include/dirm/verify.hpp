#pragma once

// Opacity verdicts: the system is opaque iff no reachable estimator
// state has a fully secret low estimate. Violations come with the
// shortest witness word, its observation, its history and the
// offending estimate, plus a brute-force cross-check for small models.

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirm/augment.hpp"
#include "dirm/model.hpp"
#include "dirm/observer.hpp"
#include "dirm/semantics.hpp"

namespace dirm {

enum class Status { Opaque, Violated };

struct VerifyStats {
    std::size_t augmented_states = 0;
    std::size_t observer_states = 0;
    std::size_t observer_transitions = 0;
    bool observer_complete = true;
    double build_ms = 0.0; // never serialized; outputs must be reproducible

    bool operator==(const VerifyStats& o) const {
        return augmented_states == o.augmented_states && observer_states == o.observer_states &&
               observer_transitions == o.observer_transitions;
    }
};

struct Verdict {
    Status status = Status::Opaque;
    std::optional<std::vector<std::string>> witness;   // event names, shortest violating word
    std::optional<std::string> observation;            // its projected information flow
    std::optional<std::vector<std::string>> history;   // formatted, (length, lex) order
    std::optional<std::vector<std::string>> estimate;  // refined state names, fully secret
    VerifyStats stats;

    bool operator==(const Verdict&) const = default;
};

struct VerifyOptions {
    std::size_t max_observer_states = 1'000'000;
    /// Build the whole estimator even after a violation is found (for
    /// exports); the verdict itself only needs reachability of one
    /// violating state.
    bool full_observer = false;
};

inline Verdict verify_opacity(const Model& m, VerifyOptions opts = {}) {
    if (validate(m).has_errors())
        throw ModelError("model does not validate; fix the reported errors first");

    auto start = std::chrono::steady_clock::now();
    AugModel aug = augment(m);
    ObserverAutomaton obs =
        build_observer(aug, {opts.max_observer_states, !opts.full_observer});
    auto witness = find_witness(obs, aug.automaton.secret_states());

    Verdict v;
    v.stats.augmented_states = aug.automaton.state_count();
    v.stats.observer_states = obs.state_count();
    v.stats.observer_transitions = obs.transition_count();
    v.stats.observer_complete = obs.complete();

    if (witness) {
        v.status = Status::Violated;
        v.witness = event_names(m, *witness);
        v.observation = format_word(m, dirm_projection(m, *witness));
        History h = history(m, *witness);
        std::vector<std::string> formatted;
        formatted.reserve(h.items.size());
        for (const Word& w : h.items) formatted.push_back(format_word(m, w));
        v.history = std::move(formatted);
        StateSet est = estimate(obs, *witness);
        std::vector<std::string> names;
        names.reserve(est.size());
        for (StateId x : est) names.push_back(aug.automaton.state_name(x));
        v.estimate = std::move(names);
    }

    v.stats.build_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return v;
}

inline nlohmann::ordered_json to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["status"] = v.status == Status::Opaque ? "opaque" : "violated";
    if (v.witness) j["witness"] = *v.witness;
    if (v.observation) j["observation"] = *v.observation;
    if (v.history) j["history"] = *v.history;
    if (v.estimate) j["estimate"] = *v.estimate;
    j["stats"] = {{"augmented_states", v.stats.augmented_states},
                  {"observer_states", v.stats.observer_states},
                  {"observer_transitions", v.stats.observer_transitions}};
    return j;
}

inline Verdict verdict_from_json(const nlohmann::json& j) {
    Verdict v;
    std::string status = j.at("status").get<std::string>();
    if (status == "opaque")
        v.status = Status::Opaque;
    else if (status == "violated")
        v.status = Status::Violated;
    else
        throw ParseError("unknown verdict status '" + status + "'");
    if (j.contains("witness")) v.witness = j["witness"].get<std::vector<std::string>>();
    if (j.contains("observation")) v.observation = j["observation"].get<std::string>();
    if (j.contains("history")) v.history = j["history"].get<std::vector<std::string>>();
    if (j.contains("estimate")) v.estimate = j["estimate"].get<std::vector<std::string>>();
    const auto& stats = j.at("stats");
    v.stats.augmented_states = stats.at("augmented_states").get<std::size_t>();
    v.stats.observer_states = stats.at("observer_states").get<std::size_t>();
    v.stats.observer_transitions = stats.at("observer_transitions").get<std::size_t>();
    return v;
}

// --- brute-force cross-check ----------------------------------------------

struct CrosscheckMismatch {
    Word word;
    StateSet oracle;        // exhaustive estimate, source states
    StateSet estimate_base; // estimator's low estimate projected to source states
    bool oracle_contained = false; // oracle ⊆ estimate (false is always a bug)
    bool secrecy_agrees = false;   // both sides agree on "entirely secret"
};

struct CrosscheckReport {
    std::size_t words_checked = 0;
    std::vector<CrosscheckMismatch> mismatches;

    [[nodiscard]] bool clean() const { return mismatches.empty(); }
    /// True when every oracle estimate is contained in the estimator's.
    /// Set inequality in the other direction is expected on cyclic
    /// models whose history-equivalent words outrun the bound.
    [[nodiscard]] bool containment_ok() const {
        return std::all_of(mismatches.begin(), mismatches.end(),
                           [](const CrosscheckMismatch& e) { return e.oracle_contained; });
    }
};

/// Replays every generated word up to `bound` and compares the
/// exhaustive estimate with the estimator's, both as sets of source
/// states and on the "entirely secret" verdict. Exact (so an empty
/// report is expected) whenever the bound covers all generated words.
inline CrosscheckReport crosscheck_bruteforce(const Model& m, std::size_t bound,
                                              std::size_t max_observer_states = 1'000'000) {
    AugModel aug = augment(m);
    ObserverAutomaton obs = build_observer(aug, {max_observer_states, false});

    std::vector<std::pair<Word, StateId>> words;
    for_each_generated_word(m, bound,
                            [&](const Word& w, StateId end) { words.emplace_back(w, end); });

    // One enumeration pass groups end states by history; looking a word's
    // history up in the table equals running the single-word oracle on it.
    std::map<History, StateSet> estimate_by_history;
    for (const auto& [w, end] : words) estimate_by_history[history(m, w)].push_back(end);
    for (auto& [h, states] : estimate_by_history) detail::sort_unique(states);

    CrosscheckReport report;
    const StateSet secret = m.secret_states();
    for (const auto& [w, end] : words) {
        (void)end;
        ++report.words_checked;
        const StateSet& oracle = estimate_by_history.at(history(m, w));
        StateSet est = aug.project(estimate(obs, w));
        bool contained = detail::is_subset(oracle, est);
        bool secrecy = (detail::is_subset(oracle, secret) == detail::is_subset(est, secret));
        if (oracle != est || !secrecy)
            report.mismatches.push_back({w, oracle, est, contained, secrecy});
    }
    return report;
}

} // namespace dirm
