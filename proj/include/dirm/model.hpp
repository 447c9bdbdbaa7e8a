#pragma once

// Deterministic finite automata with a three-way event partition
// (observable / unobservable / releasable), release states and secret
// states. This header owns the model document format and the basic
// transition machinery everything else builds on.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace dirm {

using StateId = std::uint32_t;
using EventId = std::uint32_t;

/// A finite event sequence (string over the alphabet).
using Word = std::vector<EventId>;

/// A canonical state set: sorted, duplicate-free.
using StateSet = std::vector<StateId>;

enum class EventClass { Observable, Unobservable, Releasable };

/// Subset of the three event classes, used to parameterize projections.
struct ClassSet {
    bool observable = false;
    bool unobservable = false;
    bool releasable = false;

    [[nodiscard]] constexpr bool contains(EventClass c) const {
        switch (c) {
            case EventClass::Observable: return observable;
            case EventClass::Unobservable: return unobservable;
            case EventClass::Releasable: return releasable;
        }
        return false;
    }
};

inline constexpr ClassSet observable_only{true, false, false};
inline constexpr ClassSet observable_and_releasable{true, false, true};
inline constexpr ClassSet all_classes{true, true, true};

/// Malformed model document or malformed in-memory model parts.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Semantic misuse of a well-formed model (string not generated,
/// validation errors feeding a construction, ...).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configurable construction cap was hit; distinct from model errors.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Sorted-vector set algebra. All StateSet values in the library are
// kept sorted and unique, so these stay linear.

inline void sort_unique(StateSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool set_contains(const StateSet& s, StateId x) {
    return std::binary_search(s.begin(), s.end(), x);
}

inline bool is_subset(const StateSet& sub, const StateSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

} // namespace detail

/// Plain exchange form of a model, mirroring the document schema.
/// Identifier resolution and well-formedness checks happen in
/// Model::from_data.
struct ModelData {
    std::vector<std::string> states;
    std::vector<std::pair<std::string, EventClass>> events;
    std::string initial;
    std::vector<std::array<std::string, 3>> transitions; // [src, event, dst]
    std::vector<std::string> release_states;
    std::vector<std::string> secret_states;
    bool augmented = false;

    bool operator==(const ModelData&) const = default;
};

/// Immutable DFA with partial transitions. State and event identifiers
/// are opaque non-empty strings; ids are assigned in lexicographic name
/// order, so id-wise ordering coincides with name-wise ordering.
class Model {
public:
    Model() = default;

    static Model from_data(const ModelData& data);

    [[nodiscard]] std::size_t state_count() const { return state_names_.size(); }
    [[nodiscard]] std::size_t event_count() const { return event_names_.size(); }
    [[nodiscard]] std::size_t transition_count() const { return transition_count_; }

    [[nodiscard]] const std::string& state_name(StateId x) const { return state_names_.at(x); }
    [[nodiscard]] const std::string& event_name(EventId e) const { return event_names_.at(e); }
    [[nodiscard]] EventClass event_class(EventId e) const { return event_classes_.at(e); }

    [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const {
        return find_sorted(state_names_, name);
    }
    [[nodiscard]] std::optional<EventId> find_event(std::string_view name) const {
        return find_sorted(event_names_, name);
    }

    [[nodiscard]] StateId initial() const { return initial_; }
    [[nodiscard]] bool is_release(StateId x) const { return release_.at(x); }
    [[nodiscard]] bool is_secret(StateId x) const { return secret_.at(x); }

    [[nodiscard]] StateSet release_states() const { return collect(release_); }
    [[nodiscard]] StateSet secret_states() const { return collect(secret_); }

    /// δ(x, e), or absent when the transition is undefined (blocked).
    [[nodiscard]] std::optional<StateId> step(StateId x, EventId e) const {
        if (e >= event_count()) throw std::out_of_range("unknown event id");
        const auto& post = delta_.at(x);
        if (auto it = post.find(e); it != post.end()) return it->second;
        return std::nullopt;
    }

    /// Extended transition function from an arbitrary state.
    [[nodiscard]] std::optional<StateId> run_from(StateId x, const Word& s) const {
        std::optional<StateId> cur = x;
        for (EventId e : s) {
            cur = step(*cur, e);
            if (!cur) return std::nullopt;
        }
        return cur;
    }

    /// δ(x0, s); run({}) is the initial state.
    [[nodiscard]] std::optional<StateId> run(const Word& s) const { return run_from(initial_, s); }

    [[nodiscard]] const std::map<EventId, StateId>& transitions_from(StateId x) const {
        return delta_.at(x);
    }

    [[nodiscard]] ModelData to_data() const;

    [[nodiscard]] Model with_secret_states(const std::vector<std::string>& names) const {
        ModelData d = to_data();
        d.secret_states = names;
        return from_data(d);
    }

    [[nodiscard]] Model with_release_states(const std::vector<std::string>& names) const {
        ModelData d = to_data();
        d.release_states = names;
        return from_data(d);
    }

    [[nodiscard]] Model with_event_class(const std::string& event, EventClass cls) const {
        ModelData d = to_data();
        for (auto& [name, c] : d.events)
            if (name == event) c = cls;
        return from_data(d);
    }

    bool operator==(const Model&) const = default;

private:
    template <class Names>
    static std::optional<std::uint32_t> find_sorted(const Names& names, std::string_view name) {
        auto it = std::lower_bound(names.begin(), names.end(), name);
        if (it == names.end() || *it != name) return std::nullopt;
        return static_cast<std::uint32_t>(it - names.begin());
    }

    [[nodiscard]] StateSet collect(const std::vector<bool>& member) const {
        StateSet out;
        for (StateId x = 0; x < member.size(); ++x)
            if (member[x]) out.push_back(x);
        return out;
    }

    std::vector<std::string> state_names_;
    std::vector<std::string> event_names_;
    std::vector<EventClass> event_classes_;
    std::vector<std::map<EventId, StateId>> delta_;
    std::vector<bool> release_;
    std::vector<bool> secret_;
    StateId initial_ = 0;
    std::size_t transition_count_ = 0;
};

inline Model Model::from_data(const ModelData& data) {
    Model m;
    if (data.states.empty()) throw ParseError("model declares no states");

    m.state_names_ = data.states;
    std::sort(m.state_names_.begin(), m.state_names_.end());
    for (std::size_t i = 0; i + 1 < m.state_names_.size(); ++i)
        if (m.state_names_[i] == m.state_names_[i + 1])
            throw ParseError("duplicate state '" + m.state_names_[i] + "'");
    for (const auto& name : m.state_names_)
        if (name.empty()) throw ParseError("state identifiers must be non-empty");

    auto events = data.events;
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i + 1 < events.size(); ++i)
        if (events[i].first == events[i + 1].first)
            throw ParseError("event '" + events[i].first +
                             "' declared more than once; the partition assigns exactly one class");
    for (const auto& [name, cls] : events) {
        if (name.empty()) throw ParseError("event identifiers must be non-empty");
        m.event_names_.push_back(name);
        m.event_classes_.push_back(cls);
    }

    auto state_id = [&](const std::string& name, const char* role) {
        auto id = m.find_state(name);
        if (!id) throw ParseError(std::string(role) + " references undeclared state '" + name + "'");
        return *id;
    };

    m.initial_ = state_id(data.initial, "initial");
    m.delta_.resize(m.state_names_.size());
    m.release_.assign(m.state_names_.size(), false);
    m.secret_.assign(m.state_names_.size(), false);

    for (const auto& [src, event, dst] : data.transitions) {
        StateId s = state_id(src, "transition");
        StateId d = state_id(dst, "transition");
        auto e = m.find_event(event);
        if (!e) throw ParseError("transition references undeclared event '" + event + "'");
        auto [it, inserted] = m.delta_[s].emplace(*e, d);
        (void)it;
        if (!inserted)
            throw ParseError("state '" + src + "' has more than one successor on event '" + event +
                             "' (transitions must be deterministic)");
        ++m.transition_count_;
    }

    for (const auto& name : data.release_states) m.release_[state_id(name, "release_states")] = true;
    for (const auto& name : data.secret_states) m.secret_[state_id(name, "secret_states")] = true;
    return m;
}

inline ModelData Model::to_data() const {
    ModelData d;
    d.states = state_names_;
    for (EventId e = 0; e < event_count(); ++e)
        d.events.emplace_back(event_names_[e], event_classes_[e]);
    d.initial = state_names_[initial_];
    for (StateId x = 0; x < state_count(); ++x)
        for (const auto& [e, dst] : delta_[x])
            d.transitions.push_back({state_names_[x], event_names_[e], state_names_[dst]});
    for (StateId x : release_states()) d.release_states.push_back(state_names_[x]);
    for (StateId x : secret_states()) d.secret_states.push_back(state_names_[x]);
    return d;
}

// --- document format --------------------------------------------------------

namespace detail {

inline std::string_view class_token(EventClass c) {
    switch (c) {
        case EventClass::Observable: return "o";
        case EventClass::Unobservable: return "uo";
        case EventClass::Releasable: return "r";
    }
    return "";
}

inline EventClass class_from_token(const std::string& tok, const std::string& event) {
    if (tok == "o") return EventClass::Observable;
    if (tok == "uo") return EventClass::Unobservable;
    if (tok == "r") return EventClass::Releasable;
    throw ParseError("event '" + event + "' has unknown class '" + tok + "' (expected o, uo or r)");
}

inline std::string position_to_line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// SAX pass rejecting duplicate object keys, which the DOM parser would
// silently collapse (a document declaring an event twice must fail).
// Doubles as the syntax check that reports line/column.
class StrictDocumentCheck : public nlohmann::json_sax<nlohmann::json> {
public:
    explicit StrictDocumentCheck(std::string_view text) : text_(text) {}

    bool null() override { return true; }
    bool boolean(bool) override { return true; }
    bool number_integer(number_integer_t) override { return true; }
    bool number_unsigned(number_unsigned_t) override { return true; }
    bool number_float(number_float_t, const string_t&) override { return true; }
    bool string(string_t&) override { return true; }
    bool binary(binary_t&) override { return true; }
    bool start_array(std::size_t) override { return true; }
    bool end_array() override { return true; }

    bool start_object(std::size_t) override {
        scopes_.emplace_back();
        return true;
    }
    bool end_object() override {
        scopes_.pop_back();
        return true;
    }
    bool key(string_t& k) override {
        if (!scopes_.back().insert(k).second)
            throw ParseError("duplicate key '" + k + "' in model document");
        return true;
    }

    bool parse_error(std::size_t position, const std::string& last_token,
                     const nlohmann::detail::exception& ex) override {
        (void)ex;
        throw ParseError("syntax error at " + position_to_line_col(text_, position) +
                         " near '" + last_token + "'");
    }

private:
    std::string_view text_;
    std::vector<std::set<std::string>> scopes_;
};

inline const nlohmann::json& require_field(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw ParseError(std::string("model document is missing required key '") + key + "'");
    return *it;
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    if (!j.is_array()) throw ParseError(std::string("'") + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw ParseError(std::string("'") + key + "' must contain only strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace detail

/// Parses a UTF-8 model document (JSON syntax, schema in README).
inline Model parse_model(std::string_view text) {
    detail::StrictDocumentCheck checker(text);
    nlohmann::json::sax_parse(text, &checker);

    nlohmann::json doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw ParseError("model document must be a JSON object");

    static const std::set<std::string> known = {"states",      "events",         "initial",
                                                "transitions", "release_states", "secret_states",
                                                "augmented"};
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!known.count(key)) throw ParseError("unknown key '" + key + "' in model document");
    }

    ModelData data;
    data.states = detail::string_list(detail::require_field(doc, "states"), "states");

    const auto& events = detail::require_field(doc, "events");
    if (!events.is_object()) throw ParseError("'events' must be an object mapping names to classes");
    for (const auto& [name, cls] : events.items()) {
        if (!cls.is_string()) throw ParseError("event '" + name + "' class must be a string");
        data.events.emplace_back(name, detail::class_from_token(cls.get<std::string>(), name));
    }

    const auto& initial = detail::require_field(doc, "initial");
    if (!initial.is_string()) throw ParseError("'initial' must be a string");
    data.initial = initial.get<std::string>();

    const auto& trans = detail::require_field(doc, "transitions");
    if (!trans.is_array()) throw ParseError("'transitions' must be an array of [src, event, dst]");
    for (const auto& t : trans) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_string() ||
            !t[2].is_string())
            throw ParseError("each transition must be a [src, event, dst] string triple");
        data.transitions.push_back(
            {t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
    }

    data.release_states =
        detail::string_list(detail::require_field(doc, "release_states"), "release_states");
    data.secret_states =
        detail::string_list(detail::require_field(doc, "secret_states"), "secret_states");
    if (auto it = doc.find("augmented"); it != doc.end()) {
        if (!it->is_boolean()) throw ParseError("'augmented' must be a boolean");
        data.augmented = it->get<bool>();
    }
    return Model::from_data(data);
}

/// Canonical document emission: keys in schema order, state and
/// transition lists sorted lexicographically. serialize ∘ parse_model is
/// byte-exact on its own output.
inline std::string serialize(const Model& m, bool augmented = false) {
    nlohmann::ordered_json doc;
    ModelData d = m.to_data(); // already canonically sorted

    doc["states"] = d.states;
    nlohmann::ordered_json events = nlohmann::ordered_json::object();
    for (const auto& [name, cls] : d.events) events[name] = detail::class_token(cls);
    doc["events"] = events;
    doc["initial"] = d.initial;
    nlohmann::ordered_json trans = nlohmann::ordered_json::array();
    for (const auto& [src, event, dst] : d.transitions)
        trans.push_back(nlohmann::ordered_json::array({src, event, dst}));
    doc["transitions"] = trans;
    doc["release_states"] = d.release_states;
    doc["secret_states"] = d.secret_states;
    if (augmented) doc["augmented"] = true;
    return doc.dump(2) + "\n";
}

// --- validation ---------------------------------------------------------

struct Finding {
    enum class Severity { Error, Warning, Info };
    Severity severity;
    std::string code;
    std::string message;

    bool operator==(const Finding&) const = default;
};

struct ValidationReport {
    std::vector<Finding> findings;

    [[nodiscard]] bool empty() const { return findings.empty(); }
    [[nodiscard]] bool has_errors() const {
        return std::any_of(findings.begin(), findings.end(),
                           [](const Finding& f) { return f.severity == Finding::Severity::Error; });
    }
};

struct ValidateOptions {
    /// Suppress the immediate-release warning. The constructions handle
    /// releasable events that land directly in a release state, so the
    /// finding is advisory; this silences it for models that use the
    /// pattern deliberately.
    bool allow_immediate_release = false;
};

/// Reports every violated model invariant. Shape-level problems
/// (duplicates, dangling references, nondeterminism) are rejected at
/// construction and cannot appear here.
inline ValidationReport validate(const Model& m, ValidateOptions opts = {}) {
    ValidationReport report;

    bool all_secret = m.state_count() > 0;
    for (StateId x = 0; x < m.state_count(); ++x)
        if (!m.is_secret(x)) all_secret = false;
    if (all_secret)
        report.findings.push_back({Finding::Severity::Error, "secret-not-strict-subset",
                                   "every state is secret; the secret set must be a strict subset "
                                   "of the state set"});

    if (!opts.allow_immediate_release) {
        for (StateId x = 0; x < m.state_count(); ++x) {
            for (const auto& [e, dst] : m.transitions_from(x)) {
                if (m.event_class(e) == EventClass::Releasable && m.is_release(dst))
                    report.findings.push_back(
                        {Finding::Severity::Warning, "immediate-release",
                         "transition ('" + m.state_name(x) + "', '" + m.event_name(e) + "', '" +
                             m.state_name(dst) +
                             "') releases the event at the instant it occurs"});
            }
        }
    }

    if (m.is_release(m.initial()))
        report.findings.push_back({Finding::Severity::Info, "initial-release-state",
                                   "initial state '" + m.state_name(m.initial()) +
                                       "' is a release state; the empty history releases nothing"});
    return report;
}

// --- names and printing -------------------------------------------------

/// Parses a comma-separated event-name list; the empty string is the
/// empty word.
inline Word parse_word(const Model& m, std::string_view csv) {
    Word w;
    if (csv.empty()) return w;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = csv.find(',', pos);
        std::string name(csv.substr(pos, comma == std::string_view::npos ? comma : comma - pos));
        auto e = m.find_event(name);
        if (!e) throw ParseError("unknown event '" + name + "'");
        w.push_back(*e);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return w;
}

inline std::vector<std::string> event_names(const Model& m, const Word& w) {
    std::vector<std::string> out;
    out.reserve(w.size());
    for (EventId e : w) out.push_back(m.event_name(e));
    return out;
}

/// "h.a.h"; the empty word prints as "eps".
inline std::string format_word(const Model& m, const Word& w) {
    if (w.empty()) return "eps";
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += '.';
        out += m.event_name(w[i]);
    }
    return out;
}

/// "{0N, 1N}"; ordering follows state ids, i.e. lexicographic names.
inline std::string format_state_set(const Model& m, const StateSet& q) {
    std::string out = "{";
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) out += ", ";
        out += m.state_name(q[i]);
    }
    out += "}";
    return out;
}

} // namespace dirm
