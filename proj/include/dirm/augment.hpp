#pragma once

// State-space refinement that tracks whether withheld releasable events
// are pending: each plant state is paired with a binary flag (printed Y
// or N), release states are lifted to the flagged copies that can
// actually release something, and secret states to both copies.

#include <cassert>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirm/model.hpp"

namespace dirm {

/// The refined plant. `automaton` is a full Model over states named
/// "<base><flag>" (e.g. "1Y") whose release set is the lifted one, so
/// every projection/history/observer operation applies to it unchanged.
struct AugModel {
    Model automaton;
    std::vector<StateId> base;    // per refined state: source state id
    std::vector<bool> pending;    // per refined state: flag is Y

    [[nodiscard]] StateId base_of(StateId aug_state) const { return base.at(aug_state); }
    [[nodiscard]] bool pending_of(StateId aug_state) const { return pending.at(aug_state); }

    /// Projects a set of refined states to the source state set.
    [[nodiscard]] StateSet project(const StateSet& q) const {
        StateSet out;
        out.reserve(q.size());
        for (StateId x : q) out.push_back(base.at(x));
        detail::sort_unique(out);
        return out;
    }
};

/// Builds the reachable refinement of `m`. The successor flag is Y iff
/// the event is releasable or the source state is a non-release state
/// already flagged Y; leaving a release state on a non-releasable event
/// resets the flag. Throws ModelError when validation reports errors.
inline AugModel augment(const Model& m) {
    if (validate(m).has_errors())
        throw ModelError("model does not validate; refusing to build the augmented system");

    struct Pending {
        StateId state;
        bool flag;
    };
    auto key = [](StateId s, bool f) { return (static_cast<std::uint64_t>(s) << 1) | (f ? 1 : 0); };

    std::map<std::uint64_t, bool> discovered;
    std::deque<Pending> queue;
    auto discover = [&](StateId s, bool f) {
        if (discovered.emplace(key(s, f), true).second) queue.push_back({s, f});
    };
    discover(m.initial(), false);

    auto aug_name = [&](StateId s, bool f) { return m.state_name(s) + (f ? "Y" : "N"); };

    ModelData data;
    data.augmented = true;
    for (EventId e = 0; e < m.event_count(); ++e)
        data.events.emplace_back(m.event_name(e), m.event_class(e));
    data.initial = aug_name(m.initial(), false);

    while (!queue.empty()) {
        auto [x, flag] = queue.front();
        queue.pop_front();
        data.states.push_back(aug_name(x, flag));
        if (m.is_release(x) && flag) data.release_states.push_back(aug_name(x, flag));
        if (m.is_secret(x)) data.secret_states.push_back(aug_name(x, flag));
        for (const auto& [e, dst] : m.transitions_from(x)) {
            bool next_flag =
                m.event_class(e) == EventClass::Releasable || (!m.is_release(x) && flag);
            data.transitions.push_back({aug_name(x, flag), m.event_name(e), aug_name(dst, next_flag)});
            discover(dst, next_flag);
        }
    }

    AugModel aug;
    aug.automaton = Model::from_data(data);
    assert(aug.automaton.state_count() <= 2 * m.state_count());

    aug.base.resize(aug.automaton.state_count());
    aug.pending.resize(aug.automaton.state_count());
    for (StateId x = 0; x < aug.automaton.state_count(); ++x) {
        const std::string& name = aug.automaton.state_name(x);
        aug.pending[x] = name.back() == 'Y';
        auto src = m.find_state(std::string_view(name).substr(0, name.size() - 1));
        assert(src);
        aug.base[x] = *src;
    }
    return aug;
}

inline std::optional<StateId> augmented_step(const AugModel& am, StateId aug_state, EventId e) {
    return am.automaton.step(aug_state, e);
}

/// Same document format as the source model, with an "augmented" marker.
inline std::string serialize(const AugModel& am) { return serialize(am.automaton, true); }

} // namespace dirm
