#pragma once

// The three-component estimator: each state pairs the actual refined
// plant state with two estimate sets, one assuming releasable events
// are seen instantly (the high view) and one tracking what an outside
// observer has actually seen so far (the low view). When a transition
// lands in a lifted release state the withheld information becomes
// public and the low estimate is overwritten from the high side's
// intermediate estimate.

#include <compare>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirm/augment.hpp"
#include "dirm/model.hpp"

namespace dirm {

enum class View { High, Low };

/// Whether the occurrence of e at refined state x is visible in the
/// given view: instantly visible events are observable ones (plus
/// releasable ones in the high view), and any event whose target is a
/// lifted release state is visible because it triggers a release.
/// False when the transition is undefined.
inline bool observes(const AugModel& am, StateId x, EventId e, View view) {
    auto t = am.automaton.step(x, e);
    if (!t) return false;
    switch (am.automaton.event_class(e)) {
        case EventClass::Observable: return true;
        case EventClass::Releasable:
            if (view == View::High) return true;
            break;
        case EventClass::Unobservable: break;
    }
    return am.automaton.is_release(*t);
}

inline std::vector<EventId> high_obs_events(const AugModel& am, StateId x) {
    std::vector<EventId> out;
    for (const auto& [e, dst] : am.automaton.transitions_from(x)) {
        (void)dst;
        if (observes(am, x, e, View::High)) out.push_back(e);
    }
    return out;
}

inline std::vector<EventId> low_obs_events(const AugModel& am, StateId x) {
    std::vector<EventId> out;
    for (const auto& [e, dst] : am.automaton.transitions_from(x)) {
        (void)dst;
        if (observes(am, x, e, View::Low)) out.push_back(e);
    }
    return out;
}

/// Least fixpoint containing q and closed under transitions invisible
/// in the given view. No closed form exists because visibility is
/// state-dependent; a worklist does it.
inline StateSet unobservable_reach(const AugModel& am, StateSet q, View view) {
    std::vector<char> mark(am.automaton.state_count(), 0);
    std::deque<StateId> work(q.begin(), q.end());
    for (StateId x : q) mark[x] = 1;
    while (!work.empty()) {
        StateId x = work.front();
        work.pop_front();
        for (const auto& [e, dst] : am.automaton.transitions_from(x)) {
            if (!observes(am, x, e, view) && !mark[dst]) {
                mark[dst] = 1;
                work.push_back(dst);
            }
        }
    }
    StateSet out;
    for (StateId x = 0; x < mark.size(); ++x)
        if (mark[x]) out.push_back(x);
    return out;
}

/// The three kinds of one-observation moves: a plain event occurrence
/// (target must not release), a release triggered by some unobservable
/// event, and an event occurrence that releases at the same instant.
enum class ReachKind { OnEvent, ReleaseOnly, EventAndRelease };

inline StateSet observable_reach(const AugModel& am, const StateSet& q, ReachKind kind,
                                 std::optional<EventId> event = std::nullopt) {
    if (kind != ReachKind::ReleaseOnly && !event)
        throw std::invalid_argument("observable_reach: this reach kind needs an event");
    StateSet out;
    for (StateId x : q) {
        switch (kind) {
            case ReachKind::OnEvent:
                if (auto t = am.automaton.step(x, *event); t && !am.automaton.is_release(*t))
                    out.push_back(*t);
                break;
            case ReachKind::EventAndRelease:
                if (auto t = am.automaton.step(x, *event); t && am.automaton.is_release(*t))
                    out.push_back(*t);
                break;
            case ReachKind::ReleaseOnly:
                for (const auto& [e, dst] : am.automaton.transitions_from(x))
                    if (am.automaton.event_class(e) == EventClass::Unobservable &&
                        am.automaton.is_release(dst))
                        out.push_back(dst);
                break;
        }
    }
    detail::sort_unique(out);
    return out;
}

/// Intermediate high-side estimate after observing e land in `target`.
/// Only consulted when the high view observes; the leftover combination
/// (unobservable event, non-release target) is invisible by definition
/// and trips the logic_error.
inline StateSet mid_estimate(const AugModel& am, const StateSet& high_q, EventId e,
                             StateId target) {
    bool releases = am.automaton.is_release(target);
    bool instant = am.automaton.event_class(e) != EventClass::Unobservable;
    if (instant && !releases) return observable_reach(am, high_q, ReachKind::OnEvent, e);
    if (!instant && releases) return observable_reach(am, high_q, ReachKind::ReleaseOnly);
    if (instant && releases) return observable_reach(am, high_q, ReachKind::EventAndRelease, e);
    throw std::logic_error("mid_estimate consulted for a transition invisible to the high view");
}

/// (actual refined state, high estimate, low estimate). The low
/// estimate is the outside observer's current-state estimate.
struct ObserverState {
    StateId actual = 0;
    StateSet high_estimate;
    StateSet low_estimate;

    friend auto operator<=>(const ObserverState&, const ObserverState&) = default;
};

inline ObserverState observer_initial(const AugModel& am) {
    StateId x0 = am.automaton.initial();
    return {x0, unobservable_reach(am, {x0}, View::High),
            unobservable_reach(am, {x0}, View::Low)};
}

/// One estimator move. Defined exactly where the refined plant moves.
///
/// high':  unchanged when the high view sees nothing, else the high
///         closure of the intermediate estimate.
/// low':   unchanged when the observer sees nothing; on a plain
///         observation, the low closure of the event move; when the
///         target releases, switched to the low closure of the
///         intermediate estimate — the released information overwrites
///         what the observer believed so far.
inline std::optional<ObserverState> observer_step(const AugModel& am, const ObserverState& from,
                                                  EventId e) {
    auto target = am.automaton.step(from.actual, e);
    if (!target) return std::nullopt;

    bool high_sees = observes(am, from.actual, e, View::High);
    bool low_sees = observes(am, from.actual, e, View::Low);

    StateSet mid; // shared by both components, computed once
    if (high_sees) mid = mid_estimate(am, from.high_estimate, e, *target);

    ObserverState next;
    next.actual = *target;
    next.high_estimate =
        high_sees ? unobservable_reach(am, mid, View::High) : from.high_estimate;

    if (!low_sees) {
        next.low_estimate = from.low_estimate;
    } else if (!am.automaton.is_release(*target)) {
        next.low_estimate = unobservable_reach(
            am, observable_reach(am, from.low_estimate, ReachKind::OnEvent, e), View::Low);
    } else {
        next.low_estimate = unobservable_reach(am, mid, View::Low);
    }

    if (!detail::set_contains(next.low_estimate, next.actual) ||
        !detail::set_contains(next.high_estimate, next.actual))
        throw std::logic_error("estimator lost track of the actual state");
    return next;
}

struct ObserverOptions {
    std::size_t max_states = 1'000'000;
    /// Stop expanding once a state whose low estimate is entirely secret
    /// has been discovered (enough for a verdict plus shortest witness).
    bool stop_on_full_secret = false;
};

class ObserverAutomaton {
public:
    [[nodiscard]] std::size_t state_count() const { return states_.size(); }
    [[nodiscard]] std::size_t transition_count() const { return transition_count_; }
    [[nodiscard]] std::size_t initial_index() const { return 0; }
    [[nodiscard]] const ObserverState& state(std::size_t i) const { return states_.at(i); }
    [[nodiscard]] const AugModel& augmented() const { return aug_; }
    [[nodiscard]] bool complete() const { return complete_; }

    [[nodiscard]] std::optional<std::size_t> step_index(std::size_t from, EventId e) const {
        const auto& post = transitions_.at(from);
        if (auto it = post.find(e); it != post.end()) return it->second;
        return std::nullopt;
    }

    [[nodiscard]] const std::map<EventId, std::size_t>& transitions_from(std::size_t i) const {
        return transitions_.at(i);
    }

    /// Lexicographically least shortest word reaching state i (breadth
    /// first discovery path).
    [[nodiscard]] Word path_to(std::size_t i) const {
        Word w;
        while (i != 0) {
            const auto& [parent, via] = parents_.at(i);
            w.push_back(via);
            i = parent;
        }
        std::reverse(w.begin(), w.end());
        return w;
    }

private:
    friend ObserverAutomaton build_observer(const AugModel&, ObserverOptions);

    AugModel aug_;
    std::vector<ObserverState> states_;
    std::vector<std::map<EventId, std::size_t>> transitions_;
    std::vector<std::pair<std::size_t, EventId>> parents_; // discovery edge, [0] unused
    std::size_t transition_count_ = 0;
    bool complete_ = true;
};

/// Breadth-first closure of observer_step from the initial triple,
/// merging structurally equal triples. Deterministic: the frontier is a
/// FIFO and events are explored in ascending id (= name) order. Throws
/// ResourceLimitError on hitting the state cap.
inline ObserverAutomaton build_observer(const AugModel& am, ObserverOptions opts = {}) {
    ObserverAutomaton obs;
    obs.aug_ = am;

    std::map<ObserverState, std::size_t> index;
    std::deque<std::size_t> queue;

    const StateSet secret = am.automaton.secret_states();
    bool stop = false;

    auto add_state = [&](ObserverState s, std::size_t parent, EventId via) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        if (obs.states_.size() >= opts.max_states)
            throw ResourceLimitError("observer exceeded the cap of " +
                                     std::to_string(opts.max_states) + " states");
        std::size_t id = obs.states_.size();
        index.emplace(s, id);
        if (opts.stop_on_full_secret && !s.low_estimate.empty() &&
            detail::is_subset(s.low_estimate, secret))
            stop = true;
        obs.states_.push_back(std::move(s));
        obs.transitions_.emplace_back();
        obs.parents_.emplace_back(parent, via);
        queue.push_back(id);
        return id;
    };

    add_state(observer_initial(am), 0, 0);

    while (!queue.empty() && !stop) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (const auto& [e, dst] : am.automaton.transitions_from(obs.states_[cur].actual)) {
            (void)dst;
            auto next = observer_step(am, obs.states_[cur], e);
            std::size_t id = add_state(std::move(*next), cur, e);
            obs.transitions_[cur].emplace(e, id);
            ++obs.transition_count_;
            if (stop) break;
        }
    }
    obs.complete_ = queue.empty() && !stop;
    return obs;
}

/// The low estimate reached by s: the outside observer's current-state
/// estimate after the information flow of s. Throws when s is not
/// generated.
inline StateSet estimate(const ObserverAutomaton& obs, const Word& s) {
    std::size_t cur = obs.initial_index();
    for (EventId e : s) {
        auto next = obs.step_index(cur, e);
        if (!next) throw ModelError("string is not generated by the model");
        cur = *next;
    }
    return obs.state(cur).low_estimate;
}

/// Same estimate computed by walking the update equations directly,
/// without materializing the whole estimator.
inline StateSet estimate(const AugModel& am, const Word& s) {
    ObserverState cur = observer_initial(am);
    for (EventId e : s) {
        auto next = observer_step(am, cur, e);
        if (!next) throw ModelError("string is not generated by the model");
        cur = std::move(*next);
    }
    return cur.low_estimate;
}

/// Shortest word reaching a state whose low estimate lies entirely
/// inside `secret`; ties resolved lexicographically by event name.
/// Absent when no reachable state qualifies.
inline std::optional<Word> find_witness(const ObserverAutomaton& obs, const StateSet& secret) {
    for (std::size_t i = 0; i < obs.state_count(); ++i) {
        const auto& low = obs.state(i).low_estimate;
        if (!low.empty() && detail::is_subset(low, secret)) return obs.path_to(i);
    }
    return std::nullopt;
}

/// Graphviz rendering; nodes show the triple, fully secret estimates
/// are double-circled, node order follows discovery order.
inline std::string to_dot(const ObserverAutomaton& obs) {
    const Model& a = obs.augmented().automaton;
    const StateSet secret = a.secret_states();
    std::string out = "digraph observer {\n  rankdir=LR;\n  node [shape=circle];\n"
                      "  init [shape=point];\n  init -> n0;\n";
    for (std::size_t i = 0; i < obs.state_count(); ++i) {
        const ObserverState& s = obs.state(i);
        std::string high = format_state_set(a, s.high_estimate);
        std::string low = format_state_set(a, s.low_estimate);
        bool violating = !s.low_estimate.empty() && detail::is_subset(s.low_estimate, secret);
        out += "  n" + std::to_string(i) + " [label=\"" + a.state_name(s.actual) + " | " + high +
               " | " + low + "\"" + (violating ? ", shape=doublecircle" : "") + "];\n";
    }
    for (std::size_t i = 0; i < obs.state_count(); ++i)
        for (const auto& [e, dst] : obs.transitions_from(i))
            out += "  n" + std::to_string(i) + " -> n" + std::to_string(dst) + " [label=\"" +
                   a.event_name(e) + "\"];\n";
    out += "}\n";
    return out;
}

} // namespace dirm
