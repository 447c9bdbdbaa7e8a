#pragma once

// Ground-truth semantics of the state-dependent release mechanism:
// release instants, the release-aware projection, observation histories,
// and a brute-force current-state-estimate oracle. Everything here is a
// pure function of an immutable model and favors transparency over
// speed; the observer module is the fast path.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dirm/model.hpp"

namespace dirm {

/// Removes every event whose class is outside `keep`; order preserved.
inline Word natural_projection(const Model& m, const Word& s, ClassSet keep) {
    Word out;
    for (EventId e : s)
        if (keep.contains(m.event_class(e))) out.push_back(e);
    return out;
}

namespace detail {

inline StateId require_run(const Model& m, const Word& s) {
    auto x = m.run(s);
    if (!x) throw ModelError("string is not generated by the model");
    return *x;
}

} // namespace detail

/// Latest instant 0 <= i <= |s| at which a prefix of s sits in a release
/// state; 0 when no nonempty prefix does. Throws if s is not generated.
inline std::size_t release_instant(const Model& m, const Word& s) {
    detail::require_run(m, s);
    std::size_t instant = 0;
    StateId x = m.initial();
    for (std::size_t i = 0; i < s.size(); ++i) {
        x = *m.step(x, s[i]);
        if (m.is_release(x)) instant = i + 1;
    }
    return instant;
}

/// The released prefix (observable and releasable events kept) followed
/// by the plain observable projection of the still-withheld suffix.
inline Word dirm_projection(const Model& m, const Word& s) {
    std::size_t instant = release_instant(m, s);
    Word released(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(instant));
    Word withheld(s.begin() + static_cast<std::ptrdiff_t>(instant), s.end());
    Word out = natural_projection(m, released, observable_and_releasable);
    Word tail = natural_projection(m, withheld, observable_only);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

/// A set of observations, canonically sorted by (length, lexicographic).
/// Length order recovers the temporal order of the information flow,
/// since observation lengths are non-decreasing along prefixes.
struct History {
    std::vector<Word> items;

    void insert(Word w) {
        auto it = std::lower_bound(items.begin(), items.end(), w, less);
        if (it == items.end() || *it != w) items.insert(it, std::move(w));
    }

    [[nodiscard]] bool contains(const Word& w) const {
        auto it = std::lower_bound(items.begin(), items.end(), w, less);
        return it != items.end() && *it == w;
    }

    bool operator==(const History&) const = default;
    bool operator<(const History& o) const {
        return std::lexicographical_compare(items.begin(), items.end(), o.items.begin(),
                                            o.items.end(), less);
    }

    static bool less(const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

/// The set of projections of every prefix of s (always contains the
/// empty observation).
inline History history(const Model& m, const Word& s) {
    detail::require_run(m, s);
    History h;
    Word prefix;
    h.insert(dirm_projection(m, prefix));
    for (EventId e : s) {
        prefix.push_back(e);
        h.insert(dirm_projection(m, prefix));
    }
    return h;
}

/// "{eps, h, h.a}" in (length, lexicographic) order.
inline std::string format_history(const Model& m, const History& h) {
    std::string out = "{";
    for (std::size_t i = 0; i < h.items.size(); ++i) {
        if (i) out += ", ";
        out += format_word(m, h.items[i]);
    }
    out += "}";
    return out;
}

/// Depth-first enumeration of every generated word up to `bound`,
/// events in ascending id order. fn(word, end_state) is called for each
/// word, the empty word included.
template <class F>
void for_each_generated_word(const Model& m, std::size_t bound, F&& fn) {
    Word word;
    std::function<void(StateId)> walk = [&](StateId x) {
        fn(static_cast<const Word&>(word), x);
        if (word.size() == bound) return;
        for (const auto& [e, dst] : m.transitions_from(x)) {
            word.push_back(e);
            walk(dst);
            word.pop_back();
        }
    };
    walk(m.initial());
}

/// Exhaustive current-state estimate: every end state of a generated
/// word of length <= bound whose history equals h. Exact whenever bound
/// dominates the length of all history-equivalent words (in particular
/// on acyclic models with bound >= the longest word); otherwise an
/// under-approximation of the true estimate.
inline StateSet cse_bruteforce(const Model& m, const History& h, std::size_t bound) {
    StateSet result;
    for_each_generated_word(m, bound, [&](const Word& w, StateId end) {
        if (history(m, w) == h) result.push_back(end);
    });
    detail::sort_unique(result);
    return result;
}

// --- classical current-state opacity (release mechanism ignored) ---------

namespace detail {

inline StateSet closure_unobservable(const Model& m, StateSet q) {
    std::vector<char> mark(m.state_count(), 0);
    for (StateId x : q) mark[x] = 1;
    for (std::size_t i = 0; i < q.size(); ++i) { // q grows while iterating
        for (const auto& [e, dst] : m.transitions_from(q[i])) {
            if (m.event_class(e) != EventClass::Observable && !mark[dst]) {
                mark[dst] = 1;
                q.push_back(dst);
            }
        }
    }
    sort_unique(q);
    return q;
}

} // namespace detail

/// Reachable estimate sets of the standard observable-events-only
/// observer (subset construction). Releasable events are treated as
/// unobservable and release states play no role.
inline std::vector<StateSet> classical_observer_subsets(const Model& m) {
    std::vector<StateSet> subsets;
    std::set<StateSet> seen;
    std::vector<StateSet> queue{detail::closure_unobservable(m, {m.initial()})};
    seen.insert(queue.front());
    while (!queue.empty()) {
        StateSet q = std::move(queue.front());
        queue.erase(queue.begin());
        subsets.push_back(q);
        for (EventId e = 0; e < m.event_count(); ++e) {
            if (m.event_class(e) != EventClass::Observable) continue;
            StateSet next;
            for (StateId x : q)
                if (auto t = m.step(x, e)) next.push_back(*t);
            detail::sort_unique(next);
            if (next.empty()) continue;
            next = detail::closure_unobservable(m, std::move(next));
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return subsets;
}

/// True iff no reachable classical estimate consists of secret states
/// only.
inline bool classical_opacity(const Model& m) {
    for (const StateSet& q : classical_observer_subsets(m)) {
        bool all_secret = true;
        for (StateId x : q)
            if (!m.is_secret(x)) all_secret = false;
        if (all_secret) return false;
    }
    return true;
}

} // namespace dirm
