#include <doctest.h>

#include <random>

#include "dirm/augment.hpp"
#include "dirm/semantics.hpp"
#include "dirm/verify.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace dirm;
using testsupport::load_fixture;
using testsupport::word;

namespace {

StateId aug_state(const AugModel& am, const char* name) {
    auto id = am.automaton.find_state(name);
    REQUIRE(id);
    return *id;
}

} // namespace

TEST_CASE("augmenting the release-pending flag") {
    Model m = load_fixture("fig2.model");
    AugModel am = augment(m);
    EventId h = *am.automaton.find_event("h");
    EventId u = *am.automaton.find_event("u");

    CHECK(am.automaton.state_name(am.automaton.initial()) == "0N");
    CHECK(augmented_step(am, aug_state(am, "0N"), h) == am.automaton.find_state("2Y"));
    CHECK(augmented_step(am, aug_state(am, "6Y"), u) == am.automaton.find_state("8N"));
    CHECK(augmented_step(am, aug_state(am, "7Y"), u) == am.automaton.find_state("9Y"));
    CHECK(!augmented_step(am, aug_state(am, "0N"), *am.automaton.find_event("a")));

    SUBCASE("a state splits into both flag copies when visited both ways") {
        CHECK(am.automaton.find_state("9N"));
        CHECK(am.automaton.find_state("9Y"));
    }
    SUBCASE("lifted release and secret sets") {
        CHECK(am.automaton.release_states() ==
              testsupport::states_by_name(am.automaton, {"6Y", "9Y"}));
        CHECK(am.automaton.secret_states() ==
              testsupport::states_by_name(am.automaton, {"7Y"}));
        StateId nine_n = aug_state(am, "9N");
        CHECK(!am.automaton.is_release(nine_n)); // pending flag off: nothing to release
        CHECK(am.base_of(nine_n) == *m.find_state("9"));
        CHECK(!am.pending_of(nine_n));
    }
    SUBCASE("document form carries the augmented marker") {
        std::string text = serialize(am);
        CHECK(text.find("\"augmented\": true") != std::string::npos);
        CHECK(parse_model(text) == am.automaton);
    }
}

TEST_CASE("augmentation preserves the generated language") {
    std::mt19937 rng(41);
    for (int round = 0; round < 30; ++round) {
        Model m = testsupport::random_model(rng);
        AugModel am = augment(m);
        CHECK(am.automaton.state_count() <= 2 * m.state_count());
        for_each_generated_word(m, 6, [&](const Word& w, StateId end) {
            auto lifted = am.automaton.run(w);
            REQUIRE(lifted);
            CHECK(am.base_of(*lifted) == end);
            // definedness matches event by event
            for (EventId e = 0; e < m.event_count(); ++e)
                CHECK(m.step(end, e).has_value() == am.automaton.step(*lifted, e).has_value());
        });
    }
}

TEST_CASE("flag discipline along transitions") {
    std::mt19937 rng(43);
    for (int round = 0; round < 30; ++round) {
        Model m = testsupport::random_model(rng);
        AugModel am = augment(m);
        for (StateId x = 0; x < am.automaton.state_count(); ++x) {
            for (const auto& [e, dst] : am.automaton.transitions_from(x)) {
                bool releasable = am.automaton.event_class(e) == EventClass::Releasable;
                bool expect_pending =
                    releasable || (!m.is_release(am.base_of(x)) && am.pending_of(x));
                CHECK(am.pending_of(dst) == expect_pending);
            }
        }
    }
}

TEST_CASE("histories are unchanged by augmentation") {
    std::mt19937 rng(47);
    for (int round = 0; round < 40; ++round) {
        Model m = testsupport::random_model(rng);
        AugModel am = augment(m);
        for_each_generated_word(m, 6, [&](const Word& w, StateId) {
            CHECK(history(m, w) == history(am.automaton, w));
        });
    }
}

TEST_CASE("verdicts agree when the augmentation is treated as the plant") {
    std::mt19937 rng(53);
    for (int round = 0; round < 20; ++round) {
        Model m = testsupport::random_model(rng, {.max_states = 6});
        AugModel am = augment(m);
        CHECK(verify_opacity(m).status == verify_opacity(am.automaton).status);
    }
}

TEST_CASE("augment refuses models with validation errors") {
    Model m = load_fixture("fig1.model");
    CHECK_THROWS_AS(augment(m.with_secret_states(m.to_data().states)), ModelError);
}
