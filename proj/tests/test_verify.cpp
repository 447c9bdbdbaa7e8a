#include <doctest.h>

#include <random>

#include "dirm/verify.hpp"
#include "support/fixtures.hpp"
#include "support/random_models.hpp"

using namespace dirm;
using testsupport::load_fixture;
using testsupport::word;

TEST_CASE("two-branch model: a secret deep state leaks") {
    Model m = load_fixture("fig1.model");
    Verdict v = verify_opacity(m);
    CHECK(v.status == Status::Violated);
    REQUIRE(v.witness);
    CHECK(*v.witness == std::vector<std::string>{"h", "a", "h", "a"});
    CHECK(*v.observation == "h.a.h.a");
    CHECK(*v.history == std::vector<std::string>{"eps", "h", "h.a", "h.a.h.a"});
    CHECK(*v.estimate == std::vector<std::string>{"4Y"});
    CHECK(v.stats.augmented_states == 11);
    CHECK(v.stats.augmented_states <= 2 * m.state_count());
}

TEST_CASE("two-branch model: the shallow secret stays ambiguous") {
    Verdict v = verify_opacity(load_fixture("fig1.model").with_secret_states({"2"}));
    CHECK(v.status == Status::Opaque);
    CHECK(!v.witness);
    CHECK(!v.observation);
    CHECK(!v.history);
    CHECK(!v.estimate);
}

TEST_CASE("split-release model: release timing identifies the secret") {
    Verdict v = verify_opacity(load_fixture("fig2.model"));
    CHECK(v.status == Status::Violated);
    REQUIRE(v.witness);
    CHECK(*v.witness == std::vector<std::string>{"u", "h", "h", "a"});
    CHECK(*v.observation == "a");
    CHECK(*v.history == std::vector<std::string>{"eps", "a"});
    CHECK(*v.estimate == std::vector<std::string>{"7Y"});
}

TEST_CASE("medical cloud: the backup logs never expose the sensitive provider") {
    Model m = load_fixture("medical_cloud.model");
    CHECK(verify_opacity(m).status == Status::Opaque);

    AugModel am = augment(m);
    Word s = word(m, "blood,upload_X,anoy,back,pack1,upload_Y");
    Word t = word(m, "image,upload_X,anoy,back,pack2,upload_Y");
    CHECK(m.run(s) == m.find_state("SP1"));
    CHECK(m.run(t) == m.find_state("SP2"));
    CHECK(history(m, s) == history(m, t));
    StateSet bases = am.project(estimate(am, s));
    CHECK(detail::set_contains(bases, *m.find_state("SP1")));
    CHECK(detail::set_contains(bases, *m.find_state("SP2")));
}

TEST_CASE("witnesses are shortest") {
    for (const char* name : {"fig1.model", "fig2.model"}) {
        Model m = load_fixture(name);
        Verdict v = verify_opacity(m);
        REQUIRE(v.witness);
        AugModel am = augment(m);
        StateSet secret = am.automaton.secret_states();
        for_each_generated_word(m, v.witness->size() - 1, [&](const Word& w, StateId) {
            StateSet est = estimate(am, w);
            CHECK(!detail::is_subset(est, secret));
        });
    }
}

TEST_CASE("witness extraction") {
    Model m = load_fixture("fig2.model");
    ObserverAutomaton obs = build_observer(augment(m));

    SUBCASE("no state satisfies an empty secret set") {
        CHECK(!find_witness(obs, {}));
    }
    SUBCASE("full build finds the same witness as the early-stopping build") {
        auto w = find_witness(obs, obs.augmented().automaton.secret_states());
        REQUIRE(w);
        CHECK(event_names(m, *w) == std::vector<std::string>{"u", "h", "h", "a"});
    }
    SUBCASE("a withheld chain leaks only at its release point") {
        Model chain = parse_model(R"({"states":["c0","c1","c2","c3"],"events":{"k":"r"},
                                      "initial":"c0",
                                      "transitions":[["c0","k","c1"],["c1","k","c2"],["c2","k","c3"]],
                                      "release_states":["c3"],"secret_states":["c1","c2","c3"]})");
        Verdict v = verify_opacity(chain);
        CHECK(v.status == Status::Violated);
        CHECK(*v.witness == std::vector<std::string>{"k", "k", "k"});
        AugModel am = augment(chain);
        StateSet secret = am.automaton.secret_states();
        for_each_generated_word(chain, 2, [&](const Word& w, StateId) {
            CHECK(!detail::is_subset(estimate(am, w), secret));
        });
    }
}

TEST_CASE("degenerate secret sets") {
    std::mt19937 rng(83);
    SUBCASE("no secrets means opaque") {
        for (int round = 0; round < 10; ++round) {
            Model m = testsupport::random_model(rng).with_secret_states({});
            CHECK(verify_opacity(m).status == Status::Opaque);
        }
    }
    SUBCASE("a fully secret initial estimate is violated by the empty word") {
        Model m = load_fixture("fig2.model");
        AugModel am = augment(m);
        StateSet init_low = estimate(am, {});
        std::vector<std::string> names;
        for (StateId x : am.project(init_low)) names.push_back(m.state_name(x));
        Verdict v = verify_opacity(m.with_secret_states(names));
        CHECK(v.status == Status::Violated);
        CHECK(v.witness->empty());
        CHECK(*v.observation == "eps");
    }
}

TEST_CASE("finishing the full build does not change the verdict") {
    for (const char* name : {"fig1.model", "fig2.model", "medical_cloud.model"}) {
        Model m = load_fixture(name);
        Verdict early = verify_opacity(m);
        Verdict full = verify_opacity(m, {.full_observer = true});
        CHECK(early.status == full.status);
        CHECK(early.witness == full.witness);
        CHECK(early.estimate == full.estimate);
    }
}

TEST_CASE("verdicts agree with the lifted pipeline on the bundled models") {
    for (const char* name : {"fig1.model", "fig2.model", "medical_cloud.model"}) {
        Model m = load_fixture(name);
        AugModel am = augment(m);
        CHECK(verify_opacity(m).status == verify_opacity(am.automaton).status);
    }
}

TEST_CASE("brute-force cross-checks") {
    SUBCASE("the two-branch model is exact at its depth") {
        CrosscheckReport r = crosscheck_bruteforce(load_fixture("fig1.model"), 6);
        CHECK(r.words_checked == 11);
        CHECK(r.clean());
    }
    SUBCASE("a single-state model checks only the empty word") {
        Model tiny = parse_model(R"({"states":["s"],"events":{},"initial":"s",
                                     "transitions":[],"release_states":[],"secret_states":[]})");
        CrosscheckReport r = crosscheck_bruteforce(tiny, 4);
        CHECK(r.words_checked == 1);
        CHECK(r.clean());
    }
    SUBCASE("the split-release model is exact at a covering bound") {
        CHECK(crosscheck_bruteforce(load_fixture("fig2.model"), 8).clean());
    }
    SUBCASE("the cloud model never escapes containment") {
        // the filt loop makes the enumeration bound-limited: words at the
        // bound edge under-approximate, but never the other way around
        CrosscheckReport r = crosscheck_bruteforce(load_fixture("medical_cloud.model"), 8);
        CHECK(r.containment_ok());
        for (const auto& e : r.mismatches) CHECK(e.secrecy_agrees);
    }
    SUBCASE("release-free acyclic models are exact and match the classical check") {
        std::mt19937 rng(89);
        for (int round = 0; round < 15; ++round) {
            Model m = testsupport::random_model(rng, {.acyclic = true, .releasable_events = false});
            CHECK(crosscheck_bruteforce(m, 6).clean());
            CHECK((verify_opacity(m).status == Status::Opaque) == classical_opacity(m));
        }
    }
}

TEST_CASE("verification failure modes") {
    Model m = load_fixture("fig2.model");
    SUBCASE("validation errors are model errors") {
        CHECK_THROWS_AS(verify_opacity(m.with_secret_states(m.to_data().states)), ModelError);
    }
    SUBCASE("the observer cap surfaces as a resource error") {
        CHECK_THROWS_AS(verify_opacity(m, {.max_observer_states = 2}), ResourceLimitError);
    }
}

TEST_CASE("verdict JSON round-trips") {
    for (const char* name : {"fig1.model", "fig2.model", "medical_cloud.model"}) {
        Verdict v = verify_opacity(load_fixture(name));
        nlohmann::json j = nlohmann::json::parse(to_json(v).dump());
        CHECK(verdict_from_json(j) == v);
    }
}
