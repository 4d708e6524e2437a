#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace soundmdp;
using namespace support;

namespace {

// Transitions and branches outside the single-branch self-loops of absorbing states.
std::pair<std::size_t, std::size_t> non_absorbing_counts(const Mdp& model) {
    std::size_t transitions = 0;
    std::size_t branches = 0;
    for (StateId s = 0; s < model.num_states(); ++s) {
        for (TransitionIndex t : model.transitions(s)) {
            const auto bs = model.branches(t);
            if (model.num_transitions(s) == 1 && bs.size() == 1 && bs[0].target == s) continue;
            ++transitions;
            branches += bs.size();
        }
    }
    return {transitions, branches};
}

Mdp single_loop() {
    MdpBuilder b;
    b.add_state();
    b.add_transition();
    b.add_branch(1.0, 0.0, 0);
    return std::move(b).build();
}

}  // namespace

TEST_CASE("example model validates and has the stated size") {
    const Mdp model = generate_example_me().model;
    CHECK(validate(model).empty());
    CHECK(model.num_states() == 5);
    const auto [transitions, branches] = non_absorbing_counts(model);
    CHECK(transitions == 5);
    CHECK(branches == 8);
}

TEST_CASE("single state with a probability-1 self-loop validates") {
    CHECK(validate(single_loop()).empty());
}

TEST_CASE("probabilities not summing to one are reported") {
    MdpBuilder b;
    b.add_state();
    b.add_transition("t");
    b.add_branch(0.5, 0.0, 0);
    b.add_branch(0.4, 0.0, 0);
    const auto violations = validate(std::move(b).build());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].message == "probabilities sum to 0.9");
    CHECK(violations[0].state == StateId{0});
    CHECK(violations[0].transition == std::size_t{0});
    CHECK(describe(violations[0]) == "state 0 transition 0: probabilities sum to 0.9");
}

TEST_CASE("sum tolerance is 1e-9") {
    for (double delta : {5e-10, -5e-10, 2e-9}) {
        MdpBuilder b;
        b.add_state();
        b.add_transition();
        b.add_branch(0.5, 0.0, 0);
        b.add_branch(0.5 + delta, 0.0, 0);
        CHECK(validate(std::move(b).build()).empty() == (std::abs(delta) < 1e-9));
    }
}

TEST_CASE("each structural rule produces a violation") {
    MdpBuilder b;
    b.add_state();  // 0: no transitions
    b.add_state();  // 1: bad branches
    b.add_transition();
    b.add_branch(0.0, 0.0, 0);
    b.add_branch(1.0, -1.0, 7);
    b.add_state();  // 2: non-finite numbers
    b.add_transition();
    b.add_branch(1.0, std::numeric_limits<double>::infinity(), 2);
    b.add_transition();
    b.add_branch(std::numeric_limits<double>::quiet_NaN(), 0.0, 2);
    b.set_initial(9);
    const auto violations = validate(std::move(b).build());
    std::vector<std::string> messages;
    for (const auto& v : violations) messages.push_back(describe(v));
    const std::vector<std::string> expected = {
        "initial state 9 out of range",
        "state 0: state has no transitions",
        "state 1 transition 0: branch probability 0 outside (0,1]",
        "state 1 transition 0: branch reward -1 is not a finite non-negative number",
        "state 1 transition 0: branch target 7 out of range",
        "state 2 transition 0: branch reward inf is not a finite non-negative number",
        "state 2 transition 1: branch probability nan outside (0,1]",
        "state 2 transition 1: probabilities sum to nan",
    };
    CHECK(messages == expected);
}

TEST_CASE("validate is total on degenerate structures") {
    CHECK(validate(Mdp{}).size() == 1);
    MdpBuilder b;
    b.add_state();
    b.add_transition();
    CHECK_NOTHROW(validate(std::move(b).build()));
}

TEST_CASE("goal states become zero-reward self-loops") {
    const Mdp model = generate_example_me().model;
    const StateSet goals = StateSet::of(5, {kSPlus, kSMinus});
    const Mdp absorbed = make_goals_absorbing(model, goals);
    for (StateId g : {kSPlus, kSMinus}) {
        REQUIRE(absorbed.num_transitions(g) == 1);
        const auto branches = absorbed.branches(absorbed.first_transition(g));
        REQUIRE(branches.size() == 1);
        CHECK(branches[0] == Branch{1.0, 0.0, g});
    }
    for (StateId s : {kS0, kS1, kS2}) {
        REQUIRE(absorbed.num_transitions(s) == model.num_transitions(s));
        for (std::size_t i = 0; i < model.num_transitions(s); ++i) {
            const auto a = model.branches(model.first_transition(s) + i);
            const auto c = absorbed.branches(absorbed.first_transition(s) + i);
            CHECK(std::equal(a.begin(), a.end(), c.begin(), c.end()));
        }
    }
    CHECK(make_goals_absorbing(absorbed, goals) == absorbed);
}

TEST_CASE("goal with two transitions keeps one self-loop") {
    const Mdp model = generate_example_me().model;
    const Mdp absorbed = make_goals_absorbing(model, StateSet::of(5, {kS0}));
    CHECK(absorbed.num_transitions(kS0) == 1);
    CHECK(absorbed.branches(absorbed.first_transition(kS0))[0] == Branch{1.0, 0.0, kS0});
    CHECK(absorbed.num_transitions() == model.num_transitions() - 1);
}

TEST_CASE("goal set of the wrong size is rejected") {
    CHECK_THROWS_AS(make_goals_absorbing(generate_example_me().model, StateSet(6)), std::out_of_range);
}

TEST_CASE("strip_rewards zeroes every reward and nothing else") {
    const Mdp model = generate_example_me().model;
    const Mdp stripped = strip_rewards(model);
    REQUIRE(stripped.num_branches() == model.num_branches());
    const auto before = model.all_branches();
    const auto after = stripped.all_branches();
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(after[i].reward == 0.0);
        CHECK(after[i].probability == before[i].probability);
        CHECK(after[i].target == before[i].target);
    }
    // transition a carries the reward-1 branches
    const auto a = model.branches(model.first_transition(kS0));
    CHECK(a[0].reward == 1.0);
    CHECK(stripped.branches(stripped.first_transition(kS0))[0].reward == 0.0);
    CHECK(strip_rewards(stripped) == stripped);

    MdpBuilder b;
    b.add_state();
    b.add_transition("x");
    b.add_branch(1.0, 7.5, 0);
    const Mdp one = strip_rewards(std::move(b).build());
    CHECK(one.all_branches()[0].reward == 0.0);
    CHECK(one.label(0) == std::optional<std::string>("x"));
}

TEST_CASE("absorbing and stripping commute") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const ModelDocument doc = generate_random(small_params(seed, seed % 2 == 0));
        const std::size_t n = doc.model.num_states();
        for (StateId g = 0; g < n; ++g) {
            const StateSet goals = StateSet::of(n, {g});
            CHECK(strip_rewards(make_goals_absorbing(doc.model, goals)) ==
                  make_goals_absorbing(strip_rewards(doc.model), goals));
        }
    }
}

TEST_CASE("absorbing goals adds no violations") {
    MdpBuilder b;
    b.add_state();
    b.add_transition();
    b.add_branch(0.5, 0.0, 1);
    b.add_state();
    b.add_transition();
    b.add_branch(0.3, 0.0, 0);
    b.add_state();
    const Mdp broken = std::move(b).build();
    CHECK(validate(broken).size() == 3);
    CHECK(validate(make_goals_absorbing(broken, StateSet::of(3, {1, 2}))).size() == 1);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const ModelDocument doc = generate_random(small_params(seed, true));
        CHECK(validate(make_goals_absorbing(doc.model, StateSet(doc.model.num_states(), true))).empty());
    }
}

TEST_CASE("rebase_initial") {
    const Mdp model = generate_example_me().model;
    const Mdp rebased = rebase_initial(model, kS1);
    CHECK(rebased.initial() == kS1);
    CHECK(rebase_initial(rebased, kS0) == model);
    CHECK(rebase_initial(model, model.initial()) == model);
    CHECK_THROWS_AS(rebase_initial(model, 5), std::out_of_range);
}

TEST_CASE("state sets") {
    const StateSet a = StateSet::of(5, {0, 2});
    const StateSet b = StateSet::of(5, {2, 3});
    CHECK((a | b) == StateSet::of(5, {0, 2, 3}));
    CHECK((a & b) == StateSet::of(5, {2}));
    CHECK(a.complement() == StateSet::of(5, {1, 3, 4}));
    CHECK(a.members() == std::vector<StateId>{0, 2});
    CHECK(a.count() == 2);
    CHECK(StateSet(5).empty());
    CHECK_FALSE(a.contains(9));
}

TEST_CASE("value vector order") {
    const ValueVector v(std::vector<double>{0.0, 0.5, 1.0});
    const ValueVector w(std::vector<double>{0.0, 0.6, std::numeric_limits<double>::infinity()});
    CHECK(v.precedes(w));
    CHECK_FALSE(w.precedes(v));
    CHECK(v.precedes(v));
    CHECK_FALSE(v.has_nan());
    CHECK(ValueVector(std::vector<double>{std::nan("")}).has_nan());
}

TEST_CASE("property kinds") {
    for (PropertyKind kind : {PropertyKind::pmax, PropertyKind::pmin, PropertyKind::emax, PropertyKind::emin})
        CHECK(parse_property_kind(to_string(kind)) == kind);
    CHECK_FALSE(parse_property_kind("pmid"));
    CHECK(is_probability(PropertyKind::pmin));
    CHECK_FALSE(is_probability(PropertyKind::emax));
    CHECK(optimization_of(PropertyKind::emin) == Optimization::min);
    CHECK(optimization_of(PropertyKind::pmax) == Optimization::max);
}
