#include "support.hpp"

#include <cmath>
#include <random>

namespace support {

std::string example_text() {
    return R"(mdpx 1
# example model: s1 and s2 form a zero-reward end component
states 5
initial s0
state 0 s0
  transition a
    branch 0.1 1 s-
    branch 0.1 0 s+
    branch 0.8 1 s0
  transition b
    branch 1 0 s1
state 1 s+
  transition
    branch 1 0 s+
state 2 s-
  transition
    branch 1 0 s-
state 3 s1
  transition
    branch 1 0 s2
state 4 s2
  transition
    branch 1 0 s1
  transition c
    branch 0.6 1 s-
    branch 0.4 0 s+
)";
}

Mdp example_zero() {
    const ModelDocument me = generate_example_me();
    return strip_rewards(make_goals_absorbing(me.model, StateSet::of(5, {kSPlus})));
}

BellmanProblem example_pmax_problem() {
    auto model = std::make_shared<const Mdp>(example_zero());
    return make_probability_problem(model, StateSet::of(5, {kSPlus}), Optimization::max, StateSet::of(5, {kSMinus}),
                                    StateSet(5));
}

RandomModelParams small_params(std::uint64_t seed, bool end_components) {
    std::mt19937_64 rng(seed * 7919 + 17);
    RandomModelParams params;
    params.seed = seed;
    params.states = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    params.sink_count = params.states >= 3 ? std::uniform_int_distribution<std::size_t>(0, 1)(rng) : 0;
    params.goal_count = 1;
    params.max_transitions = 2;
    params.max_branches = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    params.reward_max = 4.0;
    params.end_components = end_components;
    return params;
}

std::vector<std::size_t> internal_zero_transitions(const Mdp& model, const StateSet& states, StateId s) {
    std::vector<std::size_t> kept;
    std::size_t local = 0;
    for (TransitionIndex t : model.transitions(s)) {
        bool inside = true;
        for (const Branch& b : model.branches(t))
            if (b.reward != 0.0 || !states.contains(b.target)) inside = false;
        if (inside) kept.push_back(local);
        ++local;
    }
    return kept;
}

namespace {

bool is_end_component(const Mdp& model, const StateSet& states) {
    const auto members = states.members();
    if (members.empty()) return false;
    const std::size_t n = model.num_states();
    std::vector<std::vector<StateId>> forward(n);
    std::vector<std::vector<StateId>> backward(n);
    for (StateId s : members) {
        const auto kept = internal_zero_transitions(model, states, s);
        if (kept.empty()) return false;
        for (std::size_t local : kept) {
            for (const Branch& b : model.branches(model.first_transition(s) + local)) {
                forward[s].push_back(b.target);
                backward[b.target].push_back(s);
            }
        }
    }
    auto reaches_all = [&](const std::vector<std::vector<StateId>>& edges) {
        std::vector<bool> seen(n, false);
        std::vector<StateId> stack{members.front()};
        seen[members.front()] = true;
        while (!stack.empty()) {
            const StateId s = stack.back();
            stack.pop_back();
            for (StateId t : edges[s])
                if (!seen[t]) seen[t] = true, stack.push_back(t);
        }
        for (StateId s : members)
            if (!seen[s]) return false;
        return true;
    };
    return reaches_all(forward) && reaches_all(backward);
}

}  // namespace

std::vector<StateSet> brute_force_end_components(const Mdp& model) {
    const std::size_t n = model.num_states();
    std::vector<StateSet> result;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        StateSet states(n);
        for (StateId s = 0; s < n; ++s)
            if (mask >> s & 1) states.insert(s);
        if (is_end_component(model, states)) result.push_back(states);
    }
    return result;
}

std::vector<StateSet> brute_force_mecs(const Mdp& model) {
    const auto all = brute_force_end_components(model);
    std::vector<StateSet> maximal;
    for (const StateSet& candidate : all) {
        bool dominated = false;
        for (const StateSet& other : all)
            if (other != candidate && (other & candidate) == candidate) dominated = true;
        if (!dominated) maximal.push_back(candidate);
    }
    return maximal;
}

BellmanProblem standard_problem(const Mdp& model, const StateSet& goals, PropertyKind kind) {
    const Optimization opt = optimization_of(kind);
    const std::size_t n = model.num_states();
    if (is_probability(kind)) {
        auto absorbed = std::make_shared<const Mdp>(strip_rewards(make_goals_absorbing(model, goals)));
        const StateSet zero = prob0_set(*absorbed, goals, opt);
        return make_probability_problem(absorbed, goals, opt, zero, StateSet(n));
    }
    auto absorbed = std::make_shared<const Mdp>(make_goals_absorbing(model, goals));
    const StateSet s_inf = s_infinity(*absorbed, goals, opt);
    return make_reward_problem(absorbed, goals, opt, s_inf);
}

bool below_with_slack(double x, const ExactValue& exact) {
    if (exact.infinite) return true;
    if (std::isinf(x)) return false;
    return mpq_class(x) <= exact.value * mpq_class("1000000000001/1000000000000");
}

bool above_with_slack(double x, const ExactValue& exact) {
    if (std::isinf(x)) return true;
    if (exact.infinite) return false;
    return mpq_class(x) >= exact.value * mpq_class("999999999999/1000000000000");
}

}  // namespace support
