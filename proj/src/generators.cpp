#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "soundmdp/model_io.hpp"

namespace soundmdp {

ModelDocument generate_example_me() {
    enum : StateId { s0 = 0, s_plus = 1, s_minus = 2, s1 = 3, s2 = 4 };
    MdpBuilder b;

    b.add_state();  // s0
    b.add_transition("a");
    b.add_branch(0.1, 1.0, s_minus);
    b.add_branch(0.1, 0.0, s_plus);
    b.add_branch(0.8, 1.0, s0);
    b.add_transition("b");
    b.add_branch(1.0, 0.0, s1);

    for (StateId absorbing : {s_plus, s_minus}) {
        b.add_state();
        b.add_transition();
        b.add_branch(1.0, 0.0, absorbing);
    }

    b.add_state();  // s1
    b.add_transition();
    b.add_branch(1.0, 0.0, s2);

    b.add_state();  // s2
    b.add_transition();
    b.add_branch(1.0, 0.0, s1);
    b.add_transition("c");
    b.add_branch(0.6, 1.0, s_minus);
    b.add_branch(0.4, 0.0, s_plus);

    b.set_initial(s0);

    ModelDocument document;
    document.model = std::move(b).build();
    document.named_states = {{"s0", s0}, {"s+", s_plus}, {"s-", s_minus}, {"s1", s1}, {"s2", s2}};
    return document;
}

ModelDocument generate_random(const RandomModelParams& params) {
    const std::size_t n = params.states;
    if (n < 2) throw std::invalid_argument("random model needs at least 2 states");
    if (params.goal_count < 1 || params.goal_count + params.sink_count >= n)
        throw std::invalid_argument("goal and sink counts must leave at least one transient state");
    if (params.max_transitions < 1 || params.max_branches < 1)
        throw std::invalid_argument("transition and branch bounds must be positive");
    if (!(params.reward_max >= 0.0)) throw std::invalid_argument("reward bound must be non-negative");

    std::mt19937_64 rng(params.seed);
    auto uniform = [&rng](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const std::size_t transient = n - params.goal_count - params.sink_count;
    const std::size_t reward_steps = static_cast<std::size_t>(std::floor(params.reward_max * 4.0));

    auto draw_reward = [&]() -> double {
        if (reward_steps == 0 || uniform(0, 1) == 0) return 0.0;
        return static_cast<double>(uniform(1, reward_steps)) / 4.0;
    };

    MdpBuilder builder;
    for (StateId s = 0; s < n; ++s) {
        builder.add_state();
        if (s >= transient) {
            builder.add_transition();
            builder.add_branch(1.0, 0.0, s);
            continue;
        }
        const std::size_t transitions = uniform(1, params.max_transitions);
        for (std::size_t t = 0; t < transitions; ++t) {
            builder.add_transition("t" + std::to_string(t));
            const std::size_t branch_count = std::min(uniform(1, params.max_branches), n);
            std::vector<StateId> targets;
            // The first branch makes progress to a higher id, so no set of
            // transient states can be closed under all branches.
            if (!params.end_components) targets.push_back(static_cast<StateId>(uniform(s + 1, n - 1)));
            while (targets.size() < branch_count) {
                const auto candidate = static_cast<StateId>(uniform(0, n - 1));
                if (std::find(targets.begin(), targets.end(), candidate) == targets.end())
                    targets.push_back(candidate);
            }
            std::vector<std::size_t> weights(targets.size());
            for (auto& w : weights) w = uniform(1, 12 / targets.size());
            const std::size_t total = std::accumulate(weights.begin(), weights.end(), std::size_t{0});
            const bool zero_reward = params.end_components && uniform(0, 1) == 0;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const double reward = zero_reward ? 0.0 : draw_reward();
                builder.add_branch(static_cast<double>(weights[i]) / static_cast<double>(total), reward, targets[i]);
            }
        }
    }
    builder.set_initial(0);

    ModelDocument document;
    document.model = std::move(builder).build();
    StateSet goals(n);
    for (std::size_t g = n - params.goal_count; g < n; ++g) goals.insert(static_cast<StateId>(g));
    document.declared_goals = goals;
    return document;
}

ModelDocument generate_slow_chain(std::size_t n, double p) {
    if (n < 2) throw std::invalid_argument("slow chain needs n >= 2");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("slow chain needs 0 < p < 1");

    MdpBuilder builder;
    builder.add_state();
    builder.add_transition();
    builder.add_branch(1.0, 0.0, 1);
    for (std::size_t i = 1; i < n; ++i) {
        builder.add_state();
        builder.add_transition();
        builder.add_branch(p, 0.0, static_cast<StateId>(i + 1));
        builder.add_branch(1.0 - p, 0.0, 0);
    }
    builder.add_state();
    builder.add_transition();
    builder.add_branch(1.0, 0.0, static_cast<StateId>(n));
    builder.set_initial(0);

    ModelDocument document;
    document.model = std::move(builder).build();
    document.named_states = {{"start", 0}, {"goal", static_cast<StateId>(n)}};
    document.declared_goals = StateSet::of(n + 1, {static_cast<StateId>(n)});
    return document;
}

}  // namespace soundmdp
