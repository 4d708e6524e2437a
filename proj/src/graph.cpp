#include "soundmdp/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace soundmdp {

namespace {

struct Edge {
    StateId source;
    TransitionIndex transition;
};

// For every state, the (source, transition) pairs with a branch into it. A
// transition with several branches into the same state is listed once.
std::vector<std::vector<Edge>> predecessors(const Mdp& model) {
    std::vector<std::vector<Edge>> result(model.num_states());
    for (StateId s = 0; s < model.num_states(); ++s) {
        for (TransitionIndex t : model.transitions(s)) {
            for (const Branch& b : model.branches(t)) {
                auto& list = result[b.target];
                if (list.empty() || list.back().transition != t) list.push_back({s, t});
            }
        }
    }
    return result;
}

void check_sizes(const Mdp& model, const StateSet& goals) {
    if (goals.size() != model.num_states()) throw std::invalid_argument("goal set does not match the model");
}

// States that can reach `targets` along any branch, restricted to paths whose
// intermediate states satisfy `through`.
template <typename Through>
StateSet backward_reachable(const std::vector<std::vector<Edge>>& pred, const StateSet& targets, Through through) {
    StateSet reached = targets;
    std::deque<StateId> queue;
    for (StateId s : targets.members()) queue.push_back(s);
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        for (const Edge& e : pred[s]) {
            if (!reached.contains(e.source) && through(e.source)) {
                reached.insert(e.source);
                queue.push_back(e.source);
            }
        }
    }
    return reached;
}

// Least set R ⊇ goals closed under: every transition of s has a branch into R.
StateSet forced_reach(const Mdp& model, const std::vector<std::vector<Edge>>& pred, const StateSet& goals) {
    const std::size_t n = model.num_states();
    StateSet reached = goals;
    std::vector<std::size_t> pending(n);
    std::vector<bool> hit(model.num_transitions(), false);
    for (StateId s = 0; s < n; ++s) pending[s] = model.num_transitions(s);

    std::deque<StateId> queue;
    for (StateId g : goals.members()) queue.push_back(g);
    while (!queue.empty()) {
        const StateId s = queue.front();
        queue.pop_front();
        for (const Edge& e : pred[s]) {
            if (hit[e.transition]) continue;
            hit[e.transition] = true;
            if (--pending[e.source] == 0 && !reached.contains(e.source)) {
                reached.insert(e.source);
                queue.push_back(e.source);
            }
        }
    }
    return reached;
}

}  // namespace

StateSet prob0_set(const Mdp& model, const StateSet& goals, Optimization opt) {
    check_sizes(model, goals);
    const auto pred = predecessors(model);
    if (opt == Optimization::max) return backward_reachable(pred, goals, [](StateId) { return true; }).complement();
    return forced_reach(model, pred, goals).complement();
}

StateSet prob1_set(const Mdp& model, const StateSet& goals, Optimization opt) {
    check_sizes(model, goals);
    const auto pred = predecessors(model);
    const std::size_t n = model.num_states();

    if (opt == Optimization::min) {
        // Pmin(s) < 1 iff some scheduler reaches, avoiding the goals, a state
        // from which the goals can be avoided forever.
        const StateSet avoidable = forced_reach(model, pred, goals).complement();
        return backward_reachable(pred, avoidable, [&](StateId s) { return !goals.contains(s); }).complement();
    }

    // Greatest U such that, inside U, the goals are reachable using only
    // transitions that stay in U.
    StateSet inside(n, true);
    while (true) {
        std::vector<bool> closed(model.num_transitions(), false);
        for (StateId s = 0; s < n; ++s) {
            if (!inside.contains(s)) continue;
            for (TransitionIndex t : model.transitions(s)) {
                const auto branches = model.branches(t);
                closed[t] = std::all_of(branches.begin(), branches.end(),
                                        [&](const Branch& b) { return inside.contains(b.target); });
            }
        }
        StateSet reached = goals;
        std::deque<StateId> queue;
        for (StateId g : goals.members()) queue.push_back(g);
        while (!queue.empty()) {
            const StateId s = queue.front();
            queue.pop_front();
            for (const Edge& e : pred[s]) {
                if (closed[e.transition] && !reached.contains(e.source)) {
                    reached.insert(e.source);
                    queue.push_back(e.source);
                }
            }
        }
        if (reached == inside) return reached;
        inside = reached;
    }
}

StateSet s_infinity(const Mdp& model, const StateSet& goals, Optimization opt) {
    const Optimization pessimal = opt == Optimization::max ? Optimization::min : Optimization::max;
    return prob1_set(model, goals, pessimal).complement();
}

StateSet reward_zero_set(const Mdp& model, const StateSet& goals, Optimization opt) {
    check_sizes(model, goals);
    const std::size_t n = model.num_states();
    auto free = [&](TransitionIndex t) {
        const auto branches = model.branches(t);
        return std::all_of(branches.begin(), branches.end(), [](const Branch& b) { return b.reward == 0.0; });
    };

    if (opt == Optimization::min) {
        // Goals reached almost surely using zero-reward transitions only.
        MdpBuilder builder;
        for (StateId s = 0; s < n; ++s) {
            builder.add_state();
            bool any = false;
            for (TransitionIndex t : model.transitions(s)) {
                if (!free(t)) continue;
                any = true;
                builder.add_transition();
                for (const Branch& b : model.branches(t)) builder.add_branch(b.probability, 0.0, b.target);
            }
            if (!any) {
                builder.add_transition();
                builder.add_branch(1.0, 0.0, s);
            }
        }
        builder.set_initial(model.initial());
        return prob1_set(std::move(builder).build(), goals, Optimization::max);
    }

    // Goals reached almost surely and no positive reward ever reachable.
    StateSet earning(n);
    for (StateId s = 0; s < n; ++s) {
        if (goals.contains(s)) continue;
        for (TransitionIndex t : model.transitions(s))
            if (!free(t)) earning.insert(s);
    }
    const StateSet rewarded = backward_reachable(predecessors(model), earning, [](StateId) { return true; });
    return (rewarded | s_infinity(model, goals, Optimization::max)).complement();
}

namespace {

// Iterative Tarjan over the states marked active, following only allowed
// transitions. Returns the SCC index per state (-1 for inactive states).
std::vector<int> strongly_connected(const Mdp& model, const std::vector<bool>& active,
                                    const std::vector<bool>& allowed) {
    const std::size_t n = model.num_states();
    std::vector<std::vector<StateId>> successors(n);
    for (StateId s = 0; s < n; ++s) {
        if (!active[s]) continue;
        for (TransitionIndex t : model.transitions(s)) {
            if (!allowed[t]) continue;
            for (const Branch& b : model.branches(t))
                if (active[b.target]) successors[s].push_back(b.target);
        }
    }

    std::vector<int> index(n, -1), lowlink(n, 0), component(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<StateId> stack;
    std::vector<std::pair<StateId, std::size_t>> call;
    int next_index = 0;
    int next_component = 0;

    for (StateId root = 0; root < n; ++root) {
        if (!active[root] || index[root] != -1) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, next] = call.back();
            if (next < successors[v].size()) {
                const StateId w = successors[v][next++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
                continue;
            }
            const StateId done = v;
            call.pop_back();
            if (!call.empty()) lowlink[call.back().first] = std::min(lowlink[call.back().first], lowlink[done]);
            if (lowlink[done] == index[done]) {
                StateId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    component[w] = next_component;
                } while (w != done);
                ++next_component;
            }
        }
    }
    return component;
}

}  // namespace

std::vector<EndComponent> mec_decomposition(const Mdp& model) {
    const std::size_t n = model.num_states();
    std::vector<bool> allowed(model.num_transitions(), false);
    std::vector<bool> active(n, false);
    for (StateId s = 0; s < n; ++s) {
        for (TransitionIndex t : model.transitions(s)) {
            const auto branches = model.branches(t);
            allowed[t] = std::all_of(branches.begin(), branches.end(), [](const Branch& b) { return b.reward == 0.0; });
            if (allowed[t]) active[s] = true;
        }
    }

    std::vector<int> component;
    bool changed = true;
    while (changed) {
        changed = false;
        component = strongly_connected(model, active, allowed);
        for (StateId s = 0; s < n; ++s) {
            if (!active[s]) continue;
            bool any = false;
            for (TransitionIndex t : model.transitions(s)) {
                if (!allowed[t]) continue;
                const auto branches = model.branches(t);
                const bool stays = std::all_of(branches.begin(), branches.end(),
                                               [&](const Branch& b) { return component[b.target] == component[s]; });
                if (stays) {
                    any = true;
                } else {
                    allowed[t] = false;
                    changed = true;
                }
            }
            if (!any) {
                active[s] = false;
                changed = true;
            }
        }
    }

    std::map<int, EndComponent> by_component;
    for (StateId s = 0; s < n; ++s) {
        if (!active[s]) continue;
        auto [it, inserted] = by_component.try_emplace(component[s]);
        if (inserted) it->second.states = StateSet(n);
        it->second.states.insert(s);
        auto& kept = it->second.kept[s];
        std::size_t local = 0;
        for (TransitionIndex t : model.transitions(s)) {
            if (allowed[t]) kept.push_back(local);
            ++local;
        }
    }

    std::vector<EndComponent> result;
    for (auto& [id, ec] : by_component) result.push_back(std::move(ec));
    std::sort(result.begin(), result.end(), [](const EndComponent& a, const EndComponent& b) {
        return a.states.members().front() < b.states.members().front();
    });
    return result;
}

StateSet QuotientMap::map_set(const StateSet& original) const {
    StateSet result(quotient.num_states());
    for (StateId s : original.members()) result.insert(to_quotient[s]);
    return result;
}

ValueVector QuotientMap::lift(const ValueVector& quotient_values) const {
    ValueVector result(to_quotient.size());
    for (std::size_t s = 0; s < to_quotient.size(); ++s) result[s] = quotient_values[to_quotient[s]];
    return result;
}

namespace {

void add_merged_transition(MdpBuilder& builder, const std::optional<std::string>& label,
                           std::span<const Branch> branches, const std::vector<StateId>& to_quotient) {
    std::vector<Branch> merged;
    for (const Branch& b : branches) {
        const StateId target = to_quotient[b.target];
        auto same = std::find_if(merged.begin(), merged.end(),
                                 [&](const Branch& m) { return m.target == target && m.reward == b.reward; });
        if (same != merged.end())
            same->probability += b.probability;
        else
            merged.push_back({b.probability, b.reward, target});
    }
    builder.add_transition(label);
    for (const Branch& b : merged) builder.add_branch(b.probability, b.reward, b.target);
}

}  // namespace

QuotientMap eliminate_end_components(const Mdp& model, const std::vector<EndComponent>& mecs,
                                     const StateSet& protect) {
    const std::size_t n = model.num_states();
    if (protect.size() != n) throw std::invalid_argument("protected set does not match the model");

    QuotientMap map;
    map.representative.resize(n);
    for (StateId s = 0; s < n; ++s) map.representative[s] = s;
    std::vector<int> owner(n, -1);

    for (std::size_t i = 0; i < mecs.size(); ++i) {
        const auto members = mecs[i].states.members();
        if (members.empty()) throw std::invalid_argument("empty end component");
        std::vector<StateId> protected_members;
        for (StateId s : members) {
            if (owner[s] != -1) throw std::invalid_argument("end components overlap");
            owner[s] = static_cast<int>(i);
            if (protect.contains(s)) protected_members.push_back(s);
        }
        if (protected_members.size() > 1)
            throw std::invalid_argument("end component contains more than one protected state");
        const StateId rep = protected_members.empty() ? members.front() : protected_members.front();
        for (StateId s : members) map.representative[s] = rep;
    }

    map.to_quotient.resize(n);
    StateId next = 0;
    std::vector<StateId> quotient_states;
    for (StateId s = 0; s < n; ++s) {
        if (map.representative[s] == s) {
            map.to_quotient[s] = next++;
            quotient_states.push_back(s);
        }
    }
    for (StateId s = 0; s < n; ++s) map.to_quotient[s] = map.to_quotient[map.representative[s]];

    MdpBuilder builder;
    for (StateId rep : quotient_states) {
        const StateId id = builder.add_state();
        if (owner[rep] == -1) {
            for (TransitionIndex t : model.transitions(rep))
                add_merged_transition(builder, model.label(t), model.branches(t), map.to_quotient);
            continue;
        }
        const EndComponent& ec = mecs[static_cast<std::size_t>(owner[rep])];
        bool any = false;
        for (StateId member : ec.states.members()) {
            const auto kept_it = ec.kept.find(member);
            std::size_t local = 0;
            for (TransitionIndex t : model.transitions(member)) {
                const bool kept = kept_it != ec.kept.end() &&
                                  std::find(kept_it->second.begin(), kept_it->second.end(), local) !=
                                      kept_it->second.end();
                ++local;
                if (kept) continue;
                add_merged_transition(builder, model.label(t), model.branches(t), map.to_quotient);
                any = true;
            }
        }
        if (!any) {
            builder.add_transition();
            builder.add_branch(1.0, 0.0, id);
        }
    }
    builder.set_initial(map.to_quotient[model.initial()]);
    map.quotient = std::move(builder).build();
    return map;
}

}  // namespace soundmdp
