#pragma once

#include <map>
#include <vector>

#include "soundmdp/mdp.hpp"

namespace soundmdp {

// Qualitative reachability. All of these assume goal states are absorbing and look
// only at which branches exist, never at their probabilities.

/// States whose optimal (max or min) probability of reaching the goals is 0.
StateSet prob0_set(const Mdp& model, const StateSet& goals, Optimization opt);
/// States whose optimal (max or min) probability of reaching the goals is 1.
StateSet prob1_set(const Mdp& model, const StateSet& goals, Optimization opt);
/// States from which the pessimal probability of reaching the goals is below 1,
/// i.e. the expected reward is infinite: opt=max uses Pmin, opt=min uses Pmax.
StateSet s_infinity(const Mdp& model, const StateSet& goals, Optimization opt);
/// States whose optimal expected reward is exactly 0, goals included. Unlike
/// the three sets above this one looks at which rewards are zero.
StateSet reward_zero_set(const Mdp& model, const StateSet& goals, Optimization opt);

/// A zero-reward sub-MDP whose graph is strongly connected.
struct EndComponent {
    StateSet states;
    /// Local transition indices per member state.
    std::map<StateId, std::vector<std::size_t>> kept;
};

/// Maximal end components, ordered by smallest member. Transitions with a
/// positive-reward branch never belong to an end component.
std::vector<EndComponent> mec_decomposition(const Mdp& model);

struct QuotientMap {
    /// Original state -> original state standing for its end component.
    std::vector<StateId> representative;
    /// Original state -> state of the quotient model.
    std::vector<StateId> to_quotient;
    Mdp quotient;

    StateSet map_set(const StateSet& original) const;
    ValueVector lift(const ValueVector& quotient_values) const;
};

/// Collapses every end component into one state that keeps all transitions
/// leaving it. A component containing a protected state is represented by that
/// state; otherwise by its smallest member. A component without exits becomes a
/// state with a zero-reward self-loop.
QuotientMap eliminate_end_components(const Mdp& model, const std::vector<EndComponent>& mecs,
                                     const StateSet& protect);

}  // namespace soundmdp
