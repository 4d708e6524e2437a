#pragma once

#include <map>
#include <string>
#include <vector>

#include "soundmdp/graph.hpp"
#include "soundmdp/model_io.hpp"
#include "soundmdp/oracle.hpp"
#include "soundmdp/solvers.hpp"

namespace support {

using namespace soundmdp;

// State ids of the example model.
inline constexpr StateId kS0 = 0;
inline constexpr StateId kSPlus = 1;
inline constexpr StateId kSMinus = 2;
inline constexpr StateId kS1 = 3;
inline constexpr StateId kS2 = 4;

/// Hand-written MDPX text of the example model.
std::string example_text();

/// Example model with s+ absorbing and rewards stripped.
Mdp example_zero();

/// Pmax(<> s+) on example_zero() with s- fixed at 0: unknowns s0, s1, s2.
BellmanProblem example_pmax_problem();

/// Small random model parameters derived from a seed: 2..6 states, at most
/// two transitions per state.
RandomModelParams small_params(std::uint64_t seed, bool end_components);

/// All sets that form an end component together with every zero-reward
/// transition kept inside them; found by checking every subset.
std::vector<StateSet> brute_force_end_components(const Mdp& model);
/// Inclusion-maximal members of brute_force_end_components().
std::vector<StateSet> brute_force_mecs(const Mdp& model);
/// Local indices of the transitions of s whose branches all have reward 0
/// and stay inside `states`.
std::vector<std::size_t> internal_zero_transitions(const Mdp& model, const StateSet& states, StateId s);

/// Bellman problem exactly as the pipeline builds it for random models in the
/// unique fixed point regime: goals absorbing, prob0 / S-infinity fixed.
BellmanProblem standard_problem(const Mdp& model, const StateSet& goals, PropertyKind kind);

/// Exact comparisons with a relative slack of 1e-12 for floating-point rounding.
bool below_with_slack(double x, const ExactValue& exact);
bool above_with_slack(double x, const ExactValue& exact);

}  // namespace support
