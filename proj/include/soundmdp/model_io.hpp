#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "soundmdp/mdp.hpp"

namespace soundmdp {

struct ModelDocument {
    int format_version = 1;
    Mdp model;
    std::map<std::string, StateId> named_states;
    std::optional<StateSet> declared_goals;

    /// Resolves a state label or a decimal id.
    std::optional<StateId> resolve(std::string_view token) const;
    /// Label of state s, if it has one.
    std::optional<std::string> name_of(StateId s) const;
};

class ParseError : public std::runtime_error {
public:
    enum class Kind { syntax, semantic, version };

    ParseError(Kind kind, std::size_t line, std::size_t column, const std::string& message);

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    Kind kind_;
    std::size_t line_;
    std::size_t column_;
};

// MDPX v1, line oriented, '#' starts a comment:
//
//   mdpx 1
//   states <n>
//   initial <id-or-label>
//   state <id> [label]
//   transition [label]
//   branch <prob> <reward> <target-id-or-label>
//   goal <id-or-label>...
//
// Numbers are decimals or exact fractions a/b. State ids must be declared in
// order 0..n-1; targets may refer forward.
ModelDocument parse_explicit(std::string_view text);
ModelDocument load_explicit(const std::filesystem::path& path);

/// Probabilities and rewards are printed with 17 significant digits.
std::string write_explicit(const ModelDocument& document);

/// The five-state example MDP with states ordered s0, s+, s-, s1, s2.
ModelDocument generate_example_me();

struct RandomModelParams {
    std::uint64_t seed = 0;
    std::size_t states = 4;
    std::size_t max_transitions = 2;
    std::size_t max_branches = 2;
    double reward_max = 4.0;
    std::size_t goal_count = 1;
    /// Absorbing non-goal states, placed before the goals.
    std::size_t sink_count = 0;
    /// Allows branches without progress towards the absorbing states and
    /// zero-reward back edges, so end components may appear.
    bool end_components = false;
};

/// Deterministic in the parameters. The last goal_count states are absorbing
/// goals, the sink_count states before them absorbing non-goals, the rest
/// transient; state 0 is initial.
/// Probabilities are k/d with d <= 12 and rewards multiples of 1/4.
ModelDocument generate_random(const RandomModelParams& params);

/// Chain s_0..s_n: s_0 -> s_1 surely, s_i -> s_{i+1} with p and back to s_0
/// with 1-p for 0<i<n, s_n absorbing goal.
ModelDocument generate_slow_chain(std::size_t n, double p);

}  // namespace soundmdp
