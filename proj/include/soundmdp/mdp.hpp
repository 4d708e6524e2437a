#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <vector>

namespace soundmdp {

using StateId = std::uint32_t;
using TransitionIndex = std::size_t;

/// Tolerance on |sum of branch probabilities - 1| accepted by validate().
inline constexpr double kProbabilitySumTolerance = 1e-9;

struct Branch {
    double probability;
    double reward;
    StateId target;

    friend bool operator==(const Branch&, const Branch&) = default;
};

/// Bitset over the state ids of one model.
class StateSet {
public:
    StateSet() = default;
    explicit StateSet(std::size_t size, bool value = false) : bits_(size, value) {}
    static StateSet of(std::size_t size, std::initializer_list<StateId> members);

    std::size_t size() const { return bits_.size(); }
    bool contains(StateId s) const { return s < bits_.size() && bits_[s]; }
    void insert(StateId s) { bits_.at(s) = true; }
    void erase(StateId s) { bits_.at(s) = false; }
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    StateSet complement() const;
    StateSet operator|(const StateSet& other) const;
    StateSet operator&(const StateSet& other) const;
    std::vector<StateId> members() const;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<bool> bits_;
};

/// Explicit-state MDP in compressed-row form: states own a contiguous range of
/// transitions, transitions own a contiguous range of branches. Construction
/// does not validate, so ill-formed structures can be represented and reported
/// by validate().
class Mdp {
public:
    Mdp() = default;

    std::size_t num_states() const { return state_offsets_.empty() ? 0 : state_offsets_.size() - 1; }
    std::size_t num_transitions() const { return branch_offsets_.empty() ? 0 : branch_offsets_.size() - 1; }
    std::size_t num_branches() const { return branches_.size(); }
    StateId initial() const { return initial_; }

    /// Global indices of the transitions of state s, in insertion order.
    auto transitions(StateId s) const {
        return std::views::iota(state_offsets_[s], state_offsets_[s + 1]);
    }
    std::size_t num_transitions(StateId s) const { return state_offsets_[s + 1] - state_offsets_[s]; }
    TransitionIndex first_transition(StateId s) const { return state_offsets_[s]; }

    std::span<const Branch> branches(TransitionIndex t) const {
        return {branches_.data() + branch_offsets_[t], branch_offsets_[t + 1] - branch_offsets_[t]};
    }
    const std::optional<std::string>& label(TransitionIndex t) const { return labels_[t]; }

    // Raw arrays for the iteration kernels.
    std::span<const std::size_t> state_offsets() const { return state_offsets_; }
    std::span<const std::size_t> branch_offsets() const { return branch_offsets_; }
    std::span<const Branch> all_branches() const { return branches_; }

    friend bool operator==(const Mdp&, const Mdp&) = default;

private:
    friend class MdpBuilder;

    std::vector<std::size_t> state_offsets_;
    std::vector<std::size_t> branch_offsets_;
    std::vector<Branch> branches_;
    std::vector<std::optional<std::string>> labels_;
    StateId initial_ = 0;
};

/// Appends states, transitions and branches in order. add_transition() opens a
/// transition on the most recently added state; add_branch() appends to the
/// most recently opened transition.
class MdpBuilder {
public:
    MdpBuilder();

    StateId add_state();
    void add_transition(std::optional<std::string> label = std::nullopt);
    void add_branch(double probability, double reward, StateId target);
    void set_initial(StateId s) { model_.initial_ = s; }

    /// Copies state s of `source` (all transitions) as the next state.
    StateId copy_state(const Mdp& source, StateId s);

    Mdp build() &&;

private:
    Mdp model_;
};

enum class PropertyKind { pmax, pmin, emax, emin };
enum class WidthMode { relative, absolute };
enum class Optimization { max, min };

bool is_probability(PropertyKind kind);
Optimization optimization_of(PropertyKind kind);
std::string to_string(PropertyKind kind);
std::optional<PropertyKind> parse_property_kind(std::string_view text);
std::string to_string(WidthMode mode);

struct Property {
    PropertyKind kind = PropertyKind::pmax;
    StateSet goals;
    double epsilon = 1e-6;
    WidthMode width = WidthMode::relative;
};

/// Dense state -> [0, +inf] map.
class ValueVector {
public:
    ValueVector() = default;
    explicit ValueVector(std::size_t size, double value = 0.0) : values_(size, value) {}
    explicit ValueVector(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t s) { return values_[s]; }
    double operator[](std::size_t s) const { return values_[s]; }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }
    std::span<double> span() { return values_; }
    std::span<const double> span() const { return values_; }

    /// Pointwise order v ⪯ w.
    bool precedes(const ValueVector& other) const;
    bool has_nan() const;

    friend bool operator==(const ValueVector&, const ValueVector&) = default;

private:
    std::vector<double> values_;
};

struct Violation {
    std::optional<StateId> state;
    std::optional<std::size_t> transition;  // local index within the state
    std::string message;
};

/// Reports every structural problem; never throws.
std::vector<Violation> validate(const Mdp& model);
std::string describe(const Violation& violation);

/// Every goal keeps a single zero-reward probability-1 self-loop.
Mdp make_goals_absorbing(const Mdp& model, const StateSet& goals);
Mdp strip_rewards(const Mdp& model);
Mdp rebase_initial(const Mdp& model, StateId s);

}  // namespace soundmdp
