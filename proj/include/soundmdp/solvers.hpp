#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soundmdp/mdp.hpp"

namespace soundmdp {

/// Bellman operator data. States outside `unknowns` are never updated and
/// keep their `initial` value, which therefore carries the boundary value of
/// every fixed state (goals, prob0 states, S∞ states, ...).
struct BellmanProblem {
    std::shared_ptr<const Mdp> model;
    Optimization opt = Optimization::max;
    StateSet unknowns;
    ValueVector initial;
    /// Upper guesses are clamped to 1.
    bool probability = true;
};

/// Probabilities: unknowns = S \ (goals ∪ zero ∪ one), goals and `one` start
/// at 1, everything else at 0. `model` must already be reward-free.
BellmanProblem make_probability_problem(std::shared_ptr<const Mdp> model, const StateSet& goals, Optimization opt,
                                        const StateSet& zero, const StateSet& one);
/// Expected rewards: unknowns = S \ (goals ∪ s_inf ∪ zero), S∞ states start at
/// +inf. An empty `zero` set means none.
BellmanProblem make_reward_problem(std::shared_ptr<const Mdp> model, const StateSet& goals, Optimization opt,
                                   const StateSet& s_inf, const StateSet& zero = StateSet());

enum class ErrorMode { relative, absolute };

struct ErrorCriterion {
    ErrorMode mode = ErrorMode::relative;
    double epsilon_vi = 1e-6;
};

/// Update order over the unknowns.
using SweepOrder = std::vector<StateId>;
SweepOrder forward_order(const BellmanProblem& problem);
SweepOrder reverse_order(const BellmanProblem& problem);
SweepOrder random_order(const BellmanProblem& problem, std::uint64_t seed);

enum class Phase { iteration, verification, interval };

struct SweepRecord {
    std::uint64_t sweep;  // 1-based over the whole solve
    Phase phase;
    double error;
    /// Stopping threshold of the current (or, while verifying, the preceding)
    /// iteration phase; 0 in interval iteration.
    double epsilon_vi;
    const ValueVector& lower;
    const ValueVector* upper;  // null outside verification / interval sweeps
};
using SweepObserver = std::function<void(const SweepRecord&)>;

struct IterationOptions {
    SweepOrder order;  // empty = forward order
    std::uint64_t max_sweeps = 10'000'000;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    SweepObserver observer;
};

class IterationLimitExceeded : public std::runtime_error {
public:
    explicit IterationLimitExceeded(std::uint64_t sweeps)
        : std::runtime_error("iteration limit of " + std::to_string(sweeps) + " sweeps exceeded"), sweeps_(sweeps) {}
    std::uint64_t sweeps() const { return sweeps_; }

private:
    std::uint64_t sweeps_;
};

class DeadlineExceeded : public std::runtime_error {
public:
    DeadlineExceeded() : std::runtime_error("deadline exceeded") {}
};

/// One application of the Bellman operator, into a fresh vector.
ValueVector bellman_apply(const BellmanProblem& problem, const ValueVector& v);

/// Gauss-Seidel value iteration in place until a sweep's error drops below
/// epsilon_vi (or is exactly zero). Returns the number of sweeps. Throws
/// IterationLimitExceeded / DeadlineExceeded.
std::uint64_t gsvi(const BellmanProblem& problem, ValueVector& v, const ErrorCriterion& criterion,
                   const IterationOptions& options = {});

enum class SolveStatus {
    certified,     // value lies in [lower, upper]
    unverified,    // plain VI: no guarantee
    sweep_limit,   // safety cap hit; lower is still a sound lower bound
    timeout,
};
std::string to_string(SolveStatus status);

struct SolveOutcome {
    std::string method;
    double value = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::uint64_t iterations = 0;  // total sweeps
    std::uint64_t verification_phases = 0;
    std::uint64_t cancelled_verifications = 0;
    std::chrono::nanoseconds wall_time{0};
    SolveStatus status = SolveStatus::unverified;
};

struct OviOptions {
    IterationOptions iteration;
    ErrorMode error_mode = ErrorMode::relative;
    /// epsilon_vi for the first iteration phase; defaults to the property's epsilon.
    std::optional<double> initial_epsilon_vi;
    /// Caller asserts the Bellman operator has a unique fixed point, which
    /// enables replacing v by u after an all-up verification sweep.
    bool unique_fixed_point = false;
    /// A verification phase is cancelled once it has taken more than this many
    /// times the sweeps of the preceding iteration phase.
    double verification_factor = 10.0;
    /// Called with every freshly guessed upper vector.
    std::function<void(const ValueVector& guess)> guess_observer;
};

/// Optimistic value iteration.
SolveOutcome ovi(const BellmanProblem& problem, const Property& property, const OviOptions& options = {});

/// Interval iteration from `initial` (below) and `upper_init` (above). Throws
/// std::invalid_argument when the upper vector starts below or crosses the
/// lower one.
SolveOutcome interval_iteration(const BellmanProblem& problem, const Property& property,
                                const ValueVector& upper_init, const IterationOptions& options = {});

/// Gauss-Seidel VI with the standard stopping criterion; no certificate.
SolveOutcome plain_vi(const BellmanProblem& problem, const ErrorCriterion& criterion,
                      const IterationOptions& options = {});

class NoFiniteBound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Conservative upper bound on expected rewards: R_max * n / q^n on every
/// non-goal state outside S∞ (n = their number, q = smallest branch
/// probability), 0 on goals, +inf on S∞.
ValueVector reward_upper_init(const Mdp& model, const StateSet& goals, Optimization opt, const StateSet& s_inf);

}  // namespace soundmdp
