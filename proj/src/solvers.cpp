#include "soundmdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace soundmdp {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Flat view of the model for the sweep loops.
class Kernel {
public:
    explicit Kernel(const BellmanProblem& problem)
        : state_offsets_(problem.model->state_offsets().data()),
          branch_offsets_(problem.model->branch_offsets().data()),
          branches_(problem.model->all_branches().data()),
          maximize_(problem.opt == Optimization::max) {}

    double backup(StateId s, const ValueVector& v) const {
        double best = maximize_ ? -kInfinity : kInfinity;
        for (std::size_t t = state_offsets_[s]; t < state_offsets_[s + 1]; ++t) {
            double sum = 0.0;
            for (std::size_t i = branch_offsets_[t]; i < branch_offsets_[t + 1]; ++i) {
                const Branch& b = branches_[i];
                sum += b.probability * (b.reward + v[b.target]);
            }
            if (maximize_ ? sum > best : sum < best) best = sum;
        }
        return best;
    }

private:
    const std::size_t* state_offsets_;
    const std::size_t* branch_offsets_;
    const Branch* branches_;
    bool maximize_;
};

double error_contribution(ErrorMode mode, double v_new, double v_old) {
    if (v_new == v_old) return 0.0;
    if (mode == ErrorMode::absolute) return v_new - v_old;
    if (!(v_new > 0.0)) return 0.0;
    if (std::isinf(v_new)) return kInfinity;
    return (v_new - v_old) / v_new;
}

bool width_ok(WidthMode mode, double epsilon, double upper, double lower) {
    if (mode == WidthMode::relative) return upper - lower <= 2.0 * epsilon * lower;
    return upper - lower <= 2.0 * epsilon;
}

void check_deadline(const IterationOptions& options) {
    if (options.deadline && std::chrono::steady_clock::now() >= *options.deadline) throw DeadlineExceeded();
}

const SweepOrder& order_or_default(const IterationOptions& options, const BellmanProblem& problem,
                                   SweepOrder& storage) {
    if (!options.order.empty()) return options.order;
    storage = forward_order(problem);
    return storage;
}

// Gauss-Seidel sweeps on v. `budget` is the number of sweeps still allowed;
// `total` counts the sweeps of the enclosing solve and is advanced per sweep.
std::uint64_t gauss_seidel(const Kernel& kernel, ValueVector& v,
                           const ErrorCriterion& criterion, const SweepOrder& order, std::uint64_t budget,
                           std::uint64_t& total, const IterationOptions& options) {
    for (std::uint64_t sweep = 1;; ++sweep) {
        if (sweep > budget) throw IterationLimitExceeded(options.max_sweeps);
        check_deadline(options);
        double error = 0.0;
        for (StateId s : order) {
            const double v_new = kernel.backup(s, v);
            error = std::max(error, error_contribution(criterion.mode, v_new, v[s]));
            v[s] = v_new;
        }
        ++total;
        if (options.observer)
            options.observer({total, Phase::iteration, error, criterion.epsilon_vi, v, nullptr});
        if (error < criterion.epsilon_vi || error == 0.0) return sweep;
    }
}

SolveOutcome fixed_initial(const BellmanProblem& problem, std::string method) {
    const double value = problem.initial[problem.model->initial()];
    SolveOutcome outcome;
    outcome.method = std::move(method);
    outcome.value = value;
    outcome.lower = value;
    outcome.upper = value;
    outcome.status = SolveStatus::certified;
    return outcome;
}

}  // namespace

BellmanProblem make_probability_problem(std::shared_ptr<const Mdp> model, const StateSet& goals, Optimization opt,
                                        const StateSet& zero, const StateSet& one) {
    const std::size_t n = model->num_states();
    if (goals.size() != n || zero.size() != n || one.size() != n)
        throw std::invalid_argument("state set does not match the model");
    BellmanProblem problem;
    problem.opt = opt;
    problem.probability = true;
    problem.initial = ValueVector(n, 0.0);
    problem.unknowns = StateSet(n);
    for (StateId s = 0; s < n; ++s) {
        if (goals.contains(s) || one.contains(s))
            problem.initial[s] = 1.0;
        else if (!zero.contains(s))
            problem.unknowns.insert(s);
    }
    problem.model = std::move(model);
    return problem;
}

BellmanProblem make_reward_problem(std::shared_ptr<const Mdp> model, const StateSet& goals, Optimization opt,
                                   const StateSet& s_inf, const StateSet& zero) {
    const std::size_t n = model->num_states();
    if (goals.size() != n || s_inf.size() != n || (zero.size() != 0 && zero.size() != n))
        throw std::invalid_argument("state set does not match the model");
    BellmanProblem problem;
    problem.opt = opt;
    problem.probability = false;
    problem.initial = ValueVector(n, 0.0);
    problem.unknowns = StateSet(n);
    for (StateId s = 0; s < n; ++s) {
        if (s_inf.contains(s) && !goals.contains(s))
            problem.initial[s] = kInfinity;
        else if (!goals.contains(s) && !(zero.size() == n && zero.contains(s)))
            problem.unknowns.insert(s);
    }
    problem.model = std::move(model);
    return problem;
}

SweepOrder forward_order(const BellmanProblem& problem) { return problem.unknowns.members(); }

SweepOrder reverse_order(const BellmanProblem& problem) {
    SweepOrder order = problem.unknowns.members();
    std::reverse(order.begin(), order.end());
    return order;
}

SweepOrder random_order(const BellmanProblem& problem, std::uint64_t seed) {
    SweepOrder order = problem.unknowns.members();
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::certified: return "certified";
        case SolveStatus::unverified: return "unverified";
        case SolveStatus::sweep_limit: return "sweep_limit";
        case SolveStatus::timeout: return "timeout";
    }
    return "?";
}

ValueVector bellman_apply(const BellmanProblem& problem, const ValueVector& v) {
    const Mdp& model = *problem.model;
    if (v.size() != model.num_states()) throw std::invalid_argument("value vector size mismatch");
    const Kernel kernel(problem);
    ValueVector result(model.num_states());
    for (StateId s = 0; s < model.num_states(); ++s)
        result[s] = problem.unknowns.contains(s) ? kernel.backup(s, v) : problem.initial[s];
    return result;
}

std::uint64_t gsvi(const BellmanProblem& problem, ValueVector& v, const ErrorCriterion& criterion,
                   const IterationOptions& options) {
    if (v.size() != problem.model->num_states()) throw std::invalid_argument("value vector size mismatch");
    SweepOrder storage;
    const SweepOrder& order = order_or_default(options, problem, storage);
    std::uint64_t total = 0;
    return gauss_seidel(Kernel(problem), v, criterion, order, options.max_sweeps, total, options);
}

SolveOutcome plain_vi(const BellmanProblem& problem, const ErrorCriterion& criterion,
                      const IterationOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    SolveOutcome outcome;
    outcome.method = "vi";
    const StateId initial = problem.model->initial();
    ValueVector v = problem.initial;
    try {
        outcome.iterations = gsvi(problem, v, criterion, options);
        outcome.status = SolveStatus::unverified;
    } catch (const IterationLimitExceeded&) {
        outcome.iterations = options.max_sweeps;
        outcome.status = SolveStatus::sweep_limit;
    } catch (const DeadlineExceeded&) {
        outcome.status = SolveStatus::timeout;
    }
    outcome.value = v[initial];
    outcome.lower = v[initial];
    outcome.wall_time = std::chrono::steady_clock::now() - start;
    return outcome;
}

SolveOutcome ovi(const BellmanProblem& problem, const Property& property, const OviOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const StateId initial = problem.model->initial();
    if (!problem.unknowns.contains(initial)) return fixed_initial(problem, "ovi");

    const Kernel kernel(problem);
    const IterationOptions& iteration = options.iteration;
    SweepOrder storage;
    const SweepOrder& order = order_or_default(iteration, problem, storage);
    const double epsilon = property.epsilon;
    const auto unknowns = problem.unknowns.members();

    SolveOutcome outcome;
    outcome.method = "ovi";
    ValueVector v = problem.initial;
    ValueVector u;
    double epsilon_vi = options.initial_epsilon_vi.value_or(epsilon);
    std::uint64_t total = 0;

    auto finish = [&](SolveStatus status) {
        outcome.status = status;
        outcome.iterations = total;
        outcome.wall_time = std::chrono::steady_clock::now() - start;
        return outcome;
    };

    try {
        while (true) {
            const std::uint64_t iteration_sweeps =
                gauss_seidel(kernel, v, {options.error_mode, epsilon_vi}, order,
                             iteration.max_sweeps - total, total, iteration);

            u = v;
            for (StateId s : unknowns) {
                u[s] = property.width == WidthMode::relative ? v[s] * (1.0 + epsilon) : v[s] + epsilon;
                if (problem.probability) u[s] = std::min(u[s], 1.0);
            }
            ++outcome.verification_phases;
            if (options.guess_observer) options.guess_observer(u);

            std::uint64_t verification_sweeps = 0;
            double error = 0.0;
            bool up = true;
            bool cross = false;
            while (true) {
                if (total >= iteration.max_sweeps) throw IterationLimitExceeded(iteration.max_sweeps);
                check_deadline(iteration);
                error = 0.0;
                up = true;
                bool down = true;
                cross = false;
                for (StateId s : order) {
                    const double v_new = kernel.backup(s, v);
                    const double u_new = kernel.backup(s, u);
                    error = std::max(error, error_contribution(options.error_mode, v_new, v[s]));
                    if (u_new < u[s])
                        up = false;
                    else if (u_new > u[s])
                        down = false;
                    if (u_new < v_new) cross = true;
                    v[s] = v_new;
                    u[s] = u_new;
                }
                ++total;
                ++verification_sweeps;
                if (iteration.observer) iteration.observer({total, Phase::verification, error, epsilon_vi, v, &u});

                if (cross) break;
                // After an in-place sweep in which nothing increased, Φ(u) ⪯ u
                // holds for the updated u, so it bounds the least fixed point.
                if (down && width_ok(property.width, epsilon, u[initial], v[initial])) {
                    outcome.value = 0.5 * (u[initial] + v[initial]);
                    outcome.lower = v[initial];
                    outcome.upper = u[initial];
                    return finish(SolveStatus::certified);
                }
                if (up) break;
                if (static_cast<double>(verification_sweeps) >
                    options.verification_factor * static_cast<double>(iteration_sweeps))
                    break;
            }
            ++outcome.cancelled_verifications;
            if (options.unique_fixed_point && up && !cross) v = u;
            epsilon_vi = error / 2.0;
        }
    } catch (const IterationLimitExceeded&) {
        outcome.value = v[initial];
        outcome.lower = v[initial];
        return finish(SolveStatus::sweep_limit);
    } catch (const DeadlineExceeded&) {
        outcome.value = v[initial];
        outcome.lower = v[initial];
        return finish(SolveStatus::timeout);
    }
}

SolveOutcome interval_iteration(const BellmanProblem& problem, const Property& property,
                                const ValueVector& upper_init, const IterationOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = problem.model->num_states();
    if (upper_init.size() != n) throw std::invalid_argument("upper vector size mismatch");
    const StateId initial = problem.model->initial();

    ValueVector v = problem.initial;
    ValueVector u = upper_init;
    for (StateId s = 0; s < n; ++s) {
        if (!problem.unknowns.contains(s)) u[s] = v[s];
        if (!(v[s] <= u[s]))
            throw std::invalid_argument("upper vector starts below the lower vector at state " + std::to_string(s));
    }
    if (!problem.unknowns.contains(initial)) return fixed_initial(problem, "ii");

    const Kernel kernel(problem);
    SweepOrder storage;
    const SweepOrder& order = order_or_default(options, problem, storage);

    SolveOutcome outcome;
    outcome.method = "ii";
    auto finish = [&](SolveStatus status) {
        outcome.lower = v[initial];
        outcome.upper = u[initial];
        outcome.status = status;
        outcome.wall_time = std::chrono::steady_clock::now() - start;
        return outcome;
    };

    try {
        while (true) {
            if (outcome.iterations >= options.max_sweeps) throw IterationLimitExceeded(options.max_sweeps);
            check_deadline(options);
            for (StateId s : order) {
                const double v_new = kernel.backup(s, v);
                const double u_new = kernel.backup(s, u);
                if (u_new < v_new)
                    throw std::invalid_argument("upper vector crossed the lower vector at state " +
                                                std::to_string(s));
                v[s] = v_new;
                u[s] = u_new;
            }
            ++outcome.iterations;
            if (options.observer)
                options.observer({outcome.iterations, Phase::interval, u[initial] - v[initial], 0.0, v, &u});
            if (width_ok(property.width, property.epsilon, u[initial], v[initial])) {
                outcome.value = 0.5 * (u[initial] + v[initial]);
                return finish(SolveStatus::certified);
            }
        }
    } catch (const IterationLimitExceeded&) {
        outcome.value = v[initial];
        return finish(SolveStatus::sweep_limit);
    } catch (const DeadlineExceeded&) {
        outcome.value = v[initial];
        return finish(SolveStatus::timeout);
    }
}

ValueVector reward_upper_init(const Mdp& model, const StateSet& goals, Optimization opt, const StateSet& s_inf) {
    (void)opt;  // the bound holds for both optimisation directions
    const std::size_t n = model.num_states();
    if (goals.size() != n || s_inf.size() != n) throw std::invalid_argument("state set does not match the model");
    if (s_inf.contains(model.initial()) && !goals.contains(model.initial()))
        throw std::invalid_argument("initial state lies in S-infinity");

    std::size_t transient = 0;
    double max_reward = 0.0;
    double min_probability = 1.0;
    for (StateId s = 0; s < n; ++s) {
        if (goals.contains(s) || s_inf.contains(s)) continue;
        ++transient;
        for (TransitionIndex t : model.transitions(s)) {
            for (const Branch& b : model.branches(t)) {
                max_reward = std::max(max_reward, b.reward);
                if (b.probability > 0.0) min_probability = std::min(min_probability, b.probability);
            }
        }
    }

    double bound = 0.0;
    if (transient > 0 && max_reward > 0.0) {
        const double steps = static_cast<double>(transient);
        bound = max_reward * steps / std::pow(min_probability, steps);
        if (!std::isfinite(bound))
            throw NoFiniteBound("reward upper bound overflows: R_max=" + std::to_string(max_reward) +
                                ", q=" + std::to_string(min_probability) + ", n=" + std::to_string(transient));
    }

    ValueVector upper(n, 0.0);
    for (StateId s = 0; s < n; ++s) {
        if (goals.contains(s)) continue;
        upper[s] = s_inf.contains(s) ? kInfinity : bound;
    }
    return upper;
}

}  // namespace soundmdp
