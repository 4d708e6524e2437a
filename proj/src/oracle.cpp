#include "soundmdp/oracle.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace soundmdp {

double ExactValue::to_double() const {
    if (infinite) return std::numeric_limits<double>::infinity();
    // get_d truncates; pick the nearer of the two neighbouring doubles
    const double truncated = value.get_d();
    const double away = std::nextafter(truncated, value > 0 ? std::numeric_limits<double>::infinity()
                                                            : -std::numeric_limits<double>::infinity());
    if (!std::isfinite(away)) return truncated;
    return abs(mpq_class(away) - value) < abs(mpq_class(truncated) - value) ? away : truncated;
}

std::string ExactValue::str() const { return infinite ? "inf" : value.get_str(); }

bool leq(double x, const ExactValue& exact) {
    if (exact.infinite) return true;
    if (std::isinf(x)) return false;
    return mpq_class(x) <= exact.value;
}

bool leq(const ExactValue& exact, double x) {
    if (std::isinf(x)) return true;
    if (exact.infinite) return false;
    return exact.value <= mpq_class(x);
}

namespace {

mpz_class floor_of(const mpq_class& q) {
    mpz_class result;
    mpz_fdiv_q(result.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return result;
}

// Simplest rational strictly inside (lo, hi), 0 <= lo < hi.
mpq_class simplest_between(const mpq_class& lo, const mpq_class& hi) {
    const mpz_class whole = floor_of(lo);
    if (mpq_class(whole + 1) < hi) return mpq_class(whole + 1);
    const mpq_class low_frac = lo - whole;
    const mpq_class high_frac = hi - whole;
    if (low_frac == 0) {
        const mpz_class y = floor_of(1 / high_frac) + 1;
        mpq_class result = whole + mpq_class(1, 1) / mpq_class(y);
        result.canonicalize();
        return result;
    }
    mpq_class result = whole + 1 / simplest_between(1 / high_frac, 1 / low_frac);
    result.canonicalize();
    return result;
}

}  // namespace

mpq_class simplest_rational(double x) {
    if (!std::isfinite(x)) throw OracleError("cannot convert a non-finite number to a rational");
    if (x == 0.0) return 0;
    if (x < 0.0) return -simplest_rational(-x);
    const mpq_class below(std::nextafter(x, 0.0));
    const mpq_class above(std::nextafter(x, std::numeric_limits<double>::infinity()));
    const mpq_class exact(x);
    const mpq_class lo = (below + exact) / 2;
    const mpq_class hi = (exact + above) / 2;
    return simplest_between(lo, hi);
}

namespace {

struct ExactBranch {
    mpq_class probability;
    mpq_class reward;
    StateId target;
};

using ExactTransition = std::vector<ExactBranch>;

std::vector<std::vector<ExactTransition>> exact_model(const Mdp& model) {
    std::vector<std::vector<ExactTransition>> result(model.num_states());
    for (StateId s = 0; s < model.num_states(); ++s) {
        for (TransitionIndex t : model.transitions(s)) {
            ExactTransition transition;
            mpq_class sum = 0;
            for (const Branch& b : model.branches(t)) {
                transition.push_back({simplest_rational(b.probability), simplest_rational(b.reward), b.target});
                sum += transition.back().probability;
            }
            if (transition.empty()) throw OracleError("transition without branches at state " + std::to_string(s));
            if (sum != 1) {
                // Absorb a rounding-level discrepancy into the last branch.
                const mpq_class gap = 1 - sum;
                if (abs(gap) > mpq_class("1/1000000000000"))
                    throw OracleError("probabilities at state " + std::to_string(s) + " do not sum to 1");
                transition.back().probability += gap;
                if (transition.back().probability <= 0)
                    throw OracleError("probabilities at state " + std::to_string(s) + " do not sum to 1");
            }
            result[s].push_back(std::move(transition));
        }
    }
    return result;
}

// Solves A x = b in place by Gaussian elimination.
std::vector<mpq_class> solve_linear(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b) {
    const std::size_t m = b.size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        while (pivot < m && a[pivot][col] == 0) ++pivot;
        if (pivot == m) throw OracleError("singular linear system");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = 0; row < m; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const mpq_class factor = a[row][col] / a[col][col];
            for (std::size_t k = col; k < m; ++k) a[row][k] -= factor * a[col][k];
            b[row] -= factor * b[col];
        }
    }
    for (std::size_t i = 0; i < m; ++i) b[i] /= a[i][i];
    return b;
}

class ChainSolver {
public:
    ChainSolver(const std::vector<std::vector<ExactTransition>>& model, const StateSet& goals, bool probability)
        : model_(model), goals_(goals), probability_(probability), n_(model.size()) {}

    std::vector<ExactValue> solve(const std::vector<std::size_t>& choice) const {
        std::vector<const ExactTransition*> chosen(n_, nullptr);
        std::vector<std::vector<StateId>> pred(n_);
        for (StateId s = 0; s < n_; ++s) {
            if (goals_.contains(s)) continue;
            chosen[s] = &model_[s][choice[s]];
            for (const ExactBranch& b : *chosen[s]) pred[b.target].push_back(s);
        }

        // reach: can reach a goal. sure: cannot reach a non-reaching state.
        std::vector<bool> reach(n_, false);
        std::deque<StateId> queue;
        for (StateId s = 0; s < n_; ++s)
            if (goals_.contains(s)) reach[s] = true, queue.push_back(s);
        while (!queue.empty()) {
            const StateId s = queue.front();
            queue.pop_front();
            for (StateId p : pred[s])
                if (!reach[p]) reach[p] = true, queue.push_back(p);
        }
        std::vector<bool> doomed(n_, false);
        for (StateId s = 0; s < n_; ++s)
            if (!reach[s]) doomed[s] = true, queue.push_back(s);
        while (!queue.empty()) {
            const StateId s = queue.front();
            queue.pop_front();
            for (StateId p : pred[s])
                if (!doomed[p]) doomed[p] = true, queue.push_back(p);
        }

        std::vector<ExactValue> values(n_);
        std::vector<int> index(n_, -1);
        std::vector<StateId> unknown;
        for (StateId s = 0; s < n_; ++s) {
            if (goals_.contains(s)) {
                values[s].value = probability_ ? 1 : 0;
            } else if (probability_ ? !reach[s] : doomed[s]) {
                if (probability_)
                    values[s].value = 0;
                else
                    values[s] = ExactValue::inf();
            } else if (probability_ && !doomed[s]) {
                values[s].value = 1;
            } else {
                index[s] = static_cast<int>(unknown.size());
                unknown.push_back(s);
            }
        }
        if (unknown.empty()) return values;

        const std::size_t m = unknown.size();
        std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(m, 0));
        std::vector<mpq_class> rhs(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            a[i][i] = 1;
            for (const ExactBranch& b : *chosen[unknown[i]]) {
                if (!probability_) rhs[i] += b.probability * b.reward;
                if (index[b.target] >= 0)
                    a[i][static_cast<std::size_t>(index[b.target])] -= b.probability;
                else if (probability_)
                    rhs[i] += b.probability * values[b.target].value;
            }
        }
        const auto x = solve_linear(std::move(a), std::move(rhs));
        for (std::size_t i = 0; i < m; ++i) values[unknown[i]].value = x[i];
        return values;
    }

private:
    const std::vector<std::vector<ExactTransition>>& model_;
    const StateSet& goals_;
    bool probability_;
    std::size_t n_;
};

}  // namespace

OracleResult oracle_exact(const Mdp& model, const Property& property, const OracleOptions& options) {
    const std::size_t n = model.num_states();
    if (property.goals.size() != n) throw OracleError("goal set does not match the model");
    const auto exact = exact_model(model);
    const bool probability = is_probability(property.kind);
    const bool maximize = optimization_of(property.kind) == Optimization::max;

    std::vector<StateId> choosers;
    std::uint64_t count = 1;
    for (StateId s = 0; s < n; ++s) {
        if (property.goals.contains(s)) continue;
        if (exact[s].empty()) throw OracleError("state " + std::to_string(s) + " has no transitions");
        if (exact[s].size() > 1) {
            choosers.push_back(s);
            count *= exact[s].size();
            if (count > options.max_schedulers)
                throw OracleError("more than " + std::to_string(options.max_schedulers) + " schedulers");
        }
    }

    const ChainSolver solver(exact, property.goals, probability);
    std::vector<std::size_t> choice(n, 0);
    OracleResult result;
    result.schedulers = count;
    for (std::uint64_t k = 0; k < count; ++k) {
        auto values = solver.solve(choice);
        if (k == 0) {
            result.values = std::move(values);
        } else {
            for (StateId s = 0; s < n; ++s) {
                const bool better = maximize ? result.values[s] < values[s] : values[s] < result.values[s];
                if (better) result.values[s] = values[s];
            }
        }
        for (StateId s : choosers) {
            if (++choice[s] < exact[s].size()) break;
            choice[s] = 0;
        }
    }
    result.at_initial = result.values[model.initial()];
    return result;
}

}  // namespace soundmdp
