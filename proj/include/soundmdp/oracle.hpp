#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "soundmdp/mdp.hpp"

namespace soundmdp {

/// Non-negative rational or +inf.
struct ExactValue {
    bool infinite = false;
    mpq_class value = 0;

    static ExactValue inf() { return {true, 0}; }
    double to_double() const;
    std::string str() const;

    friend bool operator==(const ExactValue& a, const ExactValue& b) {
        return a.infinite == b.infinite && (a.infinite || a.value == b.value);
    }
    friend bool operator<(const ExactValue& a, const ExactValue& b) {
        if (a.infinite) return false;
        return b.infinite || a.value < b.value;
    }
};

/// Exact comparison of a double against an exact value.
bool leq(double x, const ExactValue& exact);
bool leq(const ExactValue& exact, double x);

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleOptions {
    std::uint64_t max_schedulers = 1'000'000;
};

struct OracleResult {
    std::vector<ExactValue> values;  // per state
    ExactValue at_initial;
    std::uint64_t schedulers = 0;
};

/// Recovers the rational a double was meant to denote: the one with the
/// smallest denominator among those that round to it.
mpq_class simplest_rational(double x);

/// Optimal reachability probability or expected reward for every state, by
/// enumerating memoryless deterministic schedulers and solving each induced
/// chain in exact rational arithmetic. Goal states are treated as absorbing.
/// Probability kinds ignore rewards. Each transition's probabilities must be
/// recoverable as rationals summing to exactly 1.
OracleResult oracle_exact(const Mdp& model, const Property& property, const OracleOptions& options = {});

}  // namespace soundmdp
