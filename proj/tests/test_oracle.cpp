#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "support.hpp"

using namespace soundmdp;
using namespace support;

namespace {

// Exact values below were computed once by tests/support/exact_values.py, a
// separate rational solver, and frozen.

ExactValue q(const char* text) {
    if (std::string(text) == "inf") return ExactValue::inf();
    return ExactValue{false, mpq_class(text)};
}

std::vector<ExactValue> values(std::initializer_list<const char*> texts) {
    std::vector<ExactValue> out;
    for (const char* t : texts) out.push_back(q(t));
    return out;
}

struct Frozen {
    std::uint64_t seed;
    std::size_t max_branches;
    std::size_t sinks;
    bool end_components;
    std::vector<ExactValue> pmax, pmin, emax, emin;
};

ModelDocument frozen_model(const Frozen& f) {
    RandomModelParams params;
    params.seed = f.seed;
    params.states = 6;
    params.max_transitions = 2;
    params.max_branches = f.max_branches;
    params.reward_max = 4.0;
    params.goal_count = 1;
    params.sink_count = f.sinks;
    params.end_components = f.end_components;
    return generate_random(params);
}

const std::vector<Frozen>& frozen_cases() {
    static const std::vector<Frozen> cases = {
        {3, 3, 1, false,
         values({"1", "1", "1", "1", "0", "1"}),
         values({"1/12", "1/36", "0", "1/3", "0", "1"}),
         values({"inf", "inf", "inf", "inf", "inf", "0"}),
         values({"3/2", "11/8", "11/4", "0", "inf", "0"})},
        {11, 3, 1, false,
         values({"3/13", "1", "9/13", "1", "0", "1"}),
         values({"3/13", "0", "9/13", "0", "0", "1"}),
         values({"inf", "inf", "inf", "inf", "inf", "0"}),
         values({"inf", "4", "inf", "0", "inf", "0"})},
        {29, 3, 1, false,
         values({"1", "1/5", "4/5", "1", "0", "1"}),
         values({"1/3", "0", "0", "1", "0", "1"}),
         values({"inf", "inf", "inf", "3", "inf", "0"}),
         values({"3", "inf", "inf", "3", "inf", "0"})},
        {5, 2, 1, true,
         values({"1", "1", "1", "0", "0", "1"}),
         values({"0", "1", "1", "0", "0", "1"}),
         values({"inf", "0", "1/5", "inf", "inf", "0"}),
         values({"0", "0", "1/5", "inf", "inf", "0"})},
        {7, 3, 0, false,
         values({"1", "1", "1", "1", "1", "1"}),
         values({"1", "1", "1", "1", "1", "1"}),
         values({"141/20", "61/4", "501/70", "0", "61/4", "0"}),
         values({"4", "0", "27/14", "0", "0", "0"})},
    };
    return cases;
}

Property pmax_of_splus() { return Property{PropertyKind::pmax, StateSet::of(5, {kSPlus})}; }

std::vector<ExactValue> solve(const Mdp& model, const StateSet& goals, PropertyKind kind) {
    return oracle_exact(model, Property{kind, goals}).values;
}

}  // namespace

TEST_CASE("simplest rational") {
    CHECK(simplest_rational(0.1) == mpq_class("1/10"));
    CHECK(simplest_rational(1.0 / 3.0) == mpq_class("1/3"));
    CHECK(simplest_rational(0.8) == mpq_class("4/5"));
    CHECK(simplest_rational(0.25) == mpq_class("1/4"));
    CHECK(simplest_rational(0.0) == 0);
    CHECK(simplest_rational(3.0) == 3);
    CHECK(simplest_rational(-0.5) == mpq_class("-1/2"));
    CHECK(simplest_rational(2.0 / 7.0) == mpq_class("2/7"));
    CHECK(simplest_rational(12345.678) == mpq_class("6172839/500"));
    CHECK_THROWS_AS(simplest_rational(std::numeric_limits<double>::infinity()), OracleError);
    CHECK_THROWS_AS(simplest_rational(std::nan("")), OracleError);
}

TEST_CASE("simplest rational rounds back to the input") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = dist(rng);
        const mpq_class r = simplest_rational(x);
        const mpq_class half_ulp = (mpq_class(std::nextafter(x, 200.0)) - mpq_class(x)) / 2;
        CHECK(abs(r - mpq_class(x)) < half_ulp);
        CHECK(ExactValue{false, r}.to_double() == x);
    }
    for (int d = 1; d <= 12; ++d)
        for (int k = 0; k <= d; ++k) {
            mpq_class expected(k, d);
            expected.canonicalize();
            CHECK(simplest_rational(static_cast<double>(k) / d) == expected);
        }
}

TEST_CASE("exact values and comparisons") {
    CHECK(q("3/5").str() == "3/5");
    CHECK(ExactValue::inf().str() == "inf");
    CHECK(q("3/5").to_double() == 0.6);
    CHECK(std::isinf(ExactValue::inf().to_double()));
    CHECK(q("1/2") < q("3/5"));
    CHECK(q("3/5") < ExactValue::inf());
    CHECK_FALSE(ExactValue::inf() < ExactValue::inf());
    CHECK(ExactValue::inf() == ExactValue::inf());
    CHECK(leq(0.1, q("1/10")) == (mpq_class(0.1) <= mpq_class("1/10")));
    CHECK(leq(0.5, q("1/2")));
    CHECK(leq(q("1/2"), 0.5));
    CHECK(leq(1e300, ExactValue::inf()));
    CHECK_FALSE(leq(ExactValue::inf(), 1e300));
    CHECK(leq(ExactValue::inf(), std::numeric_limits<double>::infinity()));
}

TEST_CASE("example model maximum probability") {
    const OracleResult r = oracle_exact(example_zero(), pmax_of_splus());
    CHECK(r.at_initial == q("1/2"));
    CHECK(r.values == values({"1/2", "1", "0", "2/5", "2/5"}));
    CHECK(r.schedulers == 4);
}

TEST_CASE("example model minimum probability") {
    const OracleResult r =
        oracle_exact(generate_example_me().model, Property{PropertyKind::pmin, StateSet::of(5, {kSPlus})});
    CHECK(r.values == values({"0", "1", "0", "0", "0"}));
}

TEST_CASE("example model expected rewards") {
    const Mdp me = generate_example_me().model;
    const StateSet goals = StateSet::of(5, {kSPlus, kSMinus});
    CHECK(solve(me, goals, PropertyKind::emin) == values({"3/5", "0", "0", "3/5", "3/5"}));
    CHECK(solve(me, goals, PropertyKind::emax) == values({"inf", "0", "0", "inf", "inf"}));

    const Mdp absorbed = make_goals_absorbing(me, goals);
    const QuotientMap map = eliminate_end_components(absorbed, mec_decomposition(absorbed), goals);
    const OracleResult quotient =
        oracle_exact(map.quotient, Property{PropertyKind::emin, map.map_set(goals)});
    CHECK(quotient.at_initial == q("3/5"));
}

TEST_CASE("absorbing goal as initial state") {
    const Mdp me = rebase_initial(generate_example_me().model, kSPlus);
    const StateSet goals = StateSet::of(5, {kSPlus});
    CHECK(oracle_exact(me, Property{PropertyKind::pmax, goals}).at_initial == q("1"));
    CHECK(oracle_exact(me, Property{PropertyKind::pmin, goals}).at_initial == q("1"));
    CHECK(oracle_exact(me, Property{PropertyKind::emax, goals}).at_initial == q("0"));
    CHECK(oracle_exact(me, Property{PropertyKind::emin, goals}).at_initial == q("0"));
}

TEST_CASE("frozen random models") {
    for (const Frozen& f : frozen_cases()) {
        CAPTURE(f.seed);
        const ModelDocument doc = frozen_model(f);
        REQUIRE(doc.model.num_states() == 6);
        CHECK(solve(doc.model, *doc.declared_goals, PropertyKind::pmax) == f.pmax);
        CHECK(solve(doc.model, *doc.declared_goals, PropertyKind::pmin) == f.pmin);
        CHECK(solve(doc.model, *doc.declared_goals, PropertyKind::emax) == f.emax);
        CHECK(solve(doc.model, *doc.declared_goals, PropertyKind::emin) == f.emin);
    }
}

TEST_CASE("slow chains reach the goal surely") {
    for (const auto& [n, p] : {std::pair{2, 0.5}, std::pair{5, 0.3}, std::pair{10, 0.5}}) {
        const ModelDocument chain = generate_slow_chain(n, p);
        const OracleResult r = oracle_exact(chain.model, Property{PropertyKind::pmax, *chain.declared_goals});
        for (const ExactValue& v : r.values) CHECK(v == q("1"));
    }
}

TEST_CASE("scheduler guard") {
    OracleOptions tight;
    tight.max_schedulers = 3;
    CHECK_THROWS_AS(oracle_exact(example_zero(), pmax_of_splus(), tight), OracleError);
    tight.max_schedulers = 4;
    CHECK_NOTHROW(oracle_exact(example_zero(), pmax_of_splus(), tight));

    MdpBuilder b;
    for (StateId s = 0; s < 21; ++s) {
        b.add_state();
        b.add_transition();
        b.add_branch(1.0, 0.0, s);
        b.add_transition();
        b.add_branch(1.0, 0.0, (s + 1) % 21);
    }
    CHECK_THROWS_AS(oracle_exact(std::move(b).build(), Property{PropertyKind::pmax, StateSet(21)}), OracleError);
}

TEST_CASE("probabilities that do not sum to one exactly are refused") {
    MdpBuilder b;
    b.add_state();
    b.add_transition();
    b.add_branch(0.5, 0.0, 1);
    b.add_branch(0.5 - 1e-10, 0.0, 0);
    b.add_state();
    b.add_transition();
    b.add_branch(1.0, 0.0, 1);
    const Mdp model = std::move(b).build();
    REQUIRE(validate(model).empty());
    CHECK_THROWS_AS(oracle_exact(model, Property{PropertyKind::pmax, StateSet::of(2, {1})}), OracleError);
}

TEST_CASE("decimal probabilities are read as the intended fractions") {
    MdpBuilder b;
    b.add_state();
    b.add_transition();
    b.add_branch(0.1, 0.0, 1);
    b.add_branch(0.2, 0.0, 2);
    b.add_branch(0.7, 0.0, 0);
    b.add_state();
    b.add_transition();
    b.add_branch(1.0, 0.0, 1);
    b.add_state();
    b.add_transition();
    b.add_branch(1.0, 0.0, 2);
    const OracleResult r = oracle_exact(std::move(b).build(), Property{PropertyKind::pmax, StateSet::of(3, {1})});
    CHECK(r.at_initial == q("1/3"));
}

TEST_CASE("goal set of the wrong size") {
    CHECK_THROWS_AS(oracle_exact(example_zero(), Property{PropertyKind::pmax, StateSet(4)}), OracleError);
}
