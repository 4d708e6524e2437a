#include "soundmdp/pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <sstream>

#include "soundmdp/graph.hpp"
#include "soundmdp/oracle.hpp"

namespace soundmdp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string format_value(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

StateSet resolve_goals(const ModelDocument& document, const RunSpec& spec) {
    const std::size_t n = document.model.num_states();
    if (spec.goals.empty()) {
        if (!document.declared_goals) throw PipelineError("no goal states given and the model declares none");
        return *document.declared_goals;
    }
    StateSet goals(n);
    for (const std::string& token : spec.goals) {
        const auto s = document.resolve(token);
        if (!s) throw PipelineError("unknown goal state '" + token + "'");
        goals.insert(*s);
    }
    return goals;
}

bool eliminates_end_components(const RunSpec& spec) {
    if (spec.method == Method::oracle || spec.ec == EcElim::off) return false;
    if (spec.ec == EcElim::force) return true;
    switch (spec.kind) {
        case PropertyKind::emin: return true;
        case PropertyKind::pmax: return spec.method == Method::ii || spec.precomp == Precomp::all;
        default: return false;
    }
}

std::uint64_t order_seed(const OrderSpec& order) {
    if (const char* env = std::getenv("SOUNDMDP_SEED")) {
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return seed;
    }
    return order.seed;
}

SweepOrder make_order(const OrderSpec& order, const BellmanProblem& problem) {
    switch (order.kind) {
        case OrderSpec::Kind::reverse: return reverse_order(problem);
        case OrderSpec::Kind::random: return random_order(problem, order_seed(order));
        default: return forward_order(problem);
    }
}

std::string mode_suffix(Precomp precomp) {
    switch (precomp) {
        case Precomp::required: return "std";
        case Precomp::all: return "pre";
        case Precomp::none: return "none";
    }
    return "?";
}

}  // namespace

std::string to_string(Method method) {
    switch (method) {
        case Method::vi: return "vi";
        case Method::ovi: return "ovi";
        case Method::ii: return "ii";
        case Method::oracle: return "oracle";
    }
    return "?";
}

std::string to_string(Precomp precomp) {
    switch (precomp) {
        case Precomp::required: return "required";
        case Precomp::all: return "all";
        case Precomp::none: return "none";
    }
    return "?";
}

std::string to_string(EcElim ec) {
    switch (ec) {
        case EcElim::automatic: return "auto";
        case EcElim::force: return "force";
        case EcElim::off: return "off";
    }
    return "?";
}

OrderSpec parse_order(const std::string& text) {
    if (text == "forward") return {};
    if (text == "reverse") return {OrderSpec::Kind::reverse, 0};
    const std::string prefix = "random:";
    if (text.rfind(prefix, 0) == 0) {
        const std::string digits = text.substr(prefix.size());
        if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos)
            return {OrderSpec::Kind::random, std::stoull(digits)};
    }
    throw std::invalid_argument("order must be forward, reverse or random:<seed>, got '" + text + "'");
}

std::string to_string(const OrderSpec& order) {
    switch (order.kind) {
        case OrderSpec::Kind::forward: return "forward";
        case OrderSpec::Kind::reverse: return "reverse";
        case OrderSpec::Kind::random: return "random:" + std::to_string(order.seed);
    }
    return "?";
}

bool within_width(double result, double reference, WidthMode width, double epsilon) {
    if (std::isinf(reference) || std::isinf(result)) return result == reference;
    const double slack = 1e-12 * std::abs(reference);
    const double allowed = width == WidthMode::relative ? epsilon * std::abs(reference) : epsilon;
    return std::abs(result - reference) <= allowed + slack;
}

void check_pipeline(const RunSpec& spec) {
    const bool reward = !is_probability(spec.kind);
    if (spec.method != Method::oracle) {
        if (!(spec.epsilon > 0.0)) throw PipelineError("epsilon must be positive");
        if (spec.epsilon_vi && !(*spec.epsilon_vi > 0.0)) throw PipelineError("epsilon-vi must be positive");
        if (spec.max_sweeps == 0) throw PipelineError("max-sweeps must be positive");
    }
    if (spec.method == Method::ii && spec.precomp == Precomp::none)
        throw PipelineError("ii requires a unique fixed point, so precomp=none is not allowed");
    if (reward && spec.precomp == Precomp::none && spec.method != Method::oracle)
        throw PipelineError("expected rewards require the S-infinity precomputation, so precomp=none is not allowed");
    if (spec.method == Method::ii && spec.ec == EcElim::off &&
        (spec.kind == PropertyKind::pmax || spec.kind == PropertyKind::emin))
        throw PipelineError("ii requires EC elimination for " + to_string(spec.kind));
    if (spec.ec == EcElim::force && (spec.kind == PropertyKind::pmin || spec.kind == PropertyKind::emax))
        throw PipelineError("EC elimination does not preserve " + to_string(spec.kind) + " values");
}

RunResult run_pipeline(const ModelDocument& document, const RunSpec& spec) {
    check_pipeline(spec);
    const bool probability = is_probability(spec.kind);
    const Optimization opt = optimization_of(spec.kind);
    StateSet goals = resolve_goals(document, spec);

    BenchRecord record;
    record.instance = spec.instance.empty() ? spec.model_path.stem().string() : spec.instance;
    record.method = spec.method == Method::oracle ? "oracle" : to_string(spec.method) + "." + mode_suffix(spec.precomp);
    std::ostringstream report;
    report << "model      " << (spec.model_path.empty() ? "<memory>" : spec.model_path.string()) << " ("
           << document.model.num_states() << " states, " << document.model.num_transitions() << " transitions, "
           << document.model.num_branches() << " branches)\n";
    report << "property   " << to_string(spec.kind) << " of " << goals.count() << " goal state(s)";
    if (spec.method != Method::oracle) report << ", epsilon " << spec.epsilon << " " << to_string(spec.width);
    report << "\n";
    report << "method     " << to_string(spec.method) << " (precomp=" << to_string(spec.precomp)
           << ", ec-elim=" << to_string(spec.ec) << ", order=" << to_string(spec.order) << ")\n";

    // Transformations.
    auto stage = Clock::now();
    auto model = std::make_shared<Mdp>(make_goals_absorbing(document.model, goals));
    if (probability) *model = strip_rewards(*model);

    if (spec.method == Method::oracle) {
        record.transform_ms = elapsed_ms(stage);
        stage = Clock::now();
        const OracleResult exact = oracle_exact(*model, Property{spec.kind, goals, spec.epsilon, spec.width});
        record.solve_ms = elapsed_ms(stage);
        record.result = exact.at_initial.to_double();
        record.lower = record.result;
        record.upper = record.result;
        record.status = "exact";
        report << "solve      " << exact.schedulers << " scheduler(s) enumerated, " << record.solve_ms << " ms\n";
        report << "result     " << exact.at_initial.str() << " (" << format_value(record.result) << ")\n";
    } else {
        std::size_t components = 0;
        if (eliminates_end_components(spec)) {
            const auto mecs = mec_decomposition(*model);
            QuotientMap map = eliminate_end_components(*model, mecs, goals);
            for (const EndComponent& ec : mecs)
                if (ec.states.count() > 1) ++components;
            goals = map.map_set(goals);
            model = std::make_shared<Mdp>(std::move(map.quotient));
        }
        record.transform_ms = elapsed_ms(stage);
        report << "transform  " << model->num_states() << " states after goal absorption";
        if (eliminates_end_components(spec)) report << " and elimination of " << components << " end component(s)";
        report << ", " << record.transform_ms << " ms\n";

        // Precomputations.
        stage = Clock::now();
        const std::size_t n = model->num_states();
        StateSet zero(n);
        StateSet one(n);
        StateSet s_inf(n);
        if (probability) {
            if (spec.precomp != Precomp::none) zero = prob0_set(*model, goals, opt);
            if (spec.precomp == Precomp::all) one = prob1_set(*model, goals, opt);
        } else {
            s_inf = s_infinity(*model, goals, opt);
            // ii cannot meet a relative width around a true value of 0
            if (spec.precomp == Precomp::all || spec.method == Method::ii)
                zero = reward_zero_set(*model, goals, opt) & goals.complement();
        }
        record.precomp_ms = elapsed_ms(stage);
        report << "precomp    ";
        if (probability)
            report << zero.count() << " state(s) with probability 0, " << one.count() << " with probability 1";
        else
            report << s_inf.count() << " state(s) with infinite reward, " << zero.count() << " with reward 0";
        report << ", " << record.precomp_ms << " ms\n";

        const StateId initial = model->initial();
        if (!probability && s_inf.contains(initial) && !goals.contains(initial)) {
            record.result = std::numeric_limits<double>::infinity();
            record.lower = record.result;
            record.upper = record.result;
            record.status = "certified";
            report << "solve      initial state has infinite expected reward\n";
        } else {
            const BellmanProblem problem = probability ? make_probability_problem(model, goals, opt, zero, one)
                                                       : make_reward_problem(model, goals, opt, s_inf, zero);
            IterationOptions iteration;
            iteration.order = make_order(spec.order, problem);
            iteration.max_sweeps = spec.max_sweeps;
            stage = Clock::now();
            if (spec.timeout)
                iteration.deadline = stage + std::chrono::duration_cast<Clock::duration>(*spec.timeout);

            SolveOutcome outcome;
            switch (spec.method) {
                case Method::vi:
                    outcome = plain_vi(problem, {spec.error_mode, spec.epsilon_vi.value_or(spec.epsilon)}, iteration);
                    break;
                case Method::ovi: {
                    OviOptions options;
                    options.iteration = iteration;
                    options.error_mode = spec.error_mode;
                    options.initial_epsilon_vi = spec.epsilon_vi;
                    const bool ec_done = eliminates_end_components(spec);
                    options.unique_fixed_point =
                        spec.precomp != Precomp::none &&
                        (spec.kind == PropertyKind::pmin || spec.kind == PropertyKind::emax || ec_done);
                    outcome = ovi(problem, Property{spec.kind, goals, spec.epsilon, spec.width}, options);
                    break;
                }
                case Method::ii: {
                    const ValueVector upper = probability ? ValueVector(n, 1.0)
                                                          : reward_upper_init(*model, goals, opt, s_inf);
                    outcome = interval_iteration(problem, Property{spec.kind, goals, spec.epsilon, spec.width}, upper,
                                                 iteration);
                    break;
                }
                case Method::oracle: break;
            }
            record.solve_ms = elapsed_ms(stage);
            record.result = outcome.value;
            record.lower = outcome.lower;
            record.upper = outcome.upper;
            record.sweeps = outcome.iterations;
            record.phases = outcome.verification_phases;
            record.status = to_string(outcome.status);
            if (spec.kind == PropertyKind::emin && spec.ec == EcElim::off && outcome.status != SolveStatus::timeout)
                record.status = "uncertified";
            report << "solve      " << outcome.iterations << " sweep(s)";
            if (spec.method == Method::ovi)
                report << ", " << outcome.verification_phases << " verification phase(s), "
                       << outcome.cancelled_verifications << " cancelled";
            report << ", " << record.solve_ms << " ms\n";
        }
        report << "result     " << format_value(record.result) << "\n";
        if (record.lower && record.upper && record.status == "certified")
            report << "bounds     [" << format_value(*record.lower) << ", " << format_value(*record.upper) << "]\n";
    }

    if (spec.exclude_trivial && probability && (record.result == 0.0 || record.result == 1.0))
        record.status = "excluded";
    if (spec.reference && record.status != "timeout" && record.status != "excluded")
        record.correct = within_width(record.result, *spec.reference, spec.width, spec.epsilon);
    report << "status     " << record.status << "\n";
    if (record.correct)
        report << "reference  " << format_value(*spec.reference) << " (" << (*record.correct ? "correct" : "incorrect")
               << ")\n";
    return {record, report.str()};
}

RunResult solve_command(const RunSpec& spec) {
    const ModelDocument document = load_explicit(spec.model_path);
    return run_pipeline(document, spec);
}

}  // namespace soundmdp
