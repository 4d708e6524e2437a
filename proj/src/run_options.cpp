#include "soundmdp/run_options.hpp"

#include <CLI11.hpp>

namespace soundmdp {

void add_run_options(CLI::App& app, RunOptionText& text) {
    app.add_option("model", text.model, "MDPX model file")->required();
    app.add_option("--prop", text.prop, "Property kind")
        ->check(CLI::IsMember({"pmax", "pmin", "emax", "emin"}));
    app.add_option("--goal", text.goals, "Goal state label or id (default: goals declared in the model)");
    app.add_option("--method", text.method, "Solution method")->check(CLI::IsMember({"vi", "ovi", "ii", "oracle"}));
    app.add_option("--epsilon", text.epsilon, "Result precision");
    app.add_option("--width", text.width, "Width requirement")->check(CLI::IsMember({"relative", "absolute"}));
    app.add_option("--error", text.error, "Iteration error mode")->check(CLI::IsMember({"relative", "absolute"}));
    app.add_option("--precomp", text.precomp, "Precomputations")->check(CLI::IsMember({"required", "all", "none"}));
    app.add_option("--ec-elim", text.ec, "End component elimination")
        ->check(CLI::IsMember({"auto", "force", "off"}));
    app.add_option("--order", text.order, "Update order: forward, reverse or random:<seed>");
    app.add_option("--max-sweeps", text.max_sweeps, "Sweep cap");
    app.add_option("--epsilon-vi", text.epsilon_vi, "Initial VI stopping threshold (default: epsilon)");
    app.add_option("--reference", text.reference, "Reference value for the correctness check");
    app.add_option("--timeout", text.timeout, "Numeric phase time limit in seconds");
    app.add_flag("--exclude-trivial", text.exclude_trivial, "Mark probability results of 0 or 1 as excluded");
}

RunSpec to_run_spec(const RunOptionText& text) {
    RunSpec spec;
    spec.model_path = text.model;
    spec.kind = *parse_property_kind(text.prop);
    spec.goals = text.goals;
    if (text.method == "vi")
        spec.method = Method::vi;
    else if (text.method == "ii")
        spec.method = Method::ii;
    else if (text.method == "oracle")
        spec.method = Method::oracle;
    else
        spec.method = Method::ovi;
    spec.epsilon = text.epsilon;
    spec.width = text.width == "absolute" ? WidthMode::absolute : WidthMode::relative;
    spec.error_mode = text.error == "absolute" ? ErrorMode::absolute : ErrorMode::relative;
    spec.precomp = text.precomp == "all" ? Precomp::all : text.precomp == "none" ? Precomp::none : Precomp::required;
    spec.ec = text.ec == "force" ? EcElim::force : text.ec == "off" ? EcElim::off : EcElim::automatic;
    spec.order = parse_order(text.order);
    spec.max_sweeps = text.max_sweeps;
    spec.epsilon_vi = text.epsilon_vi;
    spec.reference = text.reference;
    spec.exclude_trivial = text.exclude_trivial;
    if (text.timeout) {
        if (!(*text.timeout > 0.0)) throw std::invalid_argument("timeout must be positive");
        spec.timeout = std::chrono::duration<double>(*text.timeout);
    }
    return spec;
}

RunSpec parse_run_arguments(const std::vector<std::string>& args) {
    CLI::App app("run");
    RunOptionText text;
    add_run_options(app, text);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }
    return to_run_spec(text);
}

}  // namespace soundmdp
