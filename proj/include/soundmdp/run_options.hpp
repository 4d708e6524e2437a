#pragma once

#include <optional>
#include <string>
#include <vector>

#include "soundmdp/pipeline.hpp"

namespace CLI {
class App;
}

namespace soundmdp {

/// Raw flag values shared by `solve` and suite lines.
struct RunOptionText {
    std::string model;
    std::string prop = "pmax";
    std::vector<std::string> goals;
    std::string method = "ovi";
    double epsilon = 1e-6;
    std::string width = "relative";
    std::string error = "relative";
    std::string precomp = "required";
    std::string ec = "auto";
    std::string order = "forward";
    std::uint64_t max_sweeps = 10'000'000;
    std::optional<double> epsilon_vi;
    std::optional<double> reference;
    std::optional<double> timeout;
    bool exclude_trivial = false;
};

/// Registers the model positional and all run flags on `app`.
void add_run_options(CLI::App& app, RunOptionText& text);

/// Throws std::invalid_argument on values the flags cannot carry.
RunSpec to_run_spec(const RunOptionText& text);

/// Parses `<model> flags...`; throws std::invalid_argument with CLI11's message.
RunSpec parse_run_arguments(const std::vector<std::string>& args);

}  // namespace soundmdp
