#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soundmdp/mdp.hpp"
#include "soundmdp/model_io.hpp"
#include "soundmdp/solvers.hpp"

namespace soundmdp {

enum class Method { vi, ovi, ii, oracle };
enum class Precomp { required, all, none };
enum class EcElim { automatic, force, off };

std::string to_string(Method method);
std::string to_string(Precomp precomp);
std::string to_string(EcElim ec);

struct OrderSpec {
    enum class Kind { forward, reverse, random } kind = Kind::forward;
    std::uint64_t seed = 0;
};

/// Parses "forward", "reverse" or "random:<seed>".
OrderSpec parse_order(const std::string& text);
std::string to_string(const OrderSpec& order);

struct RunSpec {
    std::string instance;
    std::filesystem::path model_path;
    PropertyKind kind = PropertyKind::pmax;
    /// Labels or ids; empty means the goals declared in the model file.
    std::vector<std::string> goals;
    Method method = Method::ovi;
    double epsilon = 1e-6;
    WidthMode width = WidthMode::relative;
    ErrorMode error_mode = ErrorMode::relative;
    Precomp precomp = Precomp::required;
    EcElim ec = EcElim::automatic;
    OrderSpec order;
    std::uint64_t max_sweeps = 10'000'000;
    std::optional<double> epsilon_vi;
    std::optional<double> reference;
    bool exclude_trivial = false;
    /// Limits the numeric phase only.
    std::optional<std::chrono::duration<double>> timeout;
};

struct BenchRecord {
    std::string instance;
    std::string method;  // e.g. "ovi.std", "ii.pre"
    double result = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    std::uint64_t sweeps = 0;
    std::uint64_t phases = 0;
    double precomp_ms = 0.0;
    double transform_ms = 0.0;
    double solve_ms = 0.0;
    std::optional<bool> correct;
    /// certified, unverified, uncertified, exact, sweep_limit, timeout,
    /// excluded or error.
    std::string status;
    unsigned jobs = 1;
};

/// A run the pipeline refuses, with the rule that forbids it.
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunResult {
    BenchRecord record;
    std::string report;
};

/// Checks the method/precomputation/EC-elimination combination.
void check_pipeline(const RunSpec& spec);

/// Runs the full pipeline on an already parsed model.
RunResult run_pipeline(const ModelDocument& document, const RunSpec& spec);

/// Loads spec.model_path and runs the pipeline.
RunResult solve_command(const RunSpec& spec);

/// Whether `result` meets the width contract around `reference`.
bool within_width(double result, double reference, WidthMode width, double epsilon);

}  // namespace soundmdp
