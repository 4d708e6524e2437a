#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <mutex>

#include "soundmdp/bench.hpp"
#include "soundmdp/model_io.hpp"
#include "soundmdp/run_options.hpp"

using namespace soundmdp;

namespace {

int run_solve(const RunOptionText& text, bool csv) {
    const RunSpec spec = to_run_spec(text);
    const RunResult result = solve_command(spec);
    if (csv)
        write_csv(std::cout, {result.record});
    else
        std::cout << result.report;
    if (result.record.correct && !*result.record.correct) return 1;
    return result.record.status == "timeout" ? 1 : 0;
}

int run_bench_command(const std::string& suite_path, const std::string& output, const BenchOptions& base) {
    BenchOptions options = base;
    options.progress = [](const BenchRecord& record, const std::string& message) {
        static std::mutex mutex;
        std::lock_guard lock(mutex);
        std::cerr << record.instance << ": " << record.status;
        if (record.correct) std::cerr << (*record.correct ? " (correct)" : " (INCORRECT)");
        if (!message.empty()) std::cerr << ": " << message;
        std::cerr << '\n';
    };
    const auto records = run_bench(load_suite(suite_path), options);
    if (output.empty() || output == "-") {
        write_csv(std::cout, records);
    } else {
        std::ofstream out(output);
        if (!out) throw std::runtime_error("cannot write " + output);
        write_csv(out, records);
    }
    return bench_passed(records) ? 0 : 1;
}

std::vector<BenchRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_csv(in);
    } catch (const CsvError& e) {
        throw CsvError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app("Sound value iteration for explicit MDPs");
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Solve one instance");
    RunOptionText run_text;
    bool csv = false;
    add_run_options(*solve, run_text);
    solve->add_flag("--csv", csv, "Print a CSV row instead of the report");

    auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
    std::string suite_path;
    std::string output;
    BenchOptions bench_options;
    bench->add_option("suite", suite_path, "Suite file")->required()->check(CLI::ExistingFile);
    bench->add_option("-o,--output", output, "CSV output file (default: stdout)");
    bench->add_option("--reps", bench_options.reps, "Repetitions per instance")->check(CLI::PositiveNumber);
    bench->add_option("--timeout", bench_options.timeout_seconds, "Per-instance timeout in seconds")
        ->check(CLI::PositiveNumber);
    bench->add_option("--jobs", bench_options.jobs, "Parallel worker slots")->check(CLI::PositiveNumber);

    auto* compare = app.add_subcommand("compare", "Compare two bench CSV files");
    std::string csv_a;
    std::string csv_b;
    compare->add_option("a", csv_a, "First CSV")->required();
    compare->add_option("b", csv_b, "Second CSV")->required();

    auto* generate = app.add_subcommand("generate", "Write a generated model in MDPX format");
    std::string family;
    std::string model_out;
    RandomModelParams params;
    std::size_t chain_length = 20;
    double chain_p = 0.5;
    generate->add_option("family", family, "example, random or slow-chain")
        ->required()
        ->check(CLI::IsMember({"example", "random", "slow-chain"}));
    generate->add_option("-o,--output", model_out, "Output file (default: stdout)");
    generate->add_option("--seed", params.seed, "Random seed");
    generate->add_option("--states", params.states, "Number of states");
    generate->add_option("--transitions", params.max_transitions, "Maximum transitions per state");
    generate->add_option("--branches", params.max_branches, "Maximum branches per transition");
    generate->add_option("--reward-max", params.reward_max, "Maximum branch reward");
    generate->add_option("--goals", params.goal_count, "Number of absorbing goal states");
    generate->add_option("--sinks", params.sink_count, "Number of absorbing non-goal states");
    generate->add_flag("--end-components", params.end_components, "Allow end components");
    generate->add_option("--n", chain_length, "Slow chain length");
    generate->add_option("--p", chain_p, "Slow chain forward probability");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(run_text, csv);
        if (bench->parsed()) return run_bench_command(suite_path, output, bench_options);
        if (compare->parsed()) {
            const Comparison comparison = compare_records(read_csv_file(csv_a), read_csv_file(csv_b));
            std::cout << format_comparison(comparison);
            return 0;
        }
        if (generate->parsed()) {
            ModelDocument document;
            if (family == "example")
                document = generate_example_me();
            else if (family == "random")
                document = generate_random(params);
            else
                document = generate_slow_chain(chain_length, chain_p);
            const std::string text = write_explicit(document);
            if (model_out.empty() || model_out == "-") {
                std::cout << text;
            } else {
                std::ofstream out(model_out);
                if (!out) throw std::runtime_error("cannot write " + model_out);
                out << text;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
