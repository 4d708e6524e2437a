#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "soundmdp/pipeline.hpp"

namespace soundmdp {

// Suite format: one run per line, `<id> <model> flags...` with the flags of
// `solve`. '#' starts a comment. Model paths are relative to the suite file.
std::vector<RunSpec> parse_suite(std::string_view text, const std::filesystem::path& base_dir);
std::vector<RunSpec> load_suite(const std::filesystem::path& path);

struct BenchOptions {
    unsigned reps = 3;
    /// Per instance, numeric phase only; a suite line's --timeout wins.
    double timeout_seconds = 120.0;
    unsigned jobs = 1;
    /// Called once per finished instance, possibly from a worker thread.
    std::function<void(const BenchRecord&, const std::string& message)> progress;
};

/// Runs every spec `reps` times and averages the stage times. Failures become
/// rows with status=error or status=timeout. Rows keep suite order.
std::vector<BenchRecord> run_bench(const std::vector<RunSpec>& suite, const BenchOptions& options);

/// True iff no row is incorrect, timed out or failed.
bool bench_passed(const std::vector<BenchRecord>& records);

inline constexpr std::string_view kCsvHeader =
    "instance,method,result,lower,upper,sweeps,phases,precomp_ms,transform_ms,solve_ms,correct,status,jobs";

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
std::vector<BenchRecord> read_csv(std::istream& in);

/// Time a row is compared by: total for "std" runs, solve time otherwise.
double reported_time_ms(const BenchRecord& record);

struct ComparisonRow {
    std::string instance;
    double time_a = 0.0;
    double time_b = 0.0;
    double time_ratio = 1.0;   // a / b
    double sweep_ratio = 1.0;  // a / b
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::size_t at_least_double = 0;  // time ratio >= 2
    std::size_t at_most_half = 0;     // time ratio <= 0.5
    std::size_t skipped = 0;          // excluded or failed in either file
};

class CompareError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Both files must list the same instance ids.
Comparison compare_records(const std::vector<BenchRecord>& a, const std::vector<BenchRecord>& b);
std::string format_comparison(const Comparison& comparison);

}  // namespace soundmdp
