#include "soundmdp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "soundmdp/run_options.hpp"

namespace soundmdp {

namespace {

std::vector<std::string> split_whitespace(std::string_view line) {
    std::vector<std::string> tokens;
    std::istringstream in{std::string(line)};
    for (std::string token; in >> token;) tokens.push_back(token);
    return tokens;
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string number(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

std::string millis(double x) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4) << x;
    return out.str();
}

double parse_double(const std::string& field, std::size_t line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (field.empty() || end != begin + field.size())
        throw CsvError("line " + std::to_string(line) + ": bad number '" + field + "'");
    return value;
}

std::uint64_t parse_count(const std::string& field, std::size_t line) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw CsvError("line " + std::to_string(line) + ": bad count '" + field + "'");
    return value;
}

double ratio(double a, double b) {
    if (a == b) return 1.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a / b;
}

BenchRecord failure_row(const RunSpec& spec, std::string status) {
    BenchRecord record;
    record.instance = spec.instance;
    record.method = to_string(spec.method);
    record.result = std::numeric_limits<double>::quiet_NaN();
    record.status = std::move(status);
    return record;
}

}  // namespace

std::vector<RunSpec> parse_suite(std::string_view text, const std::filesystem::path& base_dir) {
    std::vector<RunSpec> suite;
    std::map<std::string, std::size_t> seen;
    std::istringstream in{std::string(text)};
    std::size_t number = 0;
    for (std::string line; std::getline(in, line);) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto tokens = split_whitespace(line);
        if (tokens.empty()) continue;
        const std::string where = "suite line " + std::to_string(number) + ": ";
        if (tokens.size() < 2) throw std::invalid_argument(where + "expected '<id> <model> flags...'");
        const std::string id = tokens.front();
        if (id.find(',') != std::string::npos) throw std::invalid_argument(where + "instance id contains a comma");
        if (auto [it, fresh] = seen.emplace(id, number); !fresh)
            throw std::invalid_argument(where + "duplicate instance id '" + id + "' (first on line " +
                                        std::to_string(it->second) + ")");
        tokens.erase(tokens.begin());
        RunSpec spec;
        try {
            spec = parse_run_arguments(tokens);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(where + e.what());
        }
        spec.instance = id;
        if (spec.model_path.is_relative()) spec.model_path = base_dir / spec.model_path;
        suite.push_back(std::move(spec));
    }
    return suite;
}

std::vector<RunSpec> load_suite(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open suite file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_suite(buffer.str(), path.parent_path());
}

std::vector<BenchRecord> run_bench(const std::vector<RunSpec>& suite, const BenchOptions& options) {
    const unsigned reps = std::max(1u, options.reps);
    const unsigned jobs = std::max(1u, options.jobs);
    std::vector<BenchRecord> records(suite.size());

    auto run_one = [&](std::size_t index) {
        RunSpec spec = suite[index];
        if (!spec.timeout) spec.timeout = std::chrono::duration<double>(options.timeout_seconds);
        BenchRecord record;
        std::string message;
        try {
            const ModelDocument document = load_explicit(spec.model_path);
            double precomp = 0.0;
            double transform = 0.0;
            double solve = 0.0;
            unsigned done = 0;
            for (unsigned rep = 0; rep < reps; ++rep) {
                record = run_pipeline(document, spec).record;
                precomp += record.precomp_ms;
                transform += record.transform_ms;
                solve += record.solve_ms;
                ++done;
                if (record.status == "timeout") break;
            }
            record.precomp_ms = precomp / done;
            record.transform_ms = transform / done;
            record.solve_ms = solve / done;
        } catch (const std::exception& e) {
            record = failure_row(spec, "error");
            message = e.what();
        }
        record.instance = spec.instance;
        record.jobs = jobs;
        if (options.progress) options.progress(record, message);
        records[index] = std::move(record);
    };

    if (jobs == 1) {
        for (std::size_t i = 0; i < suite.size(); ++i) run_one(i);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < suite.size(); i = next++) run_one(i);
        });
    }
    for (auto& worker : workers) worker.join();
    return records;
}

bool bench_passed(const std::vector<BenchRecord>& records) {
    return std::none_of(records.begin(), records.end(), [](const BenchRecord& r) {
        return (r.correct && !*r.correct) || r.status == "timeout" || r.status == "error";
    });
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
    out << kCsvHeader << '\n';
    for (const BenchRecord& r : records) {
        out << r.instance << ',' << r.method << ',' << number(r.result) << ','
            << (r.lower ? number(*r.lower) : "") << ',' << (r.upper ? number(*r.upper) : "") << ',' << r.sweeps
            << ',' << r.phases << ',' << millis(r.precomp_ms) << ',' << millis(r.transform_ms) << ','
            << millis(r.solve_ms) << ',' << (r.correct ? (*r.correct ? "true" : "false") : "") << ',' << r.status
            << ',' << r.jobs << '\n';
    }
}

std::vector<BenchRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw CsvError("missing or unexpected CSV header");
    std::vector<BenchRecord> records;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        const auto f = split_commas(line);
        if (f.size() != 13)
            throw CsvError("line " + std::to_string(number) + ": expected 13 fields, got " +
                           std::to_string(f.size()));
        BenchRecord r;
        r.instance = f[0];
        r.method = f[1];
        r.result = parse_double(f[2], number);
        if (!f[3].empty()) r.lower = parse_double(f[3], number);
        if (!f[4].empty()) r.upper = parse_double(f[4], number);
        r.sweeps = parse_count(f[5], number);
        r.phases = parse_count(f[6], number);
        r.precomp_ms = parse_double(f[7], number);
        r.transform_ms = parse_double(f[8], number);
        r.solve_ms = parse_double(f[9], number);
        if (f[10] == "true")
            r.correct = true;
        else if (f[10] == "false")
            r.correct = false;
        else if (!f[10].empty())
            throw CsvError("line " + std::to_string(number) + ": bad correct flag '" + f[10] + "'");
        r.status = f[11];
        r.jobs = static_cast<unsigned>(parse_count(f[12], number));
        records.push_back(std::move(r));
    }
    return records;
}

double reported_time_ms(const BenchRecord& record) {
    const bool standard = record.method.size() >= 4 && record.method.compare(record.method.size() - 4, 4, ".std") == 0;
    return standard ? record.precomp_ms + record.transform_ms + record.solve_ms : record.solve_ms;
}

Comparison compare_records(const std::vector<BenchRecord>& a, const std::vector<BenchRecord>& b) {
    std::map<std::string, const BenchRecord*> by_id;
    for (const BenchRecord& r : b)
        if (!by_id.emplace(r.instance, &r).second) throw CompareError("duplicate instance id '" + r.instance + "'");
    if (a.size() != b.size())
        throw CompareError("instance counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));

    Comparison comparison;
    std::map<std::string, bool> seen;
    for (const BenchRecord& ra : a) {
        if (!seen.emplace(ra.instance, true).second) throw CompareError("duplicate instance id '" + ra.instance + "'");
        const auto it = by_id.find(ra.instance);
        if (it == by_id.end()) throw CompareError("instance '" + ra.instance + "' missing from the second file");
        const BenchRecord& rb = *it->second;
        auto unusable = [](const BenchRecord& r) { return r.status == "excluded" || r.status == "error"; };
        if (unusable(ra) || unusable(rb)) {
            ++comparison.skipped;
            continue;
        }
        ComparisonRow row;
        row.instance = ra.instance;
        row.time_a = reported_time_ms(ra);
        row.time_b = reported_time_ms(rb);
        row.time_ratio = ratio(row.time_a, row.time_b);
        row.sweep_ratio = ratio(static_cast<double>(ra.sweeps), static_cast<double>(rb.sweeps));
        if (row.time_ratio >= 2.0) ++comparison.at_least_double;
        if (row.time_ratio <= 0.5) ++comparison.at_most_half;
        comparison.rows.push_back(std::move(row));
    }
    return comparison;
}

std::string format_comparison(const Comparison& comparison) {
    std::ostringstream out;
    out << std::left << std::setw(24) << "instance" << std::right << std::setw(14) << "time_a_ms" << std::setw(14)
        << "time_b_ms" << std::setw(12) << "time a/b" << std::setw(12) << "sweeps a/b" << '\n';
    for (const ComparisonRow& row : comparison.rows) {
        out << std::left << std::setw(24) << row.instance << std::right << std::fixed << std::setprecision(4)
            << std::setw(14) << row.time_a << std::setw(14) << row.time_b << std::setprecision(3) << std::setw(12)
            << row.time_ratio << std::setw(12) << row.sweep_ratio << '\n';
    }
    out << comparison.rows.size() << " compared, " << comparison.skipped << " skipped; a/b >= 2: "
        << comparison.at_least_double << ", a/b <= 0.5: " << comparison.at_most_half << '\n';
    return out.str();
}

}  // namespace soundmdp
