#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <future>
#include <string>
#include <utility>
#include <vector>

#include "blowup/config.hpp"
#include "blowup/evolution.hpp"

namespace blowup {

struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 20240917;
    int jobs = 1;
    std::string config_path;  // empty when only defaults are used
};

// One checked inequality. relation is "<=", "<", ">=", ">" or "==".
struct Assertion {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation = "<=";
};

Assertion check_at_most(const std::string& name, double measured, double threshold);
Assertion check_below(const std::string& name, double measured, double threshold);
Assertion check_above(const std::string& name, double measured, double threshold);
Assertion check_true(const std::string& name, bool ok);

struct RunManifest {
    std::string subcommand;
    std::string version;
    std::vector<std::pair<std::string, std::string>> config;
    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    double wall_time = 0.0;
    std::vector<Assertion> assertions;
    std::vector<std::string> artifacts;                   // file names relative to out_dir
    std::vector<std::pair<std::string, double>> summary;  // headline numbers
    std::vector<std::pair<std::string, std::string>> notes;
    bool passed() const;
};

// Executes one subcommand, writes its CSV artifacts and manifest.json into ctx.out_dir.
// ConfigError for invalid values, IOError when the output cannot be written.
RunManifest run(const std::string& subcommand, const Config& cfg, const RunContext& ctx);

// 0 all assertions pass, 1 some assertion fails
int exit_code(const RunManifest& m);

// Full command line: subcommand plus --config, --seed, --out, --jobs. Returns the exit status
// (2 configuration error, 3 any other error).
int cli_main(int argc, char** argv);

// Versioned CSV: first line "# blowup-lab <kind> v1", then the column header.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& kind, const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);

private:
    std::string path_;
    std::size_t width_;
    std::ofstream out_;
};
std::string format_number(double x);  // %.17g

struct CsvTable {
    std::string kind;
    int version = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::string& path);

EvolutionConfig evolution_config(const Config& cfg, int jobs);

// Runs f(0), ..., f(n - 1) on up to `jobs` threads; results come back in index order, so the
// outcome does not depend on scheduling.
template <class F>
auto parallel_map(int n, int jobs, F f) -> std::vector<decltype(f(0))> {
    using R = decltype(f(0));
    std::vector<R> out(n);
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    const int workers = std::min(jobs, n);
    std::vector<std::future<void>> pool;
    for (int w = 0; w < workers; ++w)
        pool.push_back(std::async(std::launch::async, [&, w] {
            for (int i = w; i < n; i += workers) out[i] = f(i);
        }));
    for (auto& p : pool) p.get();
    return out;
}

}  // namespace blowup
