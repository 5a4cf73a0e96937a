#pragma once

#include "rplm/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rplm::cli {

enum class Command { Fit, Select, Simulate, Predict, Compare };

/// `lo:hi:count`, expanded to `count` equispaced bandwidths.
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

GridSpec parse_grid(const std::string& text);
std::vector<double> parse_vector(const std::string& text);

struct RunConfig {
    Command command = Command::Fit;
    std::optional<ManifoldSpec> manifold;
    std::filesystem::path input;
    std::filesystem::path output;        // JSON report (CSV for predict/compare); stdout when empty
    std::filesystem::path table_output;  // simulate: Table-shaped CSV row
    std::filesystem::path query;         // fit/predict: points to evaluate
    std::filesystem::path g_output;      // fit: CSV of (query point, g-hat)
    std::size_t p = 0;                   // 0 = infer from the CSV header
    std::optional<double> bandwidth;
    std::optional<GridSpec> grid;
    std::string method = "cv";           // select: cv or sv
    std::string design;
    std::size_t n = 200;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    double beta_true = 5.0;
    double noise_sd = 1.0;
    std::vector<double> beta0;
    unsigned threads = 0;                // 0 = all cores

    /// Throws ContractViolation when flags do not fit the command.
    void validate() const;
};

/// Each returns the process exit status. Failures are reported on `err` as a
/// one-line JSON object {"schema":1,"error":{"type":...,"message":...}}.
int run_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_select(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace rplm::cli
