#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbnb/problem.hpp"
#include "qbnb/search.hpp"

namespace qbnb {

// Shortest decimal form that parses back to the same double ("0.1", "1e30");
// non-finite values become "inf"/"-inf"/"nan". Used by every artifact writer
// so records are byte-stable across runs.
std::string format_double(double v);

struct ResultRecordOptions {
    // When false, wall-clock fields are written as 0 so two runs of the same
    // spec produce identical bytes (golden files, determinism checks).
    bool include_timings = true;
};

// One solve as a JSON object with stable key order. Callers may add fields
// (seed, annotations) before dumping.
nlohmann::ordered_json result_record(const Problem& p, Algorithm algo, double eps,
                                     const SolveResult& res, const ResultRecordOptions& opt = {});

// Per-generation statistics. The first line names the schema version; columns
// are depth,cubes_processed,cumulative_cubes,cumulative_time_ms,lb,ub.
void write_generation_csv(std::ostream& os, const std::vector<GenerationRecord>& records,
                          bool include_timings = true);
std::string generation_csv(const std::vector<GenerationRecord>& records,
                           bool include_timings = true);

// One row of an algorithm-comparison table.
struct CompareRow {
    std::string function;
    std::string algorithm;
    int dim = 0;
    std::string status;
    // Seconds when the run converged; achieved ub-lb when a limit was hit.
    double seconds_or_accuracy = 0.0;
    long long iterations = 0;
    double error_vs_best = 0.0;
};

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows);
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace qbnb
