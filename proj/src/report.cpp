#include "qbnb/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace qbnb {
namespace {

const char* kGenerationSchema = "# qbnb-gen-stats-v1";
const char* kCompareSchema = "# qbnb-compare-v1";

// JSON has no representation for non-finite numbers; encode them as strings
// rather than letting the serializer silently emit null.
nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;  // 64 bytes always suffice for a double
    return std::string(buf, end);
}

nlohmann::ordered_json result_record(const Problem& p, Algorithm algo, double eps,
                                     const SolveResult& res, const ResultRecordOptions& opt) {
    nlohmann::ordered_json j;
    j["schema"] = "qbnb-result-v1";
    j["algorithm"] = algorithm_name(algo);
    j["function"] = p.name;
    j["dim"] = p.dim;
    j["eps"] = json_number(eps);
    j["status"] = status_name(res.status);
    j["f_best"] = json_number(res.f_best);
    j["x_best"] = res.best_point;
    j["lb"] = json_number(res.lb);
    j["ub"] = json_number(res.ub);
    j["generations"] = res.generations;
    j["total_cubes"] = res.cubes_processed;
    j["wall_time_ms"] = opt.include_timings ? json_number(res.wall_time_ms)
                                            : nlohmann::ordered_json(0.0);
    return j;
}

void write_generation_csv(std::ostream& os, const std::vector<GenerationRecord>& records,
                          bool include_timings) {
    os << kGenerationSchema << '\n';
    os << "depth,cubes_processed,cumulative_cubes,cumulative_time_ms,lb,ub\n";
    for (const GenerationRecord& r : records) {
        os << r.depth << ',' << r.cubes_processed << ',' << r.cumulative_cubes << ','
           << (include_timings ? format_double(r.cumulative_time_ms) : "0") << ','
           << format_double(r.lb) << ',' << format_double(r.ub) << '\n';
    }
}

std::string generation_csv(const std::vector<GenerationRecord>& records, bool include_timings) {
    std::ostringstream os;
    write_generation_csv(os, records, include_timings);
    return os.str();
}

void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
    os << kCompareSchema << '\n';
    os << "function,algorithm,d,status,seconds_or_accuracy,iterations,error_vs_best\n";
    for (const CompareRow& r : rows) {
        os << r.function << ',' << r.algorithm << ',' << r.dim << ',' << r.status << ','
           << format_double(r.seconds_or_accuracy) << ',' << r.iterations << ','
           << format_double(r.error_vs_best) << '\n';
    }
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    write_compare_csv(os, rows);
    return os.str();
}

}  // namespace qbnb
