#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qlab::suites {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "1.0.0";

// One verification record: `ref` is a short stable check identifier, `actual`
// is the measured value (a defect for expected == 0 checks).
struct Record {
    std::string name;
    std::string ref;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;  // echoed key/values
    std::vector<Record> records;                              // sorted by name

    bool pass() const;
    // deterministic serializations: records sorted by name, keys sorted,
    // no timing fields unless wall_seconds >= 0 is passed explicitly
    std::string to_json(double wall_seconds = -1.0) const;
    std::string to_csv() const;
};

std::uint64_t derive_seed(std::uint64_t master, const std::string& label);

Report suite_fock(double q, int dim, int cutoff, std::uint64_t seed);
Report suite_wick(double q, std::uint64_t seed);
Report suite_gqg(const std::string& group, double q, int kdim, int cutoff, std::uint64_t seed);
Report suite_rigidity(int resolution, int trials, std::uint64_t seed);
Report gap_sweep(const std::vector<int>& fsizes, double q, int cutoff);
Report moments_table(double q, int maxlen);

}  // namespace qlab::suites
