#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tergm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// String / number plumbing shared by the CSV readers and report writers.
std::vector<std::string> split(const std::string& line, char delim);
std::string trim(const std::string& s);

// Shortest round-trip representation (std::to_chars). All file output goes
// through this so identical doubles always serialize to identical bytes.
std::string format_double(double x);
double parse_double(const std::string& s);
long long parse_int(const std::string& s);

// Compensated summation; keeps global statistics accurate enough that the
// two-evaluation change-statistic path agrees with local updates at 1e-12.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Type-7 (linear interpolation) empirical quantile on a pre-sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p);

// FNV-1a 64-bit digests for the run manifest.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(const std::string& s);
std::uint64_t fnv1a64_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Runs fn(block) for block = 0..n_blocks-1 on up to `workers` threads.
// Blocks are claimed from an atomic counter; callers that need determinism
// combine per-block results in block order afterwards.
void parallel_for(std::int64_t n_blocks, int workers,
                  const std::function<void(std::int64_t)>& fn);

}  // namespace tergm
