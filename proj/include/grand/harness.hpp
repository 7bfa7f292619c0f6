#ifndef GRAND_HARNESS_HPP
#define GRAND_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grand/codebook.hpp"
#include "grand/decoder.hpp"
#include "grand/quantizer.hpp"

namespace grand {

/// One Monte Carlo experiment: a code, a decoder, and a sweep of operating
/// points. Trials draw random messages unless all_zero is set.
struct SimConfig {
    explicit SimConfig(LinearCode c) : code(std::move(c)) {}

    LinearCode code;
    DecoderKind decoder = DecoderKind::orbgrand;
    int q = 0;  // quantizer bits for dsgrand
    QuantizerFlavor flavor = QuantizerFlavor::nonuniform;
    std::vector<double> ebn0_db;
    uint64_t seed = 1;
    uint64_t min_errors = 300;
    uint64_t max_trials = 10'000'000;
    std::optional<uint64_t> smax;
    std::optional<double> smax_tail;  // target abandonment tail; default 1e-5
    std::optional<double> srgrand_delta;
    uint64_t budget = 0;  // 0 -> decoder default 2^{n-k+4}
    std::size_t workers = 1;
    bool all_zero = false;
    std::size_t fit_segments = 8;       // dsgrand-fitted lambda segments
    std::string quantizer_cache;        // sidecar path; empty disables
};

struct SimRecord {
    double ebn0_db = 0.0;
    uint64_t trials = 0;
    uint64_t errors = 0;
    uint64_t undetected = 0;
    uint64_t abandoned = 0;
    double bler = 0.0;
    double ubler = 0.0;
    double mean_np = 0.0;
    double mean_score = 0.0;
    uint64_t max_stack = 0;
    double seconds = 0.0;
};

SimRecord run_point(const SimConfig& config, double ebn0_db);
std::vector<SimRecord> run_sweep(const SimConfig& config, std::ostream* csv = nullptr);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SimRecord& rec);

}  // namespace grand

#endif
