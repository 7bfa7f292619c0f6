#ifndef GRAND_QUANTIZER_HPP
#define GRAND_QUANTIZER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace grand {

enum class QuantizerFlavor { heuristic, uniform, nonuniform };

QuantizerFlavor quantizer_flavor_from_string(const std::string& s);
std::string to_string(QuantizerFlavor f);

/// q-bit reliability quantizer: Q = 2^q cells [b_{i-1}, b_i) with b_0 = 0 and
/// b_Q = +inf, real output values v and their nearest-integer weights w
/// normalized so w_1 = 1. Immutable once designed.
struct ReliabilityQuantizer {
    int q = 0;
    double sigma_design = 0.0;
    std::vector<double> boundaries;  // Q-1, strictly increasing, positive
    std::vector<double> outputs;     // Q, strictly increasing, positive
    std::vector<uint32_t> weights;   // Q, w[0] == 1, non-decreasing

    std::size_t levels() const { return outputs.size(); }
    /// True if nearest-integer rounding merged adjacent levels.
    bool has_weight_collapse() const;
};

struct QuantizeResult {
    std::size_t level;  // 1-based cell index i with rel in [b_{i-1}, b_i)
    uint32_t weight;
};

QuantizeResult quantize_reliability(const ReliabilityQuantizer& quant, double rel);

/// Uniform step beta = (2/sigma^2)(1 - sigma/2)/Q; invalid for sigma >= 2.
ReliabilityQuantizer heuristic_quantizer(double sigma, int q);

/// v_i = log of the ratio of conditional LLR-density integrals over each cell.
std::vector<double> optimal_outputs(double sigma, std::span<const double> boundaries);

/// w_i = round(v_i / v_1).
std::vector<uint32_t> integer_weights(std::span<const double> outputs);

/// Step size chosen by maximizing the quantized-output mutual information.
ReliabilityQuantizer optimize_uniform(double sigma, int q);

/// Free boundaries, coordinate ascent on mutual information from the uniform
/// optimum.
ReliabilityQuantizer optimize_nonuniform(double sigma, int q);

void save_quantizer(const ReliabilityQuantizer& quant, std::ostream& out);
ReliabilityQuantizer load_quantizer(std::istream& in);

/// Design with a plain-text sidecar cache keyed by (flavor, q, sigma rounded
/// to 1e-6). Empty cache_path disables caching.
ReliabilityQuantizer design_quantizer(QuantizerFlavor flavor, double sigma, int q,
                                      const std::string& cache_path = "");

}  // namespace grand

#endif
