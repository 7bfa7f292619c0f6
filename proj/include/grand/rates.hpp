#ifndef GRAND_RATES_HPP
#define GRAND_RATES_HPP

#include <functional>
#include <span>
#include <vector>

#include "grand/quantizer.hpp"

namespace grand::rates {

/// Decoder input metric M(Y) for mismatched-rate evaluation. Either a
/// continuous odd-symmetric function of the channel output y, or a discrete
/// symmetric metric with atoms given under C=0.
struct LmMetric {
    struct Atom {
        double value;  // metric value (signed)
        double prob;   // P(M(Y)=value | C=0)
    };
    bool discrete = false;
    std::function<double(double)> eval;  // continuous case: M(y)
    std::vector<Atom> atoms;             // discrete case

    /// Matched metric tau(y) = 2y/sigma^2.
    static LmMetric identity_llr(double sigma);
    /// Quantized-LLR metric for given cell boundaries and output values.
    static LmMetric quantized(double sigma, std::span<const double> boundaries,
                              std::span<const double> values);
    /// Quantized metric of a designed quantizer; integer weights if rounded.
    static LmMetric quantized(double sigma, const ReliabilityQuantizer& quant, bool rounded);
    static LmMetric continuous(std::function<double(double)> m);
};

/// Mutual information of BPSK over AWGN, bits per channel use.
double bpsk_capacity(double sigma, std::size_t npts = 4001);

/// Mutual information I(C; quantized output): sign plus cell index, exact
/// Gaussian-CDF transition probabilities.
double quantized_mi(double sigma, std::span<const double> boundaries);
double quantized_mi(double sigma, const ReliabilityQuantizer& quant);

struct LmResult {
    double rate;
    double s;        // optimal metric scaling
    double log_ratio;  // optimal log r(1)/r(0)
};

/// LM-rate: max over s >= 0 and symbol reweighting of the mismatched-decoding
/// rate. Equals capacity for the matched metric.
LmResult lm_rate(double sigma, const LmMetric& metric, std::size_t npts = 4001);

/// Es/N0 in dB at which BPSK capacity equals `rate`; rate must be in (0,1).
double capacity_inverse(double rate);

/// Loss in dB of basic ORBGRAND's rank metric for block length n at noise
/// level sigma: Es/N0 minus the capacity-matching Es/N0 of its LM-rate.
double orbgrand_loss(double sigma, std::size_t n);

}  // namespace grand::rates

#endif
