#ifndef GRAND_CHANNEL_HPP
#define GRAND_CHANNEL_HPP

#include <span>
#include <vector>

#include "grand/bits.hpp"
#include "grand/rng.hpp"

namespace grand {

/// Mutually consistent SNR descriptions of a BPSK/AWGN operating point:
/// Es/N0 = 1/sigma^2 and Es/N0 = (Eb/N0) * 2k/n.
struct ChannelParams {
    double sigma;
    double es_n0_db;
    double eb_n0_db;
    double rate;  // k/n

    static ChannelParams from_ebn0_db(double ebn0_db, std::size_t n, std::size_t k);
    static ChannelParams from_esn0_db(double esn0_db, std::size_t n, std::size_t k);
    static ChannelParams from_sigma(double sigma, std::size_t n, std::size_t k);
};

/// Per-bit channel outputs for one received block.
struct Observation {
    std::vector<double> y;
    std::vector<double> llr;  // 2 y / sigma^2
    std::vector<double> rel;  // |llr|
    BitVec hard;              // (1 - sign(y))/2, sign(0) = +1
};

std::vector<double> bpsk(const BitVec& bits);

Observation transmit(const BitVec& codeword, const ChannelParams& params, rng::Stream& stream);

/// Derived fields from raw channel outputs (used by transmit and by tests).
Observation observe(std::vector<double> y, double sigma);

}  // namespace grand

#endif
