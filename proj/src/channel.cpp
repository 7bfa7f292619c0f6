#include "grand/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace grand {

namespace {
double rate_factor_db(std::size_t n, std::size_t k) {
    return 10.0 * std::log10(2.0 * static_cast<double>(k) / static_cast<double>(n));
}
}  // namespace

ChannelParams ChannelParams::from_ebn0_db(double ebn0_db, std::size_t n, std::size_t k) {
    if (n < k || k < 1) throw std::invalid_argument("ChannelParams: need n >= k >= 1");
    ChannelParams p;
    p.eb_n0_db = ebn0_db;
    p.es_n0_db = ebn0_db + rate_factor_db(n, k);
    p.sigma = std::pow(10.0, -p.es_n0_db / 20.0);
    p.rate = static_cast<double>(k) / static_cast<double>(n);
    return p;
}

ChannelParams ChannelParams::from_esn0_db(double esn0_db, std::size_t n, std::size_t k) {
    if (n < k || k < 1) throw std::invalid_argument("ChannelParams: need n >= k >= 1");
    ChannelParams p;
    p.es_n0_db = esn0_db;
    p.eb_n0_db = esn0_db - rate_factor_db(n, k);
    p.sigma = std::pow(10.0, -esn0_db / 20.0);
    p.rate = static_cast<double>(k) / static_cast<double>(n);
    return p;
}

ChannelParams ChannelParams::from_sigma(double sigma, std::size_t n, std::size_t k) {
    if (!(sigma > 0.0)) throw std::invalid_argument("ChannelParams: sigma must be > 0");
    if (n < k || k < 1) throw std::invalid_argument("ChannelParams: need n >= k >= 1");
    ChannelParams p;
    p.sigma = sigma;
    p.es_n0_db = -20.0 * std::log10(sigma);
    p.eb_n0_db = p.es_n0_db - rate_factor_db(n, k);
    p.rate = static_cast<double>(k) / static_cast<double>(n);
    return p;
}

std::vector<double> bpsk(const BitVec& bits) {
    std::vector<double> x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) x[i] = bits.get(i) ? -1.0 : 1.0;
    return x;
}

Observation observe(std::vector<double> y, double sigma) {
    Observation obs;
    const std::size_t n = y.size();
    obs.y = std::move(y);
    obs.llr.resize(n);
    obs.rel.resize(n);
    obs.hard = BitVec(n);
    const double scale = 2.0 / (sigma * sigma);
    for (std::size_t i = 0; i < n; ++i) {
        obs.llr[i] = scale * obs.y[i];
        obs.rel[i] = std::fabs(obs.llr[i]);
        if (obs.y[i] < 0.0) obs.hard.set(i);  // sign(0) = +1 -> bit 0
    }
    return obs;
}

Observation transmit(const BitVec& codeword, const ChannelParams& params, rng::Stream& stream) {
    std::vector<double> y(codeword.size());
    for (std::size_t i = 0; i < codeword.size(); ++i) {
        double x = codeword.get(i) ? -1.0 : 1.0;
        y[i] = x + params.sigma * stream.next_gauss();
    }
    return observe(std::move(y), params.sigma);
}

}  // namespace grand
