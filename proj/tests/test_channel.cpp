#include <cmath>

#include "doctest.h"
#include "grand/channel.hpp"
#include "grand/gauss.hpp"

using namespace grand;

TEST_CASE("bpsk mapping") {
    BitVec b(3);
    b.set(1);
    auto x = bpsk(b);
    CHECK(x[0] == 1.0);
    CHECK(x[1] == -1.0);
    CHECK(x[2] == 1.0);

    BitVec zeros(5), ones(5);
    for (std::size_t i = 0; i < 5; ++i) ones.set(i);
    for (double v : bpsk(zeros)) CHECK(v == 1.0);
    for (double v : bpsk(ones)) CHECK(v == -1.0);
}

TEST_CASE("snr conversions are mutually consistent") {
    auto p = ChannelParams::from_esn0_db(4.0, 31, 16);
    CHECK(p.sigma * p.sigma == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-12));

    auto q = ChannelParams::from_ebn0_db(4.0, 31, 16);
    CHECK(q.es_n0_db == doctest::Approx(4.0 + 10.0 * std::log10(32.0 / 31.0)).epsilon(1e-12));
    CHECK(1.0 / (q.sigma * q.sigma) ==
          doctest::Approx(std::pow(10.0, q.es_n0_db / 10.0)).epsilon(1e-12));

    auto r = ChannelParams::from_esn0_db(7.0, 128, 117);
    CHECK(r.sigma == doctest::Approx(0.446684).epsilon(1e-5));
    auto back = ChannelParams::from_sigma(r.sigma, 128, 117);
    CHECK(back.eb_n0_db == doctest::Approx(r.eb_n0_db).epsilon(1e-12));
}

TEST_CASE("noiseless transmit reproduces the codeword") {
    BitVec cw(16);
    cw.set(3);
    cw.set(9);
    auto params = ChannelParams::from_sigma(1e-9, 16, 8);
    rng::Stream st(42);
    auto obs = transmit(cw, params, st);
    CHECK(obs.hard == cw);
}

TEST_CASE("fixed seed gives a bit-identical observation") {
    BitVec cw(8);
    cw.set(2);
    auto params = ChannelParams::from_ebn0_db(3.0, 8, 4);
    rng::Stream a(7), b(7);
    auto o1 = transmit(cw, params, a);
    auto o2 = transmit(cw, params, b);
    CHECK(o1.y == o2.y);
    CHECK(o1.llr == o2.llr);
    CHECK(o1.hard == o2.hard);
}

TEST_CASE("observation invariants: hard vs llr sign, rel magnitude") {
    auto params = ChannelParams::from_ebn0_db(1.0, 64, 32);
    rng::Stream st(3);
    BitVec cw(64);
    auto obs = transmit(cw, params, st);
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(obs.hard.get(i) == (obs.llr[i] < 0.0));
        CHECK(obs.rel[i] == doctest::Approx(std::fabs(obs.llr[i])));
        CHECK(obs.llr[i] == doctest::Approx(2.0 * obs.y[i] / (params.sigma * params.sigma)));
    }
    // sign(0) = +1 convention
    auto z = observe({0.0, -0.25}, 1.0);
    CHECK(z.hard.get(0) == false);
    CHECK(z.hard.get(1) == true);
}

TEST_CASE("empirical mean of y approximates the BPSK level") {
    auto params = ChannelParams::from_sigma(0.7, 32, 16);
    rng::Stream st(123);
    const std::size_t draws = 1'000'000;
    BitVec zeros(1);
    double sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        auto obs = transmit(zeros, params, st);
        sum += obs.y[0];
    }
    double mean = sum / double(draws);
    CHECK(std::fabs(mean - 1.0) < 3.0 * params.sigma / 1000.0);  // CLT bound
}

TEST_CASE("reliability law is invariant to the transmitted sign (chi-square)") {
    // Folded symmetry: |llr| histograms for all-zero vs all-one transmissions.
    auto params = ChannelParams::from_sigma(0.8, 1, 1 /*unused rate*/);
    const std::size_t samples = 100'000;
    const int bins = 40;
    const double lo = 0.0, hi = 8.0 / (params.sigma * params.sigma);
    std::vector<double> h0(bins, 0), h1(bins, 0);
    rng::Stream s0(9), s1(10);
    BitVec zero(1), one(1);
    one.set(0);
    for (std::size_t i = 0; i < samples; ++i) {
        auto a = transmit(zero, params, s0);
        auto b = transmit(one, params, s1);
        int ba = int((a.rel[0] - lo) / (hi - lo) * bins);
        int bb = int((b.rel[0] - lo) / (hi - lo) * bins);
        if (ba >= 0 && ba < bins) h0[ba]++;
        if (bb >= 0 && bb < bins) h1[bb]++;
    }
    double chi2 = 0.0;
    int dof = 0;
    for (int b = 0; b < bins; ++b) {
        double tot = h0[b] + h1[b];
        if (tot < 10) continue;
        double d = h0[b] - h1[b];
        chi2 += d * d / (2.0 * tot);  // two-sample chi-square, equal sizes
        ++dof;
    }
    // p > 0.001 <=> chi2 below the 0.999 quantile; for dof ~ 35-40 that
    // quantile sits near dof + 3.1 sqrt(2 dof) + ~6.
    double crit = dof + 3.09 * std::sqrt(2.0 * dof) + 6.0;
    CHECK(chi2 < crit);
}
