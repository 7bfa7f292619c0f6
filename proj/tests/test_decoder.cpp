#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "grand/channel.hpp"
#include "grand/decoder.hpp"
#include "grand/rng.hpp"

using namespace grand;

namespace {

std::vector<uint32_t> support(const BitVec& v) {
    std::vector<uint32_t> s;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v.get(i)) s.push_back(static_cast<uint32_t>(i));
    return s;
}

// All nonempty subsets of weights with their scores, for brute-force oracles.
std::vector<std::pair<double, std::vector<uint32_t>>> enumerate_subsets(
    std::span<const double> w) {
    std::vector<std::pair<double, std::vector<uint32_t>>> all;
    const std::size_t n = w.size();
    for (uint64_t mask = 1; mask < (uint64_t(1) << n); ++mask) {
        double score = 0.0;
        std::vector<uint32_t> sel;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) {
                score += w[i];
                sel.push_back(static_cast<uint32_t>(i));
            }
        all.push_back({score, std::move(sel)});
    }
    return all;
}

}  // namespace

TEST_CASE("hard pattern source: weight then lexicographic order") {
    auto src = hard_pattern_source(3, 3);
    std::vector<std::vector<uint32_t>> got;
    while (auto* p = src->next()) got.push_back(support(p->bits));
    std::vector<std::vector<uint32_t>> want{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
    CHECK(got == want);
}

TEST_CASE("hard pattern source combinatorics at n=10") {
    std::map<std::size_t, std::size_t> count;
    auto src = hard_pattern_source(10, 4);
    while (auto* p = src->next()) count[p->bits.popcount()]++;
    CHECK(count[1] == 10);
    CHECK(count[2] == 45);
    CHECK(count[3] == 120);
    CHECK(count[4] == 210);

    auto full = hard_pattern_source(10, 10);
    std::size_t total = 0;
    while (full->next()) ++total;
    CHECK(total == 1023);  // 2^10 - 1
}

TEST_CASE("srgrand source flips only unreliable positions") {
    SUBCASE("all reliable: no patterns at all") {
        std::vector<double> rel{5.0, 6.0, 7.0};
        auto src = srgrand_pattern_source(rel, 2.0, 3);
        CHECK(src->next() == nullptr);
    }
    SUBCASE("exactly one unreliable bit") {
        std::vector<double> rel{5.0, 0.4, 7.0};
        auto src = srgrand_pattern_source(rel, 2.0, 3);
        auto* p = src->next();
        REQUIRE(p != nullptr);
        CHECK(support(p->bits) == std::vector<uint32_t>{1});
        CHECK(src->next() == nullptr);
    }
    SUBCASE("u unreliable bits give 2^u - 1 patterns") {
        std::vector<double> rel(12, 9.0);
        for (int i : {0, 2, 3, 5, 7, 8, 10, 11}) rel[i] = 0.1 * (i + 1);
        auto src = srgrand_pattern_source(rel, 2.0, 12);
        std::set<std::vector<uint32_t>> seen;
        while (auto* p = src->next()) {
            auto sup = support(p->bits);
            for (uint32_t i : sup) CHECK(rel[i] < 2.0);
            CHECK(seen.insert(sup).second);
        }
        CHECK(seen.size() == 255);
    }
}

TEST_CASE("sgrand source: hand-checked prefix") {
    std::vector<double> rel{3.0, 1.0, 2.0};
    auto src = sgrand_pattern_source(rel);
    auto* p = src->next();
    CHECK(support(p->bits) == std::vector<uint32_t>{1});
    CHECK(p->score == doctest::Approx(1.0));
    p = src->next();
    CHECK(support(p->bits) == std::vector<uint32_t>{2});
    CHECK(p->score == doctest::Approx(2.0));
    p = src->next();
    CHECK(support(p->bits) == std::vector<uint32_t>{1, 2});
    CHECK(p->score == doctest::Approx(3.0));
}

TEST_CASE("sgrand source equals the exhaustive sort at n=10") {
    rng::Stream st(17);
    std::vector<double> rel(10);
    for (auto& x : rel) x = 0.05 + 10.0 * st.next_unit();
    auto oracle = enumerate_subsets(rel);
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    auto src = sgrand_pattern_source(rel);
    std::size_t idx = 0;
    while (auto* p = src->next()) {
        REQUIRE(idx < oracle.size());
        CHECK(p->score == doctest::Approx(oracle[idx].first).epsilon(1e-12));
        CHECK(support(p->bits) == oracle[idx].second);
        ++idx;
    }
    CHECK(idx == oracle.size());
}

TEST_CASE("sgrand scores stay nondecreasing over a long prefix at n=64") {
    rng::Stream st(23);
    std::vector<double> rel(64);
    for (auto& x : rel) x = 0.01 + 15.0 * st.next_unit();
    auto src = sgrand_pattern_source(rel);
    double prev = 0.0;
    for (int i = 0; i < 10000; ++i) {
        auto* p = src->next();
        REQUIRE(p != nullptr);
        CHECK(p->score >= prev - 1e-12);
        prev = p->score;
    }
}

TEST_CASE("dsgrand source: reference weight examples") {
    SUBCASE("weights (1,3,6,11), score 4 has exactly one pattern") {
        auto src = dsgrand_pattern_source({1, 3, 6, 11}, 4);
        std::vector<std::pair<double, std::vector<uint32_t>>> got;
        while (auto* p = src->next()) got.push_back({p->score, support(p->bits)});
        REQUIRE(!got.empty());
        CHECK(got.back().first == 4.0);
        CHECK(got.back().second == std::vector<uint32_t>{0, 1});  // 1 + 3
    }
    SUBCASE("weights (1,3,6,11), no pattern of score 5") {
        auto src = dsgrand_pattern_source({1, 3, 6, 11}, 5);
        std::vector<double> scores;
        while (auto* p = src->next()) scores.push_back(p->score);
        for (double s : scores) CHECK(s != 5.0);
    }
    SUBCASE("weights (1,1,2): seven patterns grouped by score") {
        auto src = dsgrand_pattern_source({1, 1, 2}, 4);
        std::map<double, std::set<std::vector<uint32_t>>> by_score;
        std::size_t total = 0;
        while (auto* p = src->next()) {
            by_score[p->score].insert(support(p->bits));
            ++total;
        }
        CHECK(total == 7);
        CHECK(by_score[1.0] == std::set<std::vector<uint32_t>>{{0}, {1}});
        CHECK(by_score[2.0] == std::set<std::vector<uint32_t>>{{2}, {0, 1}});
        CHECK(by_score[3.0] == std::set<std::vector<uint32_t>>{{0, 2}, {1, 2}});
        CHECK(by_score[4.0] == std::set<std::vector<uint32_t>>{{0, 1, 2}});
    }
}

TEST_CASE("dsgrand enumeration equals brute force (completeness, uniqueness, order)") {
    rng::Stream st(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 4 + st.next_u64() % 9;  // up to 12
        std::vector<uint32_t> w(n);
        std::vector<double> wd(n);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 1 + st.next_u64() % 7;
            wd[i] = w[i];
        }
        const uint64_t smax = 10 + st.next_u64() % 21;  // up to 30

        std::map<uint64_t, std::multiset<std::vector<uint32_t>>> oracle;
        for (auto& [score, sel] : enumerate_subsets(wd)) {
            uint64_t s = static_cast<uint64_t>(std::llround(score));
            if (s <= smax) oracle[s].insert(sel);
        }

        auto src = dsgrand_pattern_source(w, smax);
        std::map<uint64_t, std::multiset<std::vector<uint32_t>>> got;
        double prev = 0.0;
        uint64_t frontier_cap = 4 * n;
        while (auto* p = src->next()) {
            CHECK(p->score >= prev);
            prev = p->score;
            got[static_cast<uint64_t>(p->score)].insert(support(p->bits));
        }
        CHECK(got == oracle);
        CHECK(src->max_frontier() <= frontier_cap);
    }
}

TEST_CASE("weight scaling leaves the dsgrand pattern sequence unchanged") {
    std::vector<uint32_t> w{2, 5, 3, 7, 1, 4};
    const uint64_t smax = 15;
    std::vector<std::vector<uint32_t>> base;
    std::vector<double> base_scores;
    {
        auto src = dsgrand_pattern_source(w, smax);
        while (auto* p = src->next()) {
            base.push_back(support(p->bits));
            base_scores.push_back(p->score);
        }
    }
    for (uint32_t alpha : {2u, 3u, 5u}) {
        std::vector<uint32_t> ws(w);
        for (auto& x : ws) x *= alpha;
        auto src = dsgrand_pattern_source(ws, smax * alpha);
        std::size_t idx = 0;
        while (auto* p = src->next()) {
            REQUIRE(idx < base.size());
            CHECK(support(p->bits) == base[idx]);
            CHECK(p->score == doctest::Approx(base_scores[idx] * alpha));
            ++idx;
        }
        CHECK(idx == base.size());
    }
}

TEST_CASE("orbgrand source basics") {
    SUBCASE("first pattern flips the least reliable bit") {
        std::vector<double> rel{4.0, 0.3, 2.0, 9.0};
        auto src = orbgrand_pattern_source(rel);
        auto* p = src->next();
        CHECK(support(p->bits) == std::vector<uint32_t>{1});
        CHECK(p->score == 1.0);
    }
    SUBCASE("score 3 has exactly two patterns: {rank3} and {rank1, rank2}") {
        std::vector<double> rel{1.0, 2.0, 3.0, 4.0, 5.0};  // sorted: rank i = bit i-1
        auto src = orbgrand_pattern_source(rel);
        std::map<double, std::set<std::vector<uint32_t>>> by_score;
        for (int i = 0; i < 8; ++i) {
            auto* p = src->next();
            REQUIRE(p != nullptr);
            by_score[p->score].insert(support(p->bits));
        }
        CHECK(by_score[3.0] == std::set<std::vector<uint32_t>>{{2}, {0, 1}});
    }
    SUBCASE("pattern count per score equals distinct-part partition counts, n=8") {
        std::vector<double> rel{1, 2, 3, 4, 5, 6, 7, 8};
        std::vector<double> wd(rel);
        std::map<uint64_t, std::size_t> oracle;
        for (auto& [score, sel] : enumerate_subsets(wd))
            oracle[static_cast<uint64_t>(std::llround(score))]++;
        auto src = orbgrand_pattern_source(rel);
        std::map<uint64_t, std::size_t> got;
        while (auto* p = src->next()) got[static_cast<uint64_t>(p->score)]++;
        for (uint64_t s = 1; s <= 12; ++s) CHECK(got[s] == oracle[s]);
    }
    SUBCASE("already-sorted reliabilities match dsgrand with weights 1..n") {
        std::vector<double> rel{0.1, 0.5, 1.0, 1.7, 2.2, 3.0};
        auto orb = orbgrand_pattern_source(rel);
        auto ds = dsgrand_pattern_source({1, 2, 3, 4, 5, 6}, 21);
        while (true) {
            auto* a = orb->next();
            auto* b = ds->next();
            if (!a || !b) {
                CHECK(a == nullptr);
                CHECK(b == nullptr);
                break;
            }
            CHECK(support(a->bits) == support(b->bits));
            CHECK(a->score == b->score);
        }
    }
}

TEST_CASE("pattern sources replay identically after reset") {
    std::vector<double> rel{2.0, 0.7, 1.1, 3.9, 0.2};
    auto src = sgrand_pattern_source(rel);
    std::vector<std::vector<uint32_t>> first;
    for (int i = 0; i < 12; ++i) first.push_back(support(src->next()->bits));
    src->reset();
    for (int i = 0; i < 12; ++i) CHECK(support(src->next()->bits) == first[i]);

    auto ds = dsgrand_pattern_source({1, 2, 2, 4}, 9);
    std::vector<std::vector<uint32_t>> f2;
    while (auto* p = ds->next()) f2.push_back(support(p->bits));
    ds->reset();
    std::size_t idx = 0;
    while (auto* p = ds->next()) CHECK(support(p->bits) == f2[idx++]);
    CHECK(idx == f2.size());
}

TEST_CASE("grand_decode basics on hamming(7,4)") {
    auto code = builtin_code("hamming-7-4");
    SUBCASE("hard decision already in the code") {
        auto src = hard_pattern_source(7, 7);
        BitVec cw = code.encode(BitVec::from_bits(std::vector<uint8_t>{1, 0, 1, 1}));
        auto res = grand_decode(code, cw, *src, 1 << 10);
        CHECK(res.state == DecodeState::found);
        CHECK(res.n_p == 1);
        CHECK(*res.codeword == cw);
        CHECK(res.score == 0.0);
    }
    SUBCASE("single flipped bit is always repaired within 1 + 7 queries") {
        for (std::size_t j = 0; j < 7; ++j) {
            auto src = hard_pattern_source(7, 7);
            BitVec cw = code.encode(BitVec::from_bits(std::vector<uint8_t>{0, 1, 1, 0}));
            BitVec rx = cw;
            rx.assign_bit(j, !rx.get(j));
            auto res = grand_decode(code, rx, *src, 1 << 10);
            CHECK(res.state == DecodeState::found);
            CHECK(*res.codeword == cw);
            CHECK(res.n_p <= 8);
        }
    }
    SUBCASE("budget exhaustion abandons") {
        auto src = hard_pattern_source(7, 0);  // empty source
        BitVec rx(7);
        rx.set(0);
        auto res = grand_decode(code, rx, *src, 4);
        CHECK(res.state == DecodeState::abandoned);
        CHECK_FALSE(res.codeword.has_value());
    }
    SUBCASE("operation counters tick") {
        auto src = hard_pattern_source(7, 7);
        BitVec rx = code.encode(BitVec::from_bits(std::vector<uint8_t>{1, 1, 0, 0}));
        rx.assign_bit(2, !rx.get(2));
        auto res = grand_decode(code, rx, *src, 1 << 10);
        CHECK(res.ops.syndrome_word_ops > 0);
        CHECK(res.ops.comparisons >= res.n_p);
    }
}

TEST_CASE("sgrand decoding is maximum likelihood on (15,11)") {
    auto code = builtin_code("hamming-15-11");
    const std::size_t n = 15, k = 11;
    // Precompute the full codebook once: 2^11 codewords.
    std::vector<BitVec> book;
    book.reserve(std::size_t(1) << k);
    for (uint32_t m = 0; m < (1u << k); ++m) {
        BitVec msg(k);
        for (std::size_t i = 0; i < k; ++i) msg.assign_bit(i, (m >> i) & 1);
        book.push_back(code.encode(msg));
    }

    auto params = ChannelParams::from_ebn0_db(5.0, n, k);
    rng::Stream message_stream(555);
    std::size_t mismatches = 0;
    for (std::size_t trial = 0; trial < 10'000; ++trial) {
        rng::Stream st = rng::Stream::for_trial(99, 0, trial);
        const BitVec& cw = book[message_stream.next_u64() % book.size()];
        Observation obs = transmit(cw, params, st);

        auto src = sgrand_pattern_source(obs.rel);
        auto res = grand_decode(code, obs.hard, *src, uint64_t(1) << 40);
        REQUIRE(res.state == DecodeState::found);

        double best = 1e300;
        for (const auto& c : book) {
            double metric = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (c.get(i) != obs.hard.get(i)) metric += obs.rel[i];
            best = std::min(best, metric);
        }
        double got = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (res.codeword->get(i) != obs.hard.get(i)) got += obs.rel[i];
        if (std::fabs(got - best) > 1e-9 * std::max(1.0, best)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("dsgrand finds the minimum quantized score over the codebook") {
    auto code = builtin_code("hamming-15-11");
    const std::size_t n = 15, k = 11;
    std::vector<BitVec> book;
    for (uint32_t m = 0; m < (1u << k); ++m) {
        BitVec msg(k);
        for (std::size_t i = 0; i < k; ++i) msg.assign_bit(i, (m >> i) & 1);
        book.push_back(code.encode(msg));
    }
    rng::Stream st(2);
    for (int trial = 0; trial < 200; ++trial) {
        BitVec rx(n);
        for (std::size_t i = 0; i < n; ++i) rx.assign_bit(i, st.next_bit());
        std::vector<uint32_t> w(n);
        for (auto& x : w) x = 1 + st.next_u64() % 7;

        uint64_t best = UINT64_MAX;
        for (const auto& c : book) {
            uint64_t metric = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (c.get(i) != rx.get(i)) metric += w[i];
            best = std::min(best, metric);
        }
        auto src = dsgrand_pattern_source(w, 200);
        auto res = grand_decode(code, rx, *src, uint64_t(1) << 40);
        REQUIRE(res.state == DecodeState::found);
        CHECK(static_cast<uint64_t>(res.score) == best);
        CHECK(res.ops.max_stack <= 4 * n);
    }
}

TEST_CASE("decoder wrapper wiring") {
    auto code = builtin_code("bch-31-16");
    SUBCASE("dsgrand requires a quantizer and smax") {
        DecoderConfig cfg;
        cfg.kind = DecoderKind::dsgrand;
        CHECK_THROWS_AS(Decoder(code, cfg), std::invalid_argument);
    }
    SUBCASE("srgrand requires delta or sigma") {
        DecoderConfig cfg;
        cfg.kind = DecoderKind::srgrand;
        CHECK_THROWS_AS(Decoder(code, cfg), std::invalid_argument);
        cfg.sigma = 0.7;
        Decoder ok(code, cfg);  // default delta = mean reliability
        CHECK(ok.budget() == (uint64_t(1) << 19));
    }
    SUBCASE("sgrand and a fine dsgrand quantizer agree almost always") {
        auto params = ChannelParams::from_ebn0_db(5.0, 31, 16);
        auto quant = heuristic_quantizer(params.sigma, 8);

        DecoderConfig ds;
        ds.kind = DecoderKind::dsgrand;
        ds.quantizer = quant;
        uint64_t wsum = 0;
        for (auto w : quant.weights) wsum += w;
        ds.smax = 4 * quant.weights.back();
        Decoder dsg(code, ds);

        DecoderConfig sg;
        sg.kind = DecoderKind::sgrand;
        Decoder sgr(code, sg);

        std::size_t agree = 0, total = 1000;
        rng::Stream message_stream(7);
        for (std::size_t trial = 0; trial < total; ++trial) {
            rng::Stream st = rng::Stream::for_trial(1234, 1, trial);
            BitVec msg(16);
            for (std::size_t i = 0; i < 16; ++i) msg.assign_bit(i, message_stream.next_bit());
            BitVec cw = code.encode(msg);
            Observation obs = transmit(cw, params, st);
            auto a = dsg.decode(obs);
            auto b = sgr.decode(obs);
            if (a.state == DecodeState::found && b.state == DecodeState::found &&
                *a.codeword == *b.codeword)
                ++agree;
        }
        CHECK(agree >= total * 99 / 100);
    }
}
