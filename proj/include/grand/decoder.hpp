#ifndef GRAND_DECODER_HPP
#define GRAND_DECODER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "grand/channel.hpp"
#include "grand/codebook.hpp"
#include "grand/quantizer.hpp"

namespace grand {

struct Pattern {
    BitVec bits;
    double score = 0.0;
};

/// Generator of nonempty error patterns in nondecreasing score order. Each
/// pattern is emitted exactly once; the returned pointer stays valid until
/// the next call. Implementations are single-use unless reset.
class PatternSource {
public:
    virtual ~PatternSource() = default;
    virtual const Pattern* next() = 0;
    virtual void reset() = 0;
    /// High-water mark of the internal frontier (stack or heap).
    virtual uint64_t max_frontier() const { return 0; }
    virtual uint64_t pattern_copies() const { return 0; }
};

/// Patterns by Hamming weight, lexicographic flipped-index order within a weight.
std::unique_ptr<PatternSource> hard_pattern_source(std::size_t n, std::size_t max_weight);

/// Hamming-weight patterns restricted to positions with rel < delta.
std::unique_ptr<PatternSource> srgrand_pattern_source(std::span<const double> rel, double delta,
                                                      std::size_t max_weight);

/// Exact score order for real-valued reliabilities via a priority queue
/// (extension/shift expansion over rank-sorted positions). Reliability ties
/// are broken by original index.
std::unique_ptr<PatternSource> sgrand_pattern_source(std::span<const double> rel);

/// Subset-sum DP enumeration: all patterns of integer score s for s = 1.. s_max,
/// LIFO stack discipline fixing the order within a score level.
std::unique_ptr<PatternSource> dsgrand_pattern_source(std::vector<uint32_t> weights,
                                                      uint64_t s_max);

/// Rank weights 1..n assigned through the reliability sort permutation, run on
/// the subset-sum engine.
std::unique_ptr<PatternSource> orbgrand_pattern_source(std::span<const double> rel);

enum class DecodeState { found, abandoned };

struct DecodeResult {
    std::optional<BitVec> codeword;
    uint64_t n_p = 0;  // membership queries, counting the initial hard-decision test
    DecodeState state = DecodeState::abandoned;
    double score = 0.0;  // score of the found pattern (0 when found at n_p = 1)
    OpCounters ops;
};

/// Algorithm: test the hard decision, then source patterns in score order until
/// a codeword is hit, the budget is reached, the score exceeds smax, or the
/// source is exhausted.
DecodeResult grand_decode(const LinearCode& code, const BitVec& hard, PatternSource& source,
                          uint64_t budget, std::optional<double> smax = std::nullopt);

enum class DecoderKind { hard, srgrand, orbgrand, sgrand, dsgrand, dsgrand_fitted };

DecoderKind decoder_kind_from_string(const std::string& s);
std::string to_string(DecoderKind k);

struct DecoderConfig {
    DecoderKind kind = DecoderKind::hard;
    std::optional<ReliabilityQuantizer> quantizer;  // required for dsgrand
    std::optional<double> srgrand_delta;            // default 2/sigma^2
    std::optional<double> sigma;                    // for srgrand's default delta
    std::optional<uint64_t> smax;                   // required for dsgrand
    uint64_t budget = 0;                            // 0 -> 2^{n-k+4}
    std::size_t max_weight = SIZE_MAX;              // hard / srgrand sweep depth
    std::vector<uint32_t> fitted_weights;           // dsgrand_fitted, by rank
};

/// Immutable decoder bound to one code; safe to call concurrently. A fresh
/// pattern source is built from each Observation.
class Decoder {
public:
    Decoder(const LinearCode& code, DecoderConfig config);
    DecodeResult decode(const Observation& obs) const;
    uint64_t budget() const { return budget_; }

private:
    const LinearCode& code_;
    DecoderConfig cfg_;
    uint64_t budget_;
};

}  // namespace grand

#endif
