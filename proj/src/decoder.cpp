#include "grand/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace grand {

// ------------------------------------------------------------- hard / srgrand

namespace {

// Combinations of {0..m-1} by weight, lexicographic within a weight, positions
// mapped through `positions` into a length-n pattern.
class CombinationSource final : public PatternSource {
public:
    CombinationSource(std::size_t n, std::vector<uint32_t> positions, std::size_t max_weight)
        : n_(n), pos_(std::move(positions)), max_weight_(std::min(max_weight, pos_.size())) {
        reset();
    }

    void reset() override {
        weight_ = 0;
        idx_.clear();
        cur_.bits = BitVec(n_);
        done_ = pos_.empty() || max_weight_ == 0;
    }

    const Pattern* next() override {
        if (done_) return nullptr;
        if (weight_ == 0) {
            weight_ = 1;
            idx_.assign(1, 0);
        } else if (!advance()) {
            ++weight_;
            if (weight_ > max_weight_) {
                done_ = true;
                return nullptr;
            }
            idx_.resize(weight_);
            std::iota(idx_.begin(), idx_.end(), 0u);
        }
        cur_.bits.reset();
        for (uint32_t i : idx_) cur_.bits.set(pos_[i]);
        cur_.score = static_cast<double>(weight_);
        return &cur_;
    }

private:
    bool advance() {  // next combination of size weight_ over pos_.size() items
        const std::size_t m = pos_.size();
        std::size_t i = weight_;
        while (i-- > 0) {
            if (idx_[i] + (weight_ - i) <= m - 1) {  // room to shift the tail right
                ++idx_[i];
                for (std::size_t j = i + 1; j < weight_; ++j) idx_[j] = idx_[j - 1] + 1;
                return true;
            }
        }
        return false;
    }

    std::size_t n_;
    std::vector<uint32_t> pos_;
    std::size_t max_weight_;
    std::size_t weight_ = 0;
    std::vector<uint32_t> idx_;
    Pattern cur_;
    bool done_ = false;
};

}  // namespace

std::unique_ptr<PatternSource> hard_pattern_source(std::size_t n, std::size_t max_weight) {
    if (max_weight > n) throw std::invalid_argument("hard_pattern_source: max_weight > n");
    std::vector<uint32_t> pos(n);
    std::iota(pos.begin(), pos.end(), 0u);
    return std::make_unique<CombinationSource>(n, std::move(pos), max_weight);
}

std::unique_ptr<PatternSource> srgrand_pattern_source(std::span<const double> rel, double delta,
                                                      std::size_t max_weight) {
    if (!(delta > 0.0)) throw std::invalid_argument("srgrand_pattern_source: delta must be > 0");
    std::vector<uint32_t> pos;
    for (std::size_t i = 0; i < rel.size(); ++i)
        if (rel[i] < delta) pos.push_back(static_cast<uint32_t>(i));
    return std::make_unique<CombinationSource>(rel.size(), std::move(pos), max_weight);
}

// ------------------------------------------------------------------- SGRAND

namespace {

class SgrandSource final : public PatternSource {
public:
    explicit SgrandSource(std::span<const double> rel) : n_(rel.size()) {
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0u);
        // Ties broken by original index, which stands in for the documented
        // 1e-12 * index perturbation.
        std::stable_sort(order_.begin(), order_.end(),
                         [&](uint32_t a, uint32_t b) { return rel[a] < rel[b]; });
        sorted_rel_.resize(n_);
        for (std::size_t r = 0; r < n_; ++r) sorted_rel_[r] = rel[order_[r]];
        reset();
    }

    void reset() override {
        heap_.clear();
        if (n_ > 0) heap_.push_back(Node{sorted_rel_[0], {0}});
        max_heap_ = heap_.size();
        copies_ = 0;
        cur_.bits = BitVec(n_);
    }

    const Pattern* next() override {
        if (heap_.empty()) return nullptr;
        std::pop_heap(heap_.begin(), heap_.end(), cmp_);
        Node top = std::move(heap_.back());
        heap_.pop_back();

        uint32_t last = top.sel.back();
        if (last + 1 < n_) {
            Node ext{top.score + sorted_rel_[last + 1], top.sel};  // extension
            ext.sel.push_back(last + 1);
            ++copies_;
            push(std::move(ext));
            Node shift{top.score + sorted_rel_[last + 1] - sorted_rel_[last], top.sel};
            shift.sel.back() = last + 1;
            ++copies_;
            push(std::move(shift));
        }

        cur_.bits.reset();
        for (uint32_t r : top.sel) cur_.bits.set(order_[r]);
        cur_.score = top.score;
        return &cur_;
    }

    uint64_t max_frontier() const override { return max_heap_; }
    uint64_t pattern_copies() const override { return copies_; }

private:
    struct Node {
        double score;
        std::vector<uint32_t> sel;  // chosen rank positions, ascending
    };
    struct Cmp {  // min-heap on (score, lexicographic selection)
        bool operator()(const Node& a, const Node& b) const {
            if (a.score != b.score) return a.score > b.score;
            return a.sel > b.sel;
        }
    };

    void push(Node&& node) {
        heap_.push_back(std::move(node));
        std::push_heap(heap_.begin(), heap_.end(), cmp_);
        max_heap_ = std::max<uint64_t>(max_heap_, heap_.size());
    }

    std::size_t n_;
    std::vector<uint32_t> order_;
    std::vector<double> sorted_rel_;
    std::vector<Node> heap_;
    Cmp cmp_;
    Pattern cur_;
    uint64_t max_heap_ = 0;
    uint64_t copies_ = 0;
};

}  // namespace

std::unique_ptr<PatternSource> sgrand_pattern_source(std::span<const double> rel) {
    return std::make_unique<SgrandSource>(rel);
}

// ------------------------------------------------------------------ DSGRAND

namespace {

// Subset-sum enumeration over a lazily filled DP table. Column s records, per
// prefix length i, whether some nonempty subset of w^i sums to s. Patterns of
// exact score s are expanded depth-first from the seed frame <n, s, s - w_n>.
class DsgrandSource final : public PatternSource {
public:
    DsgrandSource(std::vector<uint32_t> weights, uint64_t s_max)
        : w_(std::move(weights)), n_(w_.size()), smax_(s_max) {
        if (n_ == 0) throw std::invalid_argument("dsgrand_pattern_source: empty weights");
        for (uint32_t x : w_)
            if (x < 1) throw std::invalid_argument("dsgrand_pattern_source: weights must be >= 1");
        words_ = (n_ + 63) / 64;
        reset();
    }

    void reset() override {
        dp_.clear();
        stack_.clear();
        s_ = 0;
        max_stack_ = 0;
        copies_ = 0;
        cur_.bits = BitVec(n_);
    }

    const Pattern* next() override {
        while (true) {
            if (stack_.empty()) {
                if (!advance_score()) return nullptr;
            }
            Frame f = std::move(stack_.back());
            stack_.pop_back();

            const bool emit = f.d == 0;
            if (emit) {
                cur_.bits = f.e;
                cur_.score = static_cast<double>(s_);
            }
            if (f.i > 1) {
                const uint32_t wi = w_[f.i - 1];
                const uint32_t wim1 = w_[f.i - 2];
                const bool excl = lambda(f.i - 1, f.j);
                const bool incl = f.j >= wi && lambda(f.i - 1, f.j - wi);
                if (excl && incl) {
                    BitVec e2 = f.e;  // the one copy Algorithm line 23 allows
                    ++copies_;
                    e2.clear(f.i - 1);
                    e2.set(f.i - 2);
                    push(Frame{f.i - 1, f.j, f.d + static_cast<int64_t>(wi) - wim1, std::move(e2)});
                    f.e.set(f.i - 2);
                    push(Frame{f.i - 1, f.j - wi, f.d - static_cast<int64_t>(wim1), std::move(f.e)});
                } else if (excl) {
                    f.e.clear(f.i - 1);
                    f.e.set(f.i - 2);
                    push(Frame{f.i - 1, f.j, f.d + static_cast<int64_t>(wi) - wim1, std::move(f.e)});
                } else if (incl) {
                    f.e.set(f.i - 2);
                    push(Frame{f.i - 1, f.j - wi, f.d - static_cast<int64_t>(wim1), std::move(f.e)});
                }
            }
            if (emit) return &cur_;
        }
    }

    uint64_t max_frontier() const override { return max_stack_; }
    uint64_t pattern_copies() const override { return copies_; }

private:
    struct Frame {
        uint32_t i;   // 1-based row: e_i is tentatively set, rows below are free
        uint64_t j;   // target score for the prefix w^i
        int64_t d;    // s - score(e); equals j - w_i
        BitVec e;
    };

    bool lambda(uint32_t i, uint64_t s) const {  // Lambda[i][s], i 1-based
        const auto& col = dp_[s];
        return (col[(i - 1) >> 6] >> ((i - 1) & 63)) & 1u;
    }

    void fill_column(uint64_t s) {
        std::vector<uint64_t> col(words_, 0);
        auto set_bit = [&](std::size_t i) { col[i >> 6] |= uint64_t(1) << (i & 63); };
        auto get_bit = [&](std::size_t i) { return (col[i >> 6] >> (i & 63)) & 1u; };
        for (std::size_t i = 0; i < n_; ++i) {
            bool v = (i > 0 && get_bit(i - 1)) || w_[i] == s;
            if (!v && i > 0 && s >= w_[i]) v = lambda(static_cast<uint32_t>(i), s - w_[i]);
            if (v) set_bit(i);
        }
        dp_.push_back(std::move(col));
    }

    bool advance_score() {
        while (true) {
            if (s_ >= smax_) return false;
            ++s_;
            while (dp_.size() <= s_) fill_column(dp_.size());
            if (lambda(static_cast<uint32_t>(n_), s_)) break;
        }
        BitVec seed(n_);
        seed.set(n_ - 1);
        push(Frame{static_cast<uint32_t>(n_), s_,
                   static_cast<int64_t>(s_) - static_cast<int64_t>(w_[n_ - 1]), std::move(seed)});
        return true;
    }

    void push(Frame&& f) {
        stack_.push_back(std::move(f));
        max_stack_ = std::max<uint64_t>(max_stack_, stack_.size());
    }

    std::vector<uint32_t> w_;
    std::size_t n_, words_;
    uint64_t smax_;
    std::vector<std::vector<uint64_t>> dp_;  // dp_[s] = packed column
    std::vector<Frame> stack_;
    uint64_t s_ = 0;
    uint64_t max_stack_ = 0, copies_ = 0;
    Pattern cur_;
};

}  // namespace

std::unique_ptr<PatternSource> dsgrand_pattern_source(std::vector<uint32_t> weights,
                                                      uint64_t s_max) {
    return std::make_unique<DsgrandSource>(std::move(weights), s_max);
}

std::unique_ptr<PatternSource> orbgrand_pattern_source(std::span<const double> rel) {
    const std::size_t n = rel.size();
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return rel[a] < rel[b]; });
    std::vector<uint32_t> weights(n);
    for (std::size_t r = 0; r < n; ++r) weights[order[r]] = static_cast<uint32_t>(r + 1);
    return dsgrand_pattern_source(std::move(weights), n * (n + 1) / 2);
}

// --------------------------------------------------------------- decode loop

DecodeResult grand_decode(const LinearCode& code, const BitVec& hard, PatternSource& source,
                          uint64_t budget, std::optional<double> smax) {
    if (hard.size() != code.n()) throw std::invalid_argument("grand_decode: hard length != n");
    DecodeResult res;
    res.n_p = 1;
    if (code.is_codeword(hard, &res.ops)) {
        res.codeword = hard;
        res.state = DecodeState::found;
        res.score = 0.0;
        res.ops.max_stack = source.max_frontier();
        return res;
    }
    BitVec trial(code.n());
    while (res.n_p < budget) {
        const Pattern* p = source.next();
        if (!p) break;  // exhausted
        if (smax && p->score > *smax) break;
        trial = hard;
        trial ^= p->bits;
        ++res.n_p;
        if (code.is_codeword(trial, &res.ops)) {
            res.codeword = std::move(trial);
            res.state = DecodeState::found;
            res.score = p->score;
            res.ops.max_stack = source.max_frontier();
            res.ops.pattern_copies = source.pattern_copies();
            return res;
        }
    }
    res.state = DecodeState::abandoned;
    res.ops.max_stack = source.max_frontier();
    res.ops.pattern_copies = source.pattern_copies();
    return res;
}

// ------------------------------------------------------------------ Decoder

DecoderKind decoder_kind_from_string(const std::string& s) {
    if (s == "hard") return DecoderKind::hard;
    if (s == "srgrand") return DecoderKind::srgrand;
    if (s == "orbgrand") return DecoderKind::orbgrand;
    if (s == "sgrand") return DecoderKind::sgrand;
    if (s == "dsgrand") return DecoderKind::dsgrand;
    if (s == "dsgrand-fitted") return DecoderKind::dsgrand_fitted;
    throw std::invalid_argument("unknown decoder kind: " + s);
}

std::string to_string(DecoderKind k) {
    switch (k) {
        case DecoderKind::hard: return "hard";
        case DecoderKind::srgrand: return "srgrand";
        case DecoderKind::orbgrand: return "orbgrand";
        case DecoderKind::sgrand: return "sgrand";
        case DecoderKind::dsgrand: return "dsgrand";
        case DecoderKind::dsgrand_fitted: return "dsgrand-fitted";
    }
    return "?";
}

Decoder::Decoder(const LinearCode& code, DecoderConfig config)
    : code_(code), cfg_(std::move(config)) {
    if (cfg_.kind == DecoderKind::dsgrand) {
        if (!cfg_.quantizer) throw std::invalid_argument("Decoder: dsgrand needs a quantizer");
        if (!cfg_.smax) throw std::invalid_argument("Decoder: dsgrand needs smax");
    }
    if (cfg_.kind == DecoderKind::dsgrand_fitted) {
        if (cfg_.fitted_weights.size() != code.n())
            throw std::invalid_argument("Decoder: dsgrand-fitted needs n rank weights");
        if (!cfg_.smax) throw std::invalid_argument("Decoder: dsgrand-fitted needs smax");
    }
    if (cfg_.kind == DecoderKind::srgrand && !cfg_.srgrand_delta && !cfg_.sigma)
        throw std::invalid_argument("Decoder: srgrand needs delta or sigma");
    if (cfg_.budget == 0) {
        unsigned redundancy = static_cast<unsigned>(code.n() - code.k());
        budget_ = redundancy + 4 >= 62 ? (uint64_t(1) << 62) : (uint64_t(1) << (redundancy + 4));
    } else {
        budget_ = cfg_.budget;
    }
}

DecodeResult Decoder::decode(const Observation& obs) const {
    const std::size_t n = code_.n();
    if (obs.rel.size() != n) throw std::invalid_argument("Decoder: observation length != n");
    std::unique_ptr<PatternSource> src;
    std::optional<double> smax;
    switch (cfg_.kind) {
        case DecoderKind::hard:
            src = hard_pattern_source(n, std::min(cfg_.max_weight, n));
            break;
        case DecoderKind::srgrand: {
            double delta = cfg_.srgrand_delta
                               ? *cfg_.srgrand_delta
                               : 2.0 / (*cfg_.sigma * *cfg_.sigma);  // mean reliability
            src = srgrand_pattern_source(obs.rel, delta, std::min(cfg_.max_weight, n));
            break;
        }
        case DecoderKind::orbgrand:
            src = orbgrand_pattern_source(obs.rel);
            break;
        case DecoderKind::sgrand:
            src = sgrand_pattern_source(obs.rel);
            if (cfg_.smax) smax = static_cast<double>(*cfg_.smax);
            break;
        case DecoderKind::dsgrand: {
            std::vector<uint32_t> w(n);
            for (std::size_t i = 0; i < n; ++i)
                w[i] = quantize_reliability(*cfg_.quantizer, obs.rel[i]).weight;
            src = dsgrand_pattern_source(std::move(w), *cfg_.smax);
            break;
        }
        case DecoderKind::dsgrand_fitted: {
            std::vector<uint32_t> order(n);
            std::iota(order.begin(), order.end(), 0u);
            std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
                return obs.rel[a] < obs.rel[b];
            });
            std::vector<uint32_t> w(n);
            for (std::size_t r = 0; r < n; ++r) w[order[r]] = cfg_.fitted_weights[r];
            src = dsgrand_pattern_source(std::move(w), *cfg_.smax);
            break;
        }
    }
    return grand_decode(code_, obs.hard, *src, budget_, smax);
}

}  // namespace grand
