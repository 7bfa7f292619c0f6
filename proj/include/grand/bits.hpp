#ifndef GRAND_BITS_HPP
#define GRAND_BITS_HPP

#include <bit>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace grand {

/// Fixed-length bit vector packed into 64-bit words.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVec from_bits(std::span<const uint8_t> bits) {
        BitVec v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) v.set(i);
        return v;
    }

    std::size_t size() const { return n_; }
    std::size_t words() const { return w_.size(); }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void clear(std::size_t i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    void assign_bit(std::size_t i, bool b) { b ? set(i) : clear(i); }

    void reset() { std::fill(w_.begin(), w_.end(), 0); }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (uint64_t w : w_) c += std::popcount(w);
        return c;
    }

    BitVec& operator^=(const BitVec& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && w_ == o.w_; }

    std::span<const uint64_t> raw() const { return w_; }
    std::span<uint64_t> raw() { return w_; }

    std::vector<uint8_t> to_bits() const {
        std::vector<uint8_t> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = get(i);
        return out;
    }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

private:
    std::size_t n_ = 0;
    std::vector<uint64_t> w_;
};

/// Dense binary matrix, rows packed into 64-bit words.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("BitMatrix: empty dimensions");
        data_.assign(rows * wpr_, 0);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool b) {
        uint64_t m = uint64_t(1) << (c & 63);
        uint64_t& w = data_[r * wpr_ + (c >> 6)];
        w = b ? (w | m) : (w & ~m);
    }

    std::span<const uint64_t> row(std::size_t r) const { return {data_.data() + r * wpr_, wpr_}; }
    std::span<uint64_t> row(std::size_t r) { return {data_.data() + r * wpr_, wpr_}; }

    void xor_row_into(std::size_t src, std::size_t dst) {
        for (std::size_t w = 0; w < wpr_; ++w) data_[dst * wpr_ + w] ^= data_[src * wpr_ + w];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < wpr_; ++w)
            std::swap(data_[a * wpr_ + w], data_[b * wpr_ + w]);
    }

    /// GF(2) rank, computed on a scratch copy.
    std::size_t rank() const {
        BitMatrix m = *this;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t piv = r;
            while (piv < rows_ && !m.get(piv, c)) ++piv;
            if (piv == rows_) continue;
            m.swap_rows(piv, r);
            for (std::size_t i = 0; i < rows_; ++i)
                if (i != r && m.get(i, c)) m.xor_row_into(r, i);
            ++r;
        }
        return r;
    }

    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    /// Row r as a BitVec of length cols.
    BitVec row_vec(std::size_t r) const {
        BitVec v(cols_);
        for (std::size_t w = 0; w < wpr_; ++w) v.raw()[w] = data_[r * wpr_ + w];
        return v;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<uint64_t> data_;
};

inline bool parity_of_and(std::span<const uint64_t> a, std::span<const uint64_t> b) {
    uint64_t acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc ^= a[i] & b[i];
    return std::popcount(acc) & 1u;
}

}  // namespace grand

#endif
