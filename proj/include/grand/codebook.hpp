#ifndef GRAND_CODEBOOK_HPP
#define GRAND_CODEBOOK_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "grand/bits.hpp"

namespace grand {

/// Polynomial over GF(2), coefficients stored lowest degree first.
class BinaryPolynomial {
public:
    BinaryPolynomial() = default;
    explicit BinaryPolynomial(std::vector<uint8_t> coeffs);

    /// Polynomial from the set bits of `mask`: bit i -> x^i.
    static BinaryPolynomial from_mask(uint64_t mask);
    /// x^n + 1.
    static BinaryPolynomial x_n_plus_1(std::size_t n);

    bool is_zero() const { return c_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool coeff(std::size_t i) const { return i < c_.size() && c_[i]; }
    const std::vector<uint8_t>& coeffs() const { return c_; }

    BinaryPolynomial operator+(const BinaryPolynomial& o) const;
    BinaryPolynomial operator*(const BinaryPolynomial& o) const;
    /// Quotient and remainder; divisor must be nonzero.
    std::pair<BinaryPolynomial, BinaryPolynomial> divmod(const BinaryPolynomial& d) const;
    bool divides(const BinaryPolynomial& dividend) const;

    bool operator==(const BinaryPolynomial& o) const { return c_ == o.c_; }
    std::string to_string() const;

private:
    void trim();
    std::vector<uint8_t> c_;  // c_[i] = coefficient of x^i; trailing zeros trimmed
};

struct OpCounters {
    uint64_t syndrome_word_ops = 0;  // 64-bit AND/XOR steps spent on parity checks
    uint64_t comparisons = 0;
    uint64_t pattern_copies = 0;
    uint64_t max_stack = 0;  // high-water mark of the pattern generator frontier

    void merge(const OpCounters& o) {
        syndrome_word_ops += o.syndrome_word_ops;
        comparisons += o.comparisons;
        pattern_copies += o.pattern_copies;
        if (o.max_stack > max_stack) max_stack = o.max_stack;
    }
};

/// Binary (n,k) linear block code given by a full-rank parity-check matrix.
/// Immutable after construction; safe for concurrent reads.
class LinearCode {
public:
    LinearCode(std::size_t n, std::size_t k, BitMatrix H, std::optional<BitMatrix> G,
               std::string name);

    std::size_t n() const { return n_; }
    std::size_t k() const { return k_; }
    const BitMatrix& H() const { return H_; }
    const std::optional<BitMatrix>& G() const { return G_; }
    const std::string& name() const { return name_; }

    /// True iff H w^T = 0. Stops at the first unsatisfied parity equation.
    bool is_codeword(const BitVec& word, OpCounters* ops = nullptr) const;
    BitVec syndrome(const BitVec& word) const;

    /// message (length k) * G; requires G.
    BitVec encode(const BitVec& message) const;

private:
    std::size_t n_, k_;
    BitMatrix H_;
    std::optional<BitMatrix> G_;
    std::string name_;
};

/// Systematic CRC code of length n: codewords are (message, remainder) pairs.
LinearCode crc_code(std::size_t n, const BinaryPolynomial& poly);

/// CRC generator from a hex mask listing coefficients of x^r..x^1; the +1
/// constant term is implicit (so 0x710 -> x^11+x^10+x^9+x^5+1).
BinaryPolynomial crc_poly_from_hex(uint64_t mask);

/// Narrow-sense binary BCH generator: n = 2^m - 1, g = lcm of the minimal
/// polynomials of alpha^1..alpha^{2t}.
std::tuple<std::size_t, std::size_t, BinaryPolynomial> bch_generator(unsigned m, unsigned t);

/// Cyclic code with generator g (must divide x^n + 1); G rows are x^i g(x).
LinearCode cyclic_code_from_generator(std::size_t n, const BinaryPolynomial& g);

LinearCode load_code(std::istream& in, std::string name = "file");
LinearCode load_code_file(const std::string& path);
void save_code(const LinearCode& code, std::ostream& out);
void save_code_file(const LinearCode& code, const std::string& path);

/// Resolve a builtin code name: "bch-n-k", "hamming-7-4", "hamming-15-11",
/// "crc-n-0xHEX", "parity-n". Throws std::invalid_argument for unknown names.
LinearCode builtin_code(const std::string& name);

}  // namespace grand

#endif
