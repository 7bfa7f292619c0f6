#include "grand/codebook.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace grand {

// ---------------------------------------------------------------- polynomials

BinaryPolynomial::BinaryPolynomial(std::vector<uint8_t> coeffs) : c_(std::move(coeffs)) {
    for (auto& b : c_) b = b ? 1 : 0;
    trim();
}

void BinaryPolynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BinaryPolynomial BinaryPolynomial::from_mask(uint64_t mask) {
    std::vector<uint8_t> c;
    for (unsigned i = 0; i < 64; ++i) c.push_back((mask >> i) & 1u);
    return BinaryPolynomial(std::move(c));
}

BinaryPolynomial BinaryPolynomial::x_n_plus_1(std::size_t n) {
    std::vector<uint8_t> c(n + 1, 0);
    c[0] = 1;
    c[n] = 1;
    return BinaryPolynomial(std::move(c));
}

BinaryPolynomial BinaryPolynomial::operator+(const BinaryPolynomial& o) const {
    std::vector<uint8_t> c(std::max(c_.size(), o.c_.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = (i < c_.size() ? c_[i] : 0) ^ (i < o.c_.size() ? o.c_[i] : 0);
    return BinaryPolynomial(std::move(c));
}

BinaryPolynomial BinaryPolynomial::operator*(const BinaryPolynomial& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<uint8_t> c(c_.size() + o.c_.size() - 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (!c_[i]) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] ^= o.c_[j];
    }
    return BinaryPolynomial(std::move(c));
}

std::pair<BinaryPolynomial, BinaryPolynomial> BinaryPolynomial::divmod(
    const BinaryPolynomial& d) const {
    if (d.is_zero()) throw std::invalid_argument("BinaryPolynomial: division by zero");
    std::vector<uint8_t> rem = c_;
    const int dd = d.degree();
    if (degree() < dd) return {BinaryPolynomial{}, *this};
    std::vector<uint8_t> quot(degree() - dd + 1, 0);
    for (int i = degree(); i >= dd; --i) {
        if (!rem[i]) continue;
        quot[i - dd] = 1;
        for (int j = 0; j <= dd; ++j) rem[i - dd + j] ^= d.c_[j];
    }
    return {BinaryPolynomial(std::move(quot)), BinaryPolynomial(std::move(rem))};
}

bool BinaryPolynomial::divides(const BinaryPolynomial& dividend) const {
    return dividend.divmod(*this).second.is_zero();
}

std::string BinaryPolynomial::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        if (!c_[i]) continue;
        if (!s.empty()) s += "+";
        if (i == 0)
            s += "1";
        else if (i == 1)
            s += "x";
        else
            s += "x^" + std::to_string(i);
    }
    return s;
}

// ---------------------------------------------------------------- linear code

LinearCode::LinearCode(std::size_t n, std::size_t k, BitMatrix H, std::optional<BitMatrix> G,
                       std::string name)
    : n_(n), k_(k), H_(std::move(H)), G_(std::move(G)), name_(std::move(name)) {
    if (n_ == 0 || k_ == 0 || k_ >= n_) throw std::invalid_argument("LinearCode: bad (n,k)");
    if (H_.rows() != n_ - k_ || H_.cols() != n_)
        throw std::invalid_argument("LinearCode: H must be (n-k) x n");
    if (H_.rank() != n_ - k_)
        throw std::invalid_argument("LinearCode: H is rank deficient");
    if (G_) {
        if (G_->rows() != k_ || G_->cols() != n_)
            throw std::invalid_argument("LinearCode: G must be k x n");
        if (G_->rank() != k_) throw std::invalid_argument("LinearCode: G is rank deficient");
        for (std::size_t i = 0; i < k_; ++i) {
            BitVec r = G_->row_vec(i);
            if (!is_codeword(r)) throw std::invalid_argument("LinearCode: G H^T != 0");
        }
    }
}

bool LinearCode::is_codeword(const BitVec& word, OpCounters* ops) const {
    if (word.size() != n_) throw std::invalid_argument("is_codeword: word length != n");
    const std::size_t wpr = H_.words_per_row();
    for (std::size_t r = 0; r < H_.rows(); ++r) {
        if (ops) {
            ops->syndrome_word_ops += wpr;
            ops->comparisons += 1;
        }
        if (parity_of_and(H_.row(r), word.raw())) return false;
    }
    return true;
}

BitVec LinearCode::syndrome(const BitVec& word) const {
    if (word.size() != n_) throw std::invalid_argument("syndrome: word length != n");
    BitVec s(n_ - k_);
    for (std::size_t r = 0; r < H_.rows(); ++r)
        if (parity_of_and(H_.row(r), word.raw())) s.set(r);
    return s;
}

BitVec LinearCode::encode(const BitVec& message) const {
    if (!G_) throw std::invalid_argument("encode: code has no generator matrix");
    if (message.size() != k_) throw std::invalid_argument("encode: message length != k");
    BitVec c(n_);
    for (std::size_t i = 0; i < k_; ++i) {
        if (!message.get(i)) continue;
        auto row = G_->row(i);
        for (std::size_t w = 0; w < row.size(); ++w) c.raw()[w] ^= row[w];
    }
    return c;
}

// ---------------------------------------------------------------- CRC codes

BinaryPolynomial crc_poly_from_hex(uint64_t mask) {
    if (mask == 0) throw std::invalid_argument("crc_poly_from_hex: zero mask");
    return BinaryPolynomial::from_mask((mask << 1) | 1u);
}

LinearCode crc_code(std::size_t n, const BinaryPolynomial& poly) {
    const int r = poly.degree();
    if (poly.is_zero() || r < 1 || static_cast<std::size_t>(r) >= n)
        throw std::invalid_argument("crc_code: degenerate polynomial");
    if (!poly.coeff(0))
        throw std::invalid_argument("crc_code: polynomial constant term must be 1");
    const std::size_t k = n - static_cast<std::size_t>(r);

    // Codeword bit j carries the coefficient of x^{n-1-j}; parity bits are the
    // remainder of the shifted message, the usual CRC append.
    BitMatrix G(k, n);
    BitMatrix H(n - k, n);
    for (std::size_t i = 0; i < k; ++i) {
        G.set(i, i, true);
        std::vector<uint8_t> mono(n - i, 0);  // x^{n-1-i}
        mono[n - 1 - i] = 1;
        BinaryPolynomial rem = BinaryPolynomial(std::move(mono)).divmod(poly).second;
        for (std::size_t j = 0; j < static_cast<std::size_t>(r); ++j) {
            bool bit = rem.coeff(static_cast<std::size_t>(r) - 1 - j);
            G.set(i, k + j, bit);
            H.set(j, i, bit);  // H = [P^T | I]
        }
    }
    for (std::size_t j = 0; j < n - k; ++j) H.set(j, k + j, true);

    std::ostringstream name;
    name << "crc-" << n << "-" << k;
    return LinearCode(n, k, std::move(H), std::move(G), name.str());
}

// ---------------------------------------------------------------- BCH codes

namespace {

// Primitive polynomials for GF(2^m), coefficient masks (bit i = x^i).
constexpr std::array<uint32_t, 11> kPrimitivePoly = {
    0,      0,      0x7,    0xB,    0x13,   0x25,
    0x43,   0x89,   0x11D,  0x211,  0x409,
};

struct GF2m {
    unsigned m;
    unsigned size;   // 2^m
    unsigned order;  // 2^m - 1
    std::vector<unsigned> exp_tab, log_tab;

    explicit GF2m(unsigned m_) : m(m_), size(1u << m_), order((1u << m_) - 1) {
        const uint32_t prim = kPrimitivePoly[m];
        exp_tab.assign(2 * order, 0);
        log_tab.assign(size, 0);
        unsigned x = 1;
        for (unsigned i = 0; i < order; ++i) {
            exp_tab[i] = x;
            log_tab[x] = i;
            x <<= 1;
            if (x & size) x ^= prim;
        }
        for (unsigned i = order; i < 2 * order; ++i) exp_tab[i] = exp_tab[i - order];
    }

    unsigned mul(unsigned a, unsigned b) const {
        if (a == 0 || b == 0) return 0;
        return exp_tab[log_tab[a] + log_tab[b]];
    }
    unsigned alpha_pow(unsigned e) const { return exp_tab[e % order]; }
};

// Minimal polynomial over GF(2) of alpha^j: product over the cyclotomic coset.
BinaryPolynomial minimal_polynomial(const GF2m& field, unsigned j) {
    std::vector<unsigned> coset;
    unsigned e = j % field.order;
    do {
        coset.push_back(e);
        e = (2 * e) % field.order;
    } while (e != j % field.order);

    // Polynomial over GF(2^m): start with 1, multiply (x + alpha^e) factors.
    std::vector<unsigned> p{1};
    for (unsigned ee : coset) {
        std::vector<unsigned> q(p.size() + 1, 0);
        unsigned root = field.alpha_pow(ee);
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i + 1] ^= p[i];
            q[i] ^= field.mul(p[i], root);
        }
        p = std::move(q);
    }
    std::vector<uint8_t> bits(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 1) throw std::logic_error("minimal polynomial has non-binary coefficient");
        bits[i] = static_cast<uint8_t>(p[i]);
    }
    return BinaryPolynomial(std::move(bits));
}

}  // namespace

std::tuple<std::size_t, std::size_t, BinaryPolynomial> bch_generator(unsigned m, unsigned t) {
    if (m < 2 || m > 10) throw std::invalid_argument("bch_generator: m must be in [2,10]");
    if (t < 1) throw std::invalid_argument("bch_generator: t must be >= 1");
    GF2m field(m);
    const std::size_t n = field.order;
    if (2 * t >= n) throw std::invalid_argument("bch_generator: t too large for this length");

    std::set<unsigned> seen;  // coset representatives already multiplied in
    BinaryPolynomial g = BinaryPolynomial::from_mask(1);
    for (unsigned j = 1; j <= 2 * t; ++j) {
        unsigned e = j % field.order;
        if (e == 0) continue;
        unsigned rep = e, cur = e;
        do {
            cur = (2 * cur) % field.order;
            rep = std::min(rep, cur);
        } while (cur != e);
        if (!seen.insert(rep).second) continue;
        g = g * minimal_polynomial(field, e);
    }
    const std::size_t deg = static_cast<std::size_t>(g.degree());
    if (deg >= n) throw std::invalid_argument("bch_generator: t too large, k would be <= 0");
    return {n, n - deg, g};
}

// ---------------------------------------------------------------- cyclic codes

LinearCode cyclic_code_from_generator(std::size_t n, const BinaryPolynomial& g) {
    if (g.is_zero() || g.degree() < 1)
        throw std::invalid_argument("cyclic_code: generator must have degree >= 1");
    if (!g.divides(BinaryPolynomial::x_n_plus_1(n)))
        throw std::invalid_argument("cyclic_code: generator does not divide x^n + 1");
    const std::size_t r = static_cast<std::size_t>(g.degree());
    const std::size_t k = n - r;

    // G rows are x^i g(x); bit j of a row is the coefficient of x^j.
    BitMatrix G(k, n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= r; ++j)
            if (g.coeff(j)) G.set(i, i + j, true);

    // Row-reduce a copy to [I_k | P]; the leading k x k block is unit lower
    // triangular (g_0 = 1), so no column permutation is needed.
    BitMatrix R = G;
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        while (piv < k && !R.get(piv, col)) ++piv;
        if (piv == k) throw std::logic_error("cyclic_code: unexpected rank deficiency");
        R.swap_rows(piv, col);
        for (std::size_t i = 0; i < k; ++i)
            if (i != col && R.get(i, col)) R.xor_row_into(col, i);
    }
    BitMatrix H(r, n);
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t i = 0; i < k; ++i) H.set(j, i, R.get(i, k + j));  // P^T
        H.set(j, k + j, true);
    }

    std::ostringstream name;
    name << "cyclic-" << n << "-" << k;
    return LinearCode(n, k, std::move(H), std::move(G), name.str());
}

// ---------------------------------------------------------------- file format

void save_code(const LinearCode& code, std::ostream& out) {
    out << code.n() << " " << code.k() << "\n";
    for (std::size_t r = 0; r < code.H().rows(); ++r)
        out << code.H().row_vec(r).to_string() << "\n";
    if (code.G()) {
        out << "\n";
        for (std::size_t r = 0; r < code.G()->rows(); ++r)
            out << code.G()->row_vec(r).to_string() << "\n";
    }
}

void save_code_file(const LinearCode& code, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("save_code: cannot open " + path);
    save_code(code, f);
}

namespace {
void parse_row(const std::string& line, BitMatrix& m, std::size_t r, std::size_t n) {
    if (line.size() != n)
        throw std::invalid_argument("load_code: row has wrong length");
    for (std::size_t c = 0; c < n; ++c) {
        if (line[c] == '1')
            m.set(r, c, true);
        else if (line[c] != '0')
            throw std::invalid_argument("load_code: row contains non-binary character");
    }
}
}  // namespace

LinearCode load_code(std::istream& in, std::string name) {
    std::size_t n = 0, k = 0;
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("load_code: empty file");
    {
        std::istringstream hs(header);
        if (!(hs >> n >> k)) throw std::invalid_argument("load_code: bad header line");
        std::string extra;
        if (hs >> extra) throw std::invalid_argument("load_code: trailing tokens in header");
    }
    if (n == 0 || k == 0 || k >= n) throw std::invalid_argument("load_code: bad (n,k)");
    BitMatrix H(n - k, n);
    std::string line;
    for (std::size_t r = 0; r < n - k; ++r) {
        if (!std::getline(in, line)) throw std::invalid_argument("load_code: missing H rows");
        parse_row(line, H, r, n);
    }
    std::optional<BitMatrix> G;
    if (std::getline(in, line)) {
        if (!line.empty()) throw std::invalid_argument("load_code: expected blank line before G");
        BitMatrix Gm(k, n);
        for (std::size_t r = 0; r < k; ++r) {
            if (!std::getline(in, line)) throw std::invalid_argument("load_code: missing G rows");
            parse_row(line, Gm, r, n);
        }
        G = std::move(Gm);
    }
    return LinearCode(n, k, std::move(H), std::move(G), std::move(name));
}

LinearCode load_code_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("load_code: cannot open " + path);
    return load_code(f, path);
}

// ---------------------------------------------------------------- builtins

LinearCode builtin_code(const std::string& name) {
    auto starts_with = [&](const char* p) { return name.rfind(p, 0) == 0; };
    if (name == "hamming-7-4")
        return cyclic_code_from_generator(7, BinaryPolynomial::from_mask(0xB));
    if (name == "hamming-15-11")
        return cyclic_code_from_generator(15, BinaryPolynomial::from_mask(0x13));
    if (starts_with("bch-")) {
        std::size_t n = 0, k = 0;
        if (std::sscanf(name.c_str(), "bch-%zu-%zu", &n, &k) != 2)
            throw std::invalid_argument("builtin_code: bad bch name " + name);
        unsigned m = 0;
        while ((std::size_t(1) << (m + 1)) - 1 <= n && m < 11) ++m;
        if ((std::size_t(1) << m) - 1 != n)
            throw std::invalid_argument("builtin_code: bch length must be 2^m - 1");
        for (unsigned t = 1; t < n; ++t) {
            auto [nn, kk, g] = bch_generator(m, t);
            if (kk == k) {
                auto code = cyclic_code_from_generator(nn, g);
                return LinearCode(nn, kk, code.H(), code.G(), name);
            }
            if (kk < k) break;
        }
        throw std::invalid_argument("builtin_code: no BCH code with k=" + std::to_string(k) +
                                    " for n=" + std::to_string(n));
    }
    if (starts_with("crc-")) {
        std::size_t n = 0;
        unsigned long long mask = 0;
        if (std::sscanf(name.c_str(), "crc-%zu-0x%llx", &n, &mask) != 2)
            throw std::invalid_argument("builtin_code: bad crc name " + name);
        auto code = crc_code(n, crc_poly_from_hex(mask));
        return LinearCode(code.n(), code.k(), code.H(), code.G(), name);
    }
    if (starts_with("parity-")) {
        std::size_t n = 0;
        if (std::sscanf(name.c_str(), "parity-%zu", &n) != 1 || n < 2)
            throw std::invalid_argument("builtin_code: bad parity name " + name);
        auto code = crc_code(n, BinaryPolynomial::from_mask(0x3));
        return LinearCode(code.n(), code.k(), code.H(), code.G(), name);
    }
    throw std::invalid_argument("builtin_code: unknown code " + name);
}

}  // namespace grand
