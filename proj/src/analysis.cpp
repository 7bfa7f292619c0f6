#include "grand/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "grand/gauss.hpp"

namespace grand::analysis {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double logaddexp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}
}  // namespace

FoldedGaussianSpec FoldedGaussianSpec::from_sigma(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("FoldedGaussianSpec: sigma must be > 0");
    return {2.0 / (sigma * sigma), 4.0 / (sigma * sigma)};
}

double folded_pdf(const FoldedGaussianSpec& spec, double a) {
    if (a < 0.0) return 0.0;
    double sd = std::sqrt(spec.var);
    return (gauss::pdf((a - spec.mu) / sd) + gauss::pdf((a + spec.mu) / sd)) / sd;
}

double folded_cdf(const FoldedGaussianSpec& spec, double a) {
    if (a <= 0.0) return 0.0;
    double sd = std::sqrt(spec.var);
    return gauss::cdf((a - spec.mu) / sd) - gauss::cdf((-a - spec.mu) / sd);
}

double folded_mean(const FoldedGaussianSpec& spec) {
    double sd = std::sqrt(spec.var);
    double z = spec.mu / sd;
    return spec.mu * (1.0 - 2.0 * gauss::cdf(-z)) + 2.0 * sd * gauss::pdf(z);
}

namespace {

struct LogParts {
    double log_f, log_F, log_1mF;
};

LogParts log_parts(const FoldedGaussianSpec& spec, double a) {
    double sd = std::sqrt(spec.var);
    double z1 = (a - spec.mu) / sd;
    double z2 = (a + spec.mu) / sd;
    LogParts p;
    p.log_f = logaddexp(-0.5 * z1 * z1, -0.5 * z2 * z2) - std::log(sd) - kLogSqrt2Pi;
    p.log_F = a <= 0.0 ? -std::numeric_limits<double>::infinity()
                       : gauss::log_prob(-z2, z1);
    p.log_1mF = logaddexp(gauss::log_cdf(-z1), gauss::log_cdf(-z2));
    return p;
}

double log_comb_factor(std::size_t n, std::size_t r) {
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(r)) -
           std::lgamma(static_cast<double>(n - r + 1));
}

}  // namespace

double order_stat_pdf(const FoldedGaussianSpec& spec, std::size_t n, std::size_t r, double a) {
    if (r < 1 || r > n) throw std::invalid_argument("order_stat_pdf: need 1 <= r <= n");
    if (a < 0.0) return 0.0;
    LogParts p = log_parts(spec, a);
    double lp = log_comb_factor(n, r) + p.log_f;
    if (r > 1) lp += static_cast<double>(r - 1) * p.log_F;
    if (r < n) lp += static_cast<double>(n - r) * p.log_1mF;
    return std::exp(lp);
}

OrderStatCurve order_stat_moments(const FoldedGaussianSpec& spec, std::size_t n,
                                  bool with_variance) {
    if (n < 1) throw std::invalid_argument("order_stat_moments: n must be >= 1");
    OrderStatCurve curve;
    curve.n = n;
    curve.sigma = std::sqrt(2.0 / spec.mu);
    curve.e_l.assign(n, 0.0);
    if (with_variance) curve.var_l.assign(n, 0.0);

    const double sd = std::sqrt(spec.var);
    const double amax = spec.mu + 12.0 * sd;
    const std::size_t npts = 32001;  // Simpson nodes
    const double h = amax / static_cast<double>(npts - 1);

    std::vector<double> logc(n + 1);
    for (std::size_t r = 1; r <= n; ++r) logc[r] = log_comb_factor(n, r);

    std::vector<double> m0(n, 0.0), m1(n, 0.0), m2(n, 0.0);
    for (std::size_t i = 0; i < npts; ++i) {
        double a = h * static_cast<double>(i);
        double w = (i == 0 || i + 1 == npts) ? 1.0 : ((i & 1) ? 4.0 : 2.0);
        LogParts p = log_parts(spec, a);
        for (std::size_t r = 1; r <= n; ++r) {
            double lp = logc[r] + p.log_f;
            if (r > 1) lp += static_cast<double>(r - 1) * p.log_F;
            if (r < n) lp += static_cast<double>(n - r) * p.log_1mF;
            if (lp < -745.0) continue;  // exp underflow
            double d = std::exp(lp) * w;
            m0[r - 1] += d;
            m1[r - 1] += d * a;
            m2[r - 1] += d * a * a;
        }
    }
    const double scale = h / 3.0;
    for (std::size_t r = 0; r < n; ++r) {
        double z = m0[r] * scale;
        if (!(z > 0.999 && z < 1.001))
            throw NumericalFailure("order_stat_moments: integration drifted from unit mass", z);
        double mean = m1[r] * scale / z;
        curve.e_l[r] = mean;
        if (with_variance) curve.var_l[r] = m2[r] * scale / z - mean * mean;
    }
    for (std::size_t r = 1; r < n; ++r)
        if (!(curve.e_l[r] > curve.e_l[r - 1]))
            throw NumericalFailure("order_stat_moments: expectations not increasing",
                                   curve.e_l[r]);
    return curve;
}

// ----------------------------------------------------------------- lambda fit

double PiecewiseLinearFit::eval(double r) const {
    const auto& xs = knot_r;
    const auto& ys = knot_v;
    std::size_t m = xs.size();
    std::size_t j = std::upper_bound(xs.begin(), xs.end(), r) - xs.begin();
    if (j == 0) j = 1;
    if (j >= m) j = m - 1;
    double t = (r - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double PiecewiseLinearFit::inverse(double value) const {
    const auto& xs = knot_r;
    const auto& ys = knot_v;
    std::size_t m = ys.size();
    std::size_t j = std::upper_bound(ys.begin(), ys.end(), value) - ys.begin();
    if (j == 0) j = 1;
    if (j >= m) j = m - 1;
    double t = (value - ys[j - 1]) / (ys[j] - ys[j - 1]);
    return xs[j - 1] + t * (xs[j] - xs[j - 1]);
}

PiecewiseLinearFit fit_lambda(const OrderStatCurve& curve, std::size_t segments) {
    const std::size_t n = curve.n;
    if (segments < 1) throw std::invalid_argument("fit_lambda: need at least one segment");
    if (segments > n - 1) throw std::invalid_argument("fit_lambda: more segments than data");
    const std::size_t nk = segments + 1;

    PiecewiseLinearFit fit;
    fit.knot_r.resize(nk);
    for (std::size_t j = 0; j < nk; ++j)
        fit.knot_r[j] = 1.0 + static_cast<double>(j) * static_cast<double>(n - 1) /
                                  static_cast<double>(segments);

    // Least squares over the tent basis; A is (nk x nk), b the moment vector.
    std::vector<double> A(nk * nk, 0.0), b(nk, 0.0);
    auto basis = [&](std::size_t j, double r) -> double {
        double xc = fit.knot_r[j];
        if (r == xc) return 1.0;
        if (r < xc) {
            if (j == 0) return 0.0;
            double xl = fit.knot_r[j - 1];
            return r <= xl ? 0.0 : (r - xl) / (xc - xl);
        }
        if (j + 1 == nk) return 0.0;
        double xr = fit.knot_r[j + 1];
        return r >= xr ? 0.0 : (xr - r) / (xr - xc);
    };

    for (std::size_t i = 0; i < n; ++i) {
        double r = static_cast<double>(i + 1);
        for (std::size_t j = 0; j < nk; ++j) {
            double pj = basis(j, r);
            if (pj == 0.0) continue;
            b[j] += pj * curve.e_l[i];
            for (std::size_t l = 0; l < nk; ++l) {
                double pl = basis(l, r);
                if (pl != 0.0) A[j * nk + l] += pj * pl;
            }
        }
    }
    // Gaussian elimination with partial pivoting.
    std::vector<double> v(nk);
    {
        std::vector<double> M = A;
        std::vector<double> rhs = b;
        std::vector<std::size_t> perm(nk);
        for (std::size_t i = 0; i < nk; ++i) perm[i] = i;
        for (std::size_t c = 0; c < nk; ++c) {
            std::size_t piv = c;
            for (std::size_t i = c + 1; i < nk; ++i)
                if (std::fabs(M[i * nk + c]) > std::fabs(M[piv * nk + c])) piv = i;
            if (std::fabs(M[piv * nk + c]) < 1e-14)
                throw NumericalFailure("fit_lambda: singular normal equations", 0.0);
            if (piv != c) {
                for (std::size_t l = 0; l < nk; ++l) std::swap(M[piv * nk + l], M[c * nk + l]);
                std::swap(rhs[piv], rhs[c]);
            }
            for (std::size_t i = c + 1; i < nk; ++i) {
                double f = M[i * nk + c] / M[c * nk + c];
                if (f == 0.0) continue;
                for (std::size_t l = c; l < nk; ++l) M[i * nk + l] -= f * M[c * nk + l];
                rhs[i] -= f * rhs[c];
            }
        }
        for (std::size_t i = nk; i-- > 0;) {
            double acc = rhs[i];
            for (std::size_t l = i + 1; l < nk; ++l) acc -= M[i * nk + l] * v[l];
            v[i] = acc / M[i * nk + i];
        }
    }

    // Monotone projection (pool adjacent violators), then strictify.
    {
        std::vector<double> val;
        std::vector<double> wgt;
        for (double x : v) {
            val.push_back(x);
            wgt.push_back(1.0);
            while (val.size() > 1 && val[val.size() - 2] > val.back()) {
                double w = wgt[wgt.size() - 2] + wgt.back();
                double m = (val[val.size() - 2] * wgt[wgt.size() - 2] + val.back() * wgt.back()) / w;
                val.pop_back();
                wgt.pop_back();
                val.back() = m;
                wgt.back() = w;
            }
        }
        std::size_t idx = 0;
        for (std::size_t blk = 0; blk < val.size(); ++blk)
            for (std::size_t c = 0; c < static_cast<std::size_t>(wgt[blk]); ++c) v[idx++] = val[blk];
        for (std::size_t j = 1; j < nk; ++j)
            if (v[j] <= v[j - 1]) v[j] = v[j - 1] + 1e-9 * std::max(1.0, std::fabs(v[j - 1]));
    }
    fit.knot_v = std::move(v);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = fit.eval(static_cast<double>(i + 1)) - curve.e_l[i];
        ss += d * d;
    }
    fit.residual = ss;
    return fit;
}

std::function<double(double)> nu_metric(const PiecewiseLinearFit& fit, double sigma) {
    for (std::size_t j = 1; j < fit.knot_v.size(); ++j)
        if (!(fit.knot_v[j] > fit.knot_v[j - 1]))
            throw std::invalid_argument("nu_metric: fit is not invertible");
    double scale = 2.0 / (sigma * sigma);
    return [fit, scale](double y) {
        double r = fit.inverse(scale * std::fabs(y));
        return y < 0.0 ? -r : r;
    };
}

// ---------------------------------------------------------- score distribution

double ScoreDistribution::mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < pmf.size(); ++j) m += static_cast<double>(j) * step * pmf[j];
    return m;
}

double ScoreDistribution::tail(double s) const {
    double t = mass_lost;
    for (std::size_t j = pmf.size(); j-- > 0;) {
        if (static_cast<double>(j) * step > s)
            t += pmf[j];
        else
            break;
    }
    return t;
}

namespace {

// One-step truncated convolution of mass vectors.
std::vector<double> conv_trunc(const std::vector<double>& a, const std::vector<double>& b,
                               std::size_t cap, double& lost) {
    std::vector<double> out(std::min(a.size() + b.size() - 1, cap + 1), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0.0) continue;
            std::size_t k = i + j;
            if (k <= cap)
                out[k] += a[i] * b[j];
            else
                lost += a[i] * b[j];
        }
    }
    return out;
}

}  // namespace

ScoreDistribution true_score_distribution(double sigma, std::size_t n,
                                          const ReliabilityQuantizer* quant, std::size_t cap) {
    if (n < 1) throw std::invalid_argument("true_score_distribution: n must be >= 1");
    const double mu = 2.0 / (sigma * sigma);
    const double sd = 2.0 / sigma;

    ScoreDistribution dist;
    std::vector<double> atom;  // per-bit mass vector on the binned support

    if (quant) {
        dist.discrete = true;
        dist.step = 1.0;
        uint32_t wmax = quant->weights.back();
        atom.assign(wmax + 1, 0.0);
        // Correct bit: score 0. Erroneous bit with |LLR| in cell i: score w_i.
        atom[0] = gauss::cdf(1.0 / sigma);
        for (std::size_t i = 0; i < quant->levels(); ++i) {
            double lo = i == 0 ? 0.0 : quant->boundaries[i - 1];
            double hi = i + 1 == quant->levels() ? std::numeric_limits<double>::infinity()
                                                 : quant->boundaries[i];
            double p = std::exp(gauss::log_prob((-hi - mu) / sd, (-lo - mu) / sd));
            atom[quant->weights[i]] += p;
        }
    } else {
        dist.discrete = false;
        dist.step = mu / 200.0;
        const double amax = mu + 10.0 * sd;
        const std::size_t bins = static_cast<std::size_t>(std::ceil(amax / dist.step)) + 1;
        atom.assign(bins, 0.0);
        atom[0] = gauss::cdf(1.0 / sigma);
        // Centered bins: bin j holds the error mass with |llr| near j*step, so
        // repeated convolution stays free of a half-step drift.
        for (std::size_t j = 0; j < bins; ++j) {
            double lo = std::max(0.0, (static_cast<double>(j) - 0.5) * dist.step);
            double hi = (static_cast<double>(j) + 0.5) * dist.step;
            atom[j] += std::exp(gauss::log_prob((-hi - mu) / sd, (-lo - mu) / sd));
        }
    }

    // Default cap: doubled Gaussian estimate of the 1 - 1e-12 quantile.
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < atom.size(); ++j) {
        m1 += static_cast<double>(j) * atom[j];
        m2 += static_cast<double>(j) * static_cast<double>(j) * atom[j];
    }
    double nm = static_cast<double>(n) * m1;
    double nv = static_cast<double>(n) * (m2 - m1 * m1);
    if (cap == 0) {
        cap = static_cast<std::size_t>(std::ceil(nm + 7.0341 * std::sqrt(std::max(nv, 1.0)))) * 2;
        cap = std::max(cap, atom.size() * 2);
    }

    double lost = 0.0;
    std::vector<double> acc{1.0};
    std::vector<double> base = atom;
    std::size_t e = n;
    while (e > 0) {  // n-th convolution power by squaring
        if (e & 1) acc = conv_trunc(acc, base, cap, lost);
        e >>= 1;
        if (e) base = conv_trunc(base, base, cap, lost);
    }
    dist.pmf = std::move(acc);
    dist.mass_lost = lost;
    // lost accumulated inside base^2 powers over-counts only mass that could
    // never return below the cap, so it remains a valid truncation bound.
    if (dist.mass_lost > 1e-6)
        throw NumericalFailure("true_score_distribution: cap too small, increase it",
                               dist.mass_lost);
    return dist;
}

double select_smax(const ScoreDistribution& dist, double target_tail) {
    if (!(target_tail > 0.0 && target_tail <= 1.0))
        throw std::invalid_argument("select_smax: target_tail must be in (0,1]");
    // Suffix tail at bin edges; smallest s with P(S > s) <= target.
    double t = dist.mass_lost;
    std::vector<double> tails(dist.pmf.size() + 1);
    tails[dist.pmf.size()] = t;
    for (std::size_t j = dist.pmf.size(); j-- > 0;) tails[j] = tails[j + 1] + dist.pmf[j];
    // tails[j] = P(S >= j*step) + lost; P(S > s = j*step) = tails[j+1].
    for (std::size_t j = 0; j < tails.size() - 1; ++j)
        if (tails[j + 1] <= target_tail) return static_cast<double>(j) * dist.step;
    throw NumericalFailure("select_smax: target tail unreachable within the cap",
                           dist.mass_lost);
}

void write_order_stat_csv(std::ostream& out, const OrderStatCurve& curve) {
    out << "r,e_l,var_l\n";
    for (std::size_t r = 0; r < curve.n; ++r) {
        out << (r + 1) << "," << curve.e_l[r] << ",";
        if (!curve.var_l.empty()) out << curve.var_l[r];
        out << "\n";
    }
}

void write_score_csv(std::ostream& out, const ScoreDistribution& dist) {
    out << "s,pmf,tail\n";
    double t = 1.0;
    for (std::size_t j = 0; j < dist.pmf.size(); ++j) {
        t -= dist.pmf[j];
        out << static_cast<double>(j) * dist.step << "," << dist.pmf[j] << ","
            << std::max(t, 0.0) << "\n";
    }
}

}  // namespace grand::analysis
