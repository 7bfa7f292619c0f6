#include "grand/rates.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "grand/analysis.hpp"
#include "grand/gauss.hpp"

namespace grand::rates {

namespace {

constexpr double kLog2E = 1.4426950408889634074;
constexpr double kLn2 = 0.69314718055994530942;

double softplus(double t) {  // log(1 + e^{-t}) for the capacity integrand
    if (t > 0.0) return std::log1p(std::exp(-t));
    return -t + std::log1p(std::exp(t));
}

double logaddexp(double a, double b) {
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// Cell probabilities of tau(Y) under C=0 for the 2Q-ary quantized channel:
// index i < Q holds the positive cell [b_{i-1}, b_i), index Q+i its mirror.
std::vector<double> cell_probs(double sigma, std::span<const double> boundaries) {
    const double mu = 2.0 / (sigma * sigma);
    const double sd = 2.0 / sigma;
    const std::size_t Q = boundaries.size() + 1;
    std::vector<double> p(2 * Q);
    for (std::size_t i = 0; i < Q; ++i) {
        double lo = i == 0 ? 0.0 : boundaries[i - 1];
        double hi = i + 1 == Q ? std::numeric_limits<double>::infinity() : boundaries[i];
        p[i] = std::exp(gauss::log_prob((lo - mu) / sd, (hi - mu) / sd));
        p[Q + i] = std::exp(gauss::log_prob((-hi - mu) / sd, (-lo - mu) / sd));
    }
    return p;
}

}  // namespace

double bpsk_capacity(double sigma, std::size_t npts) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bpsk_capacity: sigma must be > 0");
    const double lo = -1.0 - 8.0 * sigma, hi = 1.0 + 8.0 * sigma;
    const double inv_s = 1.0 / sigma;
    auto f = [&](double y) {
        double pdf = gauss::pdf((y - 1.0) * inv_s) * inv_s;
        return pdf * softplus(2.0 * y / (sigma * sigma));
    };
    double loss = gauss::simpson(f, lo, hi, npts < 2001 ? 2001 : npts);
    return 1.0 - loss * kLog2E;
}

double quantized_mi(double sigma, std::span<const double> boundaries) {
    auto p0 = cell_probs(sigma, boundaries);
    const std::size_t Q = boundaries.size() + 1;
    double mi = 0.0;
    for (std::size_t z = 0; z < 2 * Q; ++z) {
        // Symmetry: P(z | C=1) mirrors the sign half.
        double a = p0[z];
        double b = p0[z < Q ? Q + z : z - Q];
        double avg = 0.5 * (a + b);
        if (a > 0.0) mi += 0.5 * a * std::log2(a / avg);
        if (b > 0.0) mi += 0.5 * b * std::log2(b / avg);
    }
    return mi;
}

double quantized_mi(double sigma, const ReliabilityQuantizer& quant) {
    return quantized_mi(sigma, quant.boundaries);
}

LmMetric LmMetric::identity_llr(double sigma) {
    LmMetric m;
    m.discrete = false;
    double scale = 2.0 / (sigma * sigma);
    m.eval = [scale](double y) { return scale * y; };
    return m;
}

LmMetric LmMetric::quantized(double sigma, std::span<const double> boundaries,
                             std::span<const double> values) {
    if (values.size() != boundaries.size() + 1)
        throw std::invalid_argument("LmMetric::quantized: need one value per cell");
    auto p = cell_probs(sigma, boundaries);
    const std::size_t Q = values.size();
    LmMetric m;
    m.discrete = true;
    m.atoms.reserve(2 * Q);
    for (std::size_t i = 0; i < Q; ++i) {
        m.atoms.push_back({values[i], p[i]});
        m.atoms.push_back({-values[i], p[Q + i]});
    }
    return m;
}

LmMetric LmMetric::quantized(double sigma, const ReliabilityQuantizer& quant, bool rounded) {
    std::vector<double> vals(quant.levels());
    for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = rounded ? static_cast<double>(quant.weights[i]) : quant.outputs[i];
    return quantized(sigma, quant.boundaries, vals);
}

LmMetric LmMetric::continuous(std::function<double(double)> m) {
    LmMetric r;
    r.discrete = false;
    r.eval = std::move(m);
    return r;
}

namespace {

// LM objective at metric scaling s and log-ratio u = log r(1)/r(0), in bits.
// Uses channel symmetry: the C=1 expectation is the C=0 one with M negated.
class LmObjective {
public:
    LmObjective(double sigma, const LmMetric& metric, std::size_t npts)
        : sigma_(sigma), metric_(&metric), npts_(npts) {
        if (!metric.discrete) {
            // Precompute metric values and Gaussian weights on the Simpson grid.
            double lo = -1.0 - 8.0 * sigma, hi = 1.0 + 8.0 * sigma;
            std::size_t n = npts_ < 2001 ? 2001 : npts_;
            if (n % 2 == 0) ++n;
            grid_m_.resize(n);
            grid_w_.resize(n);
            double h = (hi - lo) / static_cast<double>(n - 1);
            double inv_s = 1.0 / sigma;
            for (std::size_t i = 0; i < n; ++i) {
                double y = lo + h * static_cast<double>(i);
                grid_m_[i] = metric.eval(y);
                double simpson_c = (i == 0 || i + 1 == n) ? 1.0 : ((i & 1) ? 4.0 : 2.0);
                grid_w_[i] = gauss::pdf((y - 1.0) * inv_s) * inv_s * simpson_c * h / 3.0;
            }
            // Odd symmetry spot check (the analysis metrics are odd by
            // construction; a stray even metric would silently break the
            // symmetry reduction below).
            for (double y : {0.31 + sigma, 1.7 * sigma, 2.9}) {
                if (std::fabs(metric.eval(y) + metric.eval(-y)) > 1e-6 * (1.0 + std::fabs(metric.eval(y))))
                    throw std::invalid_argument("lm_rate: metric is not odd-symmetric");
            }
        }
    }

    double operator()(double s, double u) const {
        double acc = 0.0;
        if (metric_->discrete) {
            for (const auto& atom : metric_->atoms) {
                if (atom.prob <= 0.0) continue;
                acc += atom.prob * combined(s, u, atom.value);
            }
        } else {
            for (std::size_t i = 0; i < grid_m_.size(); ++i)
                acc += grid_w_[i] * combined(s, u, grid_m_[i]);
        }
        return 0.5 * acc / kLn2;  // bits
    }

private:
    // g_0(m) + g_1(-m), both in nats.
    static double combined(double s, double u, double m) {
        double a = s * m;
        double d_pos = logaddexp(a, u - a);    // denom at metric value m
        double d_neg = logaddexp(-a, u + a);   // denom at metric value -m
        double g0 = kLn2 + a - d_pos;
        double g1 = kLn2 + a + u - d_neg;      // (1-2c)=-1 at value -m gives +a
        return g0 + g1;
    }

    double sigma_;
    const LmMetric* metric_;
    std::size_t npts_;
    std::vector<double> grid_m_, grid_w_;
};

}  // namespace

LmResult lm_rate(double sigma, const LmMetric& metric, std::size_t npts) {
    if (!(sigma > 0.0)) throw std::invalid_argument("lm_rate: sigma must be > 0");
    LmObjective obj(sigma, metric, npts);

    // Coarse 41x41 grid seeds the local search away from the s -> 0 plateau.
    double best_s = 0.5, best_u = 0.0, best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
        double s = 0.05 + (5.0 - 0.05) * i / 40.0;
        for (int j = 0; j <= 40; ++j) {
            double u = -2.0 + 4.0 * j / 40.0;
            double v = obj(s, u);
            if (v > best) {
                best = v;
                best_s = s;
                best_u = u;
            }
        }
    }

    // Pattern search refinement.
    double step_s = (5.0 - 0.05) / 40.0, step_u = 4.0 / 40.0;
    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
        bool improved = false;
        const double cand[4][2] = {{best_s + step_s, best_u}, {best_s - step_s, best_u},
                                   {best_s, best_u + step_u}, {best_s, best_u - step_u}};
        for (auto& c : cand) {
            double s = std::max(c[0], 1e-6);
            double v = obj(s, c[1]);
            if (v > best + 1e-15) {
                best = v;
                best_s = s;
                best_u = c[1];
                improved = true;
            }
        }
        if (!improved) {
            step_s *= 0.5;
            step_u *= 0.5;
            if (step_s < 1e-7 && step_u < 1e-7) {
                converged = true;
                break;
            }
        }
    }
    if (!converged) throw NumericalFailure("lm_rate: refinement did not converge", best);
    return {best, best_s, best_u};
}

double capacity_inverse(double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw std::invalid_argument("capacity_inverse: rate must be in (0,1)");
    double lo = -40.0, hi = 40.0;
    auto cap_at = [](double es_db) { return bpsk_capacity(std::pow(10.0, -es_db / 20.0)); };
    if (cap_at(lo) > rate || cap_at(hi) < rate)
        throw NumericalFailure("capacity_inverse: rate outside bracketed range", rate);
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        (cap_at(mid) < rate ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double orbgrand_loss(double sigma, std::size_t n) {
    if (n < 2) throw std::invalid_argument("orbgrand_loss: n must be >= 2");
    auto spec = analysis::FoldedGaussianSpec::from_sigma(sigma);
    auto curve = analysis::order_stat_moments(spec, n, false);
    auto fit = analysis::fit_lambda(curve, n - 1);  // exact interpolation
    auto metric = LmMetric::continuous(analysis::nu_metric(fit, sigma));
    double r_lm = lm_rate(sigma, metric).rate;
    double es_db = -20.0 * std::log10(sigma);
    return es_db - capacity_inverse(r_lm);
}

}  // namespace grand::rates
