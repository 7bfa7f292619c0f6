#include "grand/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "grand/gauss.hpp"
#include "grand/rates.hpp"

namespace grand {

QuantizerFlavor quantizer_flavor_from_string(const std::string& s) {
    if (s == "heuristic") return QuantizerFlavor::heuristic;
    if (s == "uniform") return QuantizerFlavor::uniform;
    if (s == "nonuniform") return QuantizerFlavor::nonuniform;
    throw std::invalid_argument("unknown quantizer flavor: " + s);
}

std::string to_string(QuantizerFlavor f) {
    switch (f) {
        case QuantizerFlavor::heuristic: return "heuristic";
        case QuantizerFlavor::uniform: return "uniform";
        case QuantizerFlavor::nonuniform: return "nonuniform";
    }
    return "?";
}

bool ReliabilityQuantizer::has_weight_collapse() const {
    for (std::size_t i = 1; i < weights.size(); ++i)
        if (weights[i] == weights[i - 1]) return true;
    return false;
}

QuantizeResult quantize_reliability(const ReliabilityQuantizer& quant, double rel) {
    if (!(rel >= 0.0)) throw std::invalid_argument("quantize_reliability: rel must be >= 0");
    // Half-open cells [b_{i-1}, b_i): rel == b_i lands in cell i+1.
    std::size_t i = std::upper_bound(quant.boundaries.begin(), quant.boundaries.end(), rel) -
                    quant.boundaries.begin();
    return {i + 1, quant.weights[i]};
}

std::vector<double> optimal_outputs(double sigma, std::span<const double> boundaries) {
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (!(boundaries[i] > 0.0) || (i > 0 && !(boundaries[i] > boundaries[i - 1])))
            throw std::invalid_argument("optimal_outputs: boundaries must be positive increasing");
    }
    const double mu = 2.0 / (sigma * sigma);
    const double sd = 2.0 / sigma;
    const std::size_t Q = boundaries.size() + 1;
    std::vector<double> v(Q);
    for (std::size_t i = 0; i < Q; ++i) {
        double lo = i == 0 ? 0.0 : boundaries[i - 1];
        double hi = i + 1 == Q ? std::numeric_limits<double>::infinity() : boundaries[i];
        // Cell mass of tau(Y)|C=0 ~ N(mu, sd^2) and tau(Y)|C=1 ~ N(-mu, sd^2).
        double lp0 = gauss::log_prob((lo - mu) / sd, (hi - mu) / sd);
        double lp1 = gauss::log_prob((lo + mu) / sd, (hi + mu) / sd);
        if (!std::isfinite(lp0) || !std::isfinite(lp1))
            throw NumericalFailure("optimal_outputs: empty cell, shrink the boundaries",
                                   i > 0 ? v[i - 1] : 0.0);
        v[i] = lp0 - lp1;
    }
    for (std::size_t i = 1; i < Q; ++i)
        if (!(v[i] > v[i - 1]))
            throw NumericalFailure("optimal_outputs: outputs not strictly increasing", v[i]);
    if (!(v[0] > 0.0))
        throw NumericalFailure("optimal_outputs: first output not positive", v[0]);
    return v;
}

std::vector<uint32_t> integer_weights(std::span<const double> outputs) {
    if (outputs.empty() || !(outputs[0] > 0.0))
        throw std::invalid_argument("integer_weights: outputs must be positive increasing");
    std::vector<uint32_t> w(outputs.size());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        double r = std::round(outputs[i] / outputs[0]);
        w[i] = static_cast<uint32_t>(std::max(1.0, r));
    }
    return w;
}

namespace {

ReliabilityQuantizer finish_design(double sigma, int q, std::vector<double> boundaries) {
    ReliabilityQuantizer quant;
    quant.q = q;
    quant.sigma_design = sigma;
    quant.outputs = optimal_outputs(sigma, boundaries);
    quant.weights = integer_weights(quant.outputs);
    quant.boundaries = std::move(boundaries);
    return quant;
}

// Golden-section maximization of f on [lo, hi] to tolerance tol on x.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

ReliabilityQuantizer heuristic_quantizer(double sigma, int q) {
    if (q < 1) throw std::invalid_argument("heuristic_quantizer: q must be >= 1");
    if (sigma >= 2.0)
        throw std::invalid_argument("heuristic_quantizer: sigma >= 2 makes the step nonpositive");
    const std::size_t Q = std::size_t(1) << q;
    const double beta = (2.0 / (sigma * sigma)) * (1.0 - sigma / 2.0) / static_cast<double>(Q);
    std::vector<double> b(Q - 1);
    for (std::size_t i = 0; i < Q - 1; ++i) b[i] = static_cast<double>(i + 1) * beta;
    return finish_design(sigma, q, std::move(b));
}

ReliabilityQuantizer optimize_uniform(double sigma, int q) {
    if (q < 1) throw std::invalid_argument("optimize_uniform: q must be >= 1");
    const std::size_t Q = std::size_t(1) << q;
    auto mi_of_beta = [&](double beta) {
        std::vector<double> b(Q - 1);
        for (std::size_t i = 0; i < Q - 1; ++i) b[i] = static_cast<double>(i + 1) * beta;
        return rates::quantized_mi(sigma, b);
    };
    const double hi = 6.0 / (sigma * sigma);
    double beta = golden_max(mi_of_beta, 1e-6, hi, 1e-5);
    std::vector<double> b(Q - 1);
    for (std::size_t i = 0; i < Q - 1; ++i) b[i] = static_cast<double>(i + 1) * beta;
    return finish_design(sigma, q, std::move(b));
}

ReliabilityQuantizer optimize_nonuniform(double sigma, int q) {
    ReliabilityQuantizer uni = optimize_uniform(sigma, q);
    std::vector<double> b = uni.boundaries;
    const std::size_t nb = b.size();
    if (nb == 1) return uni;  // same search space as the uniform design

    double best = rates::quantized_mi(sigma, b);
    const double span_hi = 12.0 / (sigma * sigma);
    for (int sweep = 0; sweep < 200; ++sweep) {
        double before = best;
        for (std::size_t i = 0; i < nb; ++i) {
            double lo = (i == 0 ? 0.0 : b[i - 1]) + 1e-9;
            double hi = (i + 1 < nb ? b[i + 1] : std::max(span_hi, b[nb - 1] * 3.0)) - 1e-9;
            auto mi_of = [&](double x) {
                double keep = b[i];
                b[i] = x;
                double mi = rates::quantized_mi(sigma, b);
                b[i] = keep;
                return mi;
            };
            double x = golden_max(mi_of, lo, hi, 1e-7);
            if (mi_of(x) >= best) {
                b[i] = x;
                best = rates::quantized_mi(sigma, b);
            }
        }
        if (best - before < 1e-9) break;
    }
    return finish_design(sigma, q, std::move(b));
}

// ------------------------------------------------------------- persistence

void save_quantizer(const ReliabilityQuantizer& quant, std::ostream& out) {
    out << std::setprecision(6) << quant.q << " " << quant.sigma_design << "\n";
    for (std::size_t i = 0; i < quant.boundaries.size(); ++i)
        out << (i ? " " : "") << quant.boundaries[i];
    out << "\n";
    for (std::size_t i = 0; i < quant.outputs.size(); ++i)
        out << (i ? " " : "") << quant.outputs[i];
    out << "\n";
    for (std::size_t i = 0; i < quant.weights.size(); ++i)
        out << (i ? " " : "") << quant.weights[i];
    out << "\n";
}

ReliabilityQuantizer load_quantizer(std::istream& in) {
    ReliabilityQuantizer quant;
    if (!(in >> quant.q >> quant.sigma_design))
        throw std::invalid_argument("load_quantizer: bad header");
    const std::size_t Q = std::size_t(1) << quant.q;
    quant.boundaries.resize(Q - 1);
    quant.outputs.resize(Q);
    quant.weights.resize(Q);
    for (auto& x : quant.boundaries)
        if (!(in >> x)) throw std::invalid_argument("load_quantizer: bad boundaries");
    for (auto& x : quant.outputs)
        if (!(in >> x)) throw std::invalid_argument("load_quantizer: bad outputs");
    for (auto& x : quant.weights)
        if (!(in >> x)) throw std::invalid_argument("load_quantizer: bad weights");
    return quant;
}

ReliabilityQuantizer design_quantizer(QuantizerFlavor flavor, double sigma, int q,
                                      const std::string& cache_path) {
    std::ostringstream keys;
    keys << to_string(flavor) << " " << q << " " << std::llround(sigma * 1e6);
    const std::string key = keys.str();

    if (!cache_path.empty()) {
        std::ifstream f(cache_path);
        std::string line;
        while (f && std::getline(f, line)) {
            if (line != key) continue;
            std::string blob;
            for (int i = 0; i < 4 && std::getline(f, line); ++i) blob += line + "\n";
            std::istringstream is(blob);
            return load_quantizer(is);
        }
    }

    ReliabilityQuantizer quant;
    switch (flavor) {
        case QuantizerFlavor::heuristic: quant = heuristic_quantizer(sigma, q); break;
        case QuantizerFlavor::uniform: quant = optimize_uniform(sigma, q); break;
        case QuantizerFlavor::nonuniform: quant = optimize_nonuniform(sigma, q); break;
    }
    if (!cache_path.empty()) {
        std::ofstream f(cache_path, std::ios::app);
        if (f) {
            f << key << "\n";
            save_quantizer(quant, f);
        }
    }
    return quant;
}

}  // namespace grand
