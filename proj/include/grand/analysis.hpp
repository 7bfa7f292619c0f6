#ifndef GRAND_ANALYSIS_HPP
#define GRAND_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "grand/quantizer.hpp"

namespace grand::analysis {

/// Parameters of the folded Gaussian reliability law |N(2/sigma^2, 4/sigma^2)|.
struct FoldedGaussianSpec {
    double mu;   // 2/sigma^2
    double var;  // 4/sigma^2

    static FoldedGaussianSpec from_sigma(double sigma);
};

double folded_pdf(const FoldedGaussianSpec& spec, double a);
double folded_cdf(const FoldedGaussianSpec& spec, double a);
double folded_mean(const FoldedGaussianSpec& spec);

/// Density of the r-th order statistic of n i.i.d. folded-Gaussian samples,
/// evaluated in the log domain to survive n = 128 combinatorics.
double order_stat_pdf(const FoldedGaussianSpec& spec, std::size_t n, std::size_t r, double a);

struct OrderStatCurve {
    std::size_t n = 0;
    double sigma = 0.0;
    std::vector<double> e_l;    // E[L_(r)], r = 1..n
    std::vector<double> var_l;  // empty unless requested
};

OrderStatCurve order_stat_moments(const FoldedGaussianSpec& spec, std::size_t n,
                                  bool with_variance = true);

/// Continuous piecewise-linear least-squares fit of E[L_(r)] with knots evenly
/// spaced in r; monotone by projection.
struct PiecewiseLinearFit {
    std::vector<double> knot_r;  // ascending, spanning [1, n]
    std::vector<double> knot_v;  // strictly increasing
    double residual = 0.0;       // sum of squared residuals at the data points

    double eval(double r) const;
    /// Inverse by segment; extrapolates with the first/last segment slope.
    double inverse(double value) const;
};

PiecewiseLinearFit fit_lambda(const OrderStatCurve& curve, std::size_t segments);

/// nu(y) = sign(y) * lambda^{-1}(2|y|/sigma^2); odd-symmetric by construction.
std::function<double(double)> nu_metric(const PiecewiseLinearFit& fit, double sigma);

/// Distribution of the score of the true noise effect: atom at 0 for correct
/// bits plus the |LLR| mass of erroneous bits, convolved to the n-th power.
struct ScoreDistribution {
    bool discrete = true;    // integer support (quantized weights)
    double step = 1.0;       // bin width; 1 for the discrete case
    std::vector<double> pmf; // pmf[j] = P(S in bin j)
    double mass_lost = 0.0;  // probability truncated beyond the cap

    double mean() const;
    /// P(S > s).
    double tail(double s) const;
};

ScoreDistribution true_score_distribution(double sigma, std::size_t n,
                                          const ReliabilityQuantizer* quant,
                                          std::size_t cap = 0);

/// Smallest s with P(S > s) <= target_tail.
double select_smax(const ScoreDistribution& dist, double target_tail);

void write_order_stat_csv(std::ostream& out, const OrderStatCurve& curve);
void write_score_csv(std::ostream& out, const ScoreDistribution& dist);

}  // namespace grand::analysis

#endif
