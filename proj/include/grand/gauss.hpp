#ifndef GRAND_GAUSS_HPP
#define GRAND_GAUSS_HPP

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace grand {

/// Numerical failure that still carries the best value reached.
struct NumericalFailure : std::runtime_error {
    double best_value;
    NumericalFailure(const std::string& what, double best)
        : std::runtime_error(what), best_value(best) {}
};

namespace gauss {

double pdf(double z);
double cdf(double z);
/// log Phi(z), stable far into the lower tail.
double log_cdf(double z);
/// log P(lo <= Z < hi) for standard normal Z, stable when the cell sits in a tail.
double log_prob(double zlo, double zhi);
/// Inverse standard normal CDF (Wichura AS 241, double precision).
double quantile(double p);

/// Composite Simpson over [a, b]; npts is forced odd, >= 3.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t npts);

}  // namespace gauss
}  // namespace grand

#endif
