#include "grand/gauss.hpp"

#include <cmath>
#include <limits>

namespace grand::gauss {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_cdf(double z) {
    if (z > -1.0) {
        double c = cdf(z);
        return std::log(c);
    }
    // Lower tail: erfcl keeps precision down to z ~ -150, far below double's
    // exp underflow once the result is re-expressed as a log.
    long double arg = -static_cast<long double>(z) * kInvSqrt2;
    long double e = erfcl(arg);
    if (e > 0.0L) return static_cast<double>(logl(0.5L * e));
    // Asymptotic expansion log Phi(z) ~ -z^2/2 - log(-z) - log(sqrt(2 pi)) + log(1 - 1/z^2 + ...)
    double z2 = z * z;
    double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2);
    return -0.5 * z2 - std::log(-z) - 0.91893853320467274178 + std::log(series);
}

double log_prob(double zlo, double zhi) {
    if (!(zlo < zhi)) return -std::numeric_limits<double>::infinity();
    if (zlo >= 0.0) {
        // Upper-tail cell: P = Phi(-zlo) - Phi(-zhi).
        double la = log_cdf(-zlo);
        double lb = log_cdf(-zhi);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (zhi <= 0.0) {
        double la = log_cdf(zhi);
        double lb = log_cdf(zlo);
        return la + std::log1p(-std::exp(lb - la));
    }
    // Straddles zero; no cancellation issue.
    return std::log(cdf(zhi) - cdf(zlo));
}

// AS 241 algorithm PPND16.
double quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gauss::quantile: p outside (0,1)");
    double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                  3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t npts) {
    if (npts < 3) npts = 3;
    if (npts % 2 == 0) ++npts;
    const std::size_t intervals = npts - 1;
    const double h = (b - a) / static_cast<double>(intervals);
    double acc = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i) {
        double x = a + h * static_cast<double>(i);
        acc += f(x) * ((i & 1) ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

}  // namespace grand::gauss
