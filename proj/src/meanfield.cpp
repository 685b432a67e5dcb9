#include "isingpl/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include "isingpl/errors.hpp"

namespace ising {

namespace {

double clamped_atanh(double y) {
    const double lim = 1.0 - 1e-12;
    return std::atanh(std::clamp(y, -lim, lim));
}

}  // namespace

double entropy(double y) {
    y = std::clamp(y, -1.0, 1.0);
    auto term = [](double u) { return u > 0 ? u * std::log(u) : 0.0; };
    return term((1.0 + y) / 2.0) + term((1.0 - y) / 2.0);
}

double phi(double beta, double theta, double b_field, double y) {
    return 0.5 * beta * theta * y * y + b_field * y - entropy(y);
}

ScalarVariational magnetization_root(double beta, double theta, double b_field) {
    if (beta < 0) throw ConfigError("magnetization_root: beta must be >= 0");
    if (theta <= 0) throw ConfigError("magnetization_root: theta must be positive");

    auto g = [&](double m) { return std::tanh(beta * theta * m + b_field) - m; };

    const double lo = -1.0 + 1e-9, hi = 1.0 - 1e-9;
    const int grid = 2000;

    std::vector<double> roots;
    double prev_m = lo, prev_g = g(lo);
    for (int k = 1; k <= grid; ++k) {
        const double m = lo + (hi - lo) * k / grid;
        const double gm = g(m);
        if (prev_g == 0.0) roots.push_back(prev_m);
        if (prev_g * gm < 0) {
            double a = prev_m, b = m;
            for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
                const double mid = 0.5 * (a + b);
                if (g(a) * g(mid) <= 0)
                    b = mid;
                else
                    a = mid;
            }
            double r = 0.5 * (a + b);
            // Newton polish on the stationarity form h(m) = btm + B - atanh(m),
            // whose residual the contract bounds; h' = bt - 1/(1-m^2) is
            // nonzero at every simple root.
            const double lim = std::nextafter(1.0, 0.0);
            for (int it = 0; it < 40; ++it) {
                const double hm = beta * theta * r + b_field - std::atanh(r);
                const double hp = beta * theta - 1.0 / (1.0 - r * r);
                if (hm == 0 || hp == 0 || !std::isfinite(hp)) break;
                const double next = std::clamp(r - hm / hp, -lim, lim);
                if (next == r) break;
                r = next;
            }
            roots.push_back(r);
        }
        prev_m = m;
        prev_g = gm;
    }
    if (g(hi) == 0.0) roots.push_back(hi);
    if (roots.empty()) roots.push_back(std::tanh(b_field));  // beta*theta = 0 edge

    ScalarVariational out;
    out.beta = beta;
    out.theta = theta;
    out.b_field = b_field;
    out.m0 = roots.front();
    out.phi_at_m0 = phi(beta, theta, b_field, out.m0);
    for (std::size_t k = 1; k < roots.size(); ++k) {
        const double v = phi(beta, theta, b_field, roots[k]);
        const bool better = v > out.phi_at_m0 + 1e-12;
        const bool tie = std::fabs(v - out.phi_at_m0) <= 1e-12;
        // ties (B ~ 0, supercritical) broken toward the root matching sign(B)
        if (better || (tie && b_field != 0 &&
                       std::signbit(roots[k]) == std::signbit(b_field) &&
                       std::signbit(out.m0) != std::signbit(b_field))) {
            out.m0 = roots[k];
            out.phi_at_m0 = v;
        }
    }
    return out;
}

std::vector<IsingParams> param_curve(double m, const std::vector<double>& beta_values) {
    if (!(std::fabs(m) < 1)) throw ConfigError("param_curve: |m| must be < 1");
    const double am = std::atanh(m);
    std::vector<IsingParams> out;
    out.reserve(beta_values.size());
    for (double beta : beta_values) out.push_back({beta, am - m * beta});
    return out;
}

double regularity_residual(const CouplingMatrix& A, const IsingParams& p,
                           const SpinConfig& x) {
    std::vector<double> b = b_field_vector(A, p, x);
    const int n = A.n();
    // beta * A b + B 1 - atanh(b), coordinatewise
    std::vector<double> v(n, p.b_field);
    for (const auto& e : A.entries()) {
        v[e.i] += p.beta * e.w * b[e.j];
        v[e.j] += p.beta * e.w * b[e.i];
    }
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double d = v[i] - clamped_atanh(b[i]);
        ss += d * d;
    }
    return std::sqrt(ss / n);
}

}  // namespace ising
