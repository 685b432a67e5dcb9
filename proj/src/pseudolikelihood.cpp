#include "isingpl/pseudolikelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isingpl/errors.hpp"
#include "vendor_json.hpp"

namespace ising {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_cosh(double z) {
    z = std::fabs(z);
    return z - std::log(2.0) + std::log1p(std::exp(-2.0 * z));
}

double sech2(double z) {
    const double c = std::cosh(z);
    if (!std::isfinite(c)) return 0.0;
    return 1.0 / (c * c);
}

struct Prepared {
    std::vector<double> m;
    double t = 0;  // T_n(x)
};

Prepared prepare(const CouplingMatrix& A, const SpinConfig& x) {
    LocalFields f = local_fields(A, x);
    Prepared pr;
    pr.m = std::move(f.m);
    double t = 0;
    for (double mi : pr.m) t += (mi - f.mean) * (mi - f.mean);
    pr.t = t / pr.m.size();
    return pr;
}

double objective_at(const std::vector<double>& m, const SpinConfig& x, double beta,
                    double b) {
    double val = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double a = beta * m[i] + b;
        val += beta * x[i] * m[i] + b * x[i] - log_cosh(a);
    }
    return val;
}

PLGradient gradient_at(const std::vector<double>& m, const SpinConfig& x, double beta,
                       double b) {
    PLGradient g;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double resid = x[i] - std::tanh(beta * m[i] + b);
        g.q += m[i] * resid;
        g.r += resid;
    }
    return g;
}

// The objective decays along a ray (u,v) iff some x_i(u m_i + v) < 0, so a
// finite maximizer exists iff no nonzero (u,v) has x_i(u m_i + v) >= 0 for
// all i.  That feasible set is an intersection of half-planes through the
// origin with normals n_i = x_i (m_i, 1); it contains a nonzero vector iff
// one of the half-plane boundary directions satisfies every constraint.
// This subsumes A1-A4 ((1,0), (-1,0), (0,+-1) and (1,-mbar)) but also
// catches jointly separable data those sets miss, e.g. any mixed sample on
// a complete graph, where the fields take only two values.
bool separable(const std::vector<double>& m, const SpinConfig& x) {
    std::vector<std::pair<double, double>> normals;
    normals.reserve(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        normals.emplace_back(x[i] * m[i], static_cast<double>(x[i]));
    std::sort(normals.begin(), normals.end());
    normals.erase(std::unique(normals.begin(), normals.end()), normals.end());

    double scale = 1.0;
    for (auto [a, c] : normals) scale = std::max(scale, std::fabs(a));
    const double tol = 1e-12 * scale * scale;

    auto feasible = [&](double u, double v) {
        for (auto [a, c] : normals)
            if (a * u + c * v < -tol) return false;
        return true;
    };
    for (auto [a, c] : normals)
        if (feasible(c, -a) || feasible(-c, a)) return true;
    return false;
}

PLHessian hessian_at(const std::vector<double>& m, double beta, double b) {
    PLHessian h;
    for (double mi : m) {
        const double th = sech2(beta * mi + b);
        h.h11 += mi * mi * th;
        h.h12 += mi * th;
        h.h22 += th;
    }
    return h;
}

}  // namespace

double PLGradient::norm() const { return std::hypot(q, r); }

double PLHessian::min_eigenvalue() const {
    const double tr = h11 + h22;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det()));
    return tr / 2.0 - disc;
}

double objective(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x) {
    return objective_at(prepare(A, x).m, x, p.beta, p.b_field);
}

PLGradient gradient(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x) {
    return gradient_at(prepare(A, x).m, x, p.beta, p.b_field);
}

PLHessian hessian(const CouplingMatrix& A, const IsingParams& p, const SpinConfig& x) {
    return hessian_at(prepare(A, x).m, p.beta, p.b_field);
}

double t_stat(const CouplingMatrix& A, const SpinConfig& x) { return prepare(A, x).t; }

std::vector<std::string> ExistenceVerdict::failing_sets() const {
    std::vector<std::string> s;
    if (a1) s.push_back("A1");
    if (a2) s.push_back("A2");
    if (a3) s.push_back("A3");
    if (a4) s.push_back("A4");
    return s;
}

ExistenceVerdict existence_check(const CouplingMatrix& A, const SpinConfig& x,
                                 double t_tol) {
    Prepared pr = prepare(A, x);
    if (t_tol < 0) t_tol = 1e-12 * A.gamma() * A.gamma();
    ExistenceVerdict v;
    v.a1 = pr.t <= t_tol;
    v.a2 = true;
    v.a3 = true;
    for (std::size_t i = 0; i < pr.m.size(); ++i) {
        const double xm = x[i] * pr.m[i];
        if (xm != std::fabs(pr.m[i])) v.a2 = false;
        if (xm != -std::fabs(pr.m[i])) v.a3 = false;
        if (!v.a2 && !v.a3) break;
    }
    v.a4 = std::all_of(x.begin(), x.end(), [](int s) { return s == 1; }) ||
           std::all_of(x.begin(), x.end(), [](int s) { return s == -1; });
    v.exists = !(v.a1 || v.a2 || v.a3 || v.a4);
    return v;
}

FitResult fit_joint(const CouplingMatrix& A, const SpinConfig& x, FitOptions opts) {
    Prepared pr = prepare(A, x);
    const int n = A.n();

    FitResult res;
    res.verdict = existence_check(A, x);
    res.t_stat = pr.t;
    res.rate_bound = pr.t > 0 ? 1.0 / (std::sqrt(static_cast<double>(n)) * pr.t) : kInf;
    if (!res.verdict.exists) {
        res.beta_hat = kNaN;
        res.b_hat = kNaN;
        return res;
    }

    if (separable(pr.m, x))
        throw NonConvergence(
            "fit_joint: no finite maximizer (data separable along a joint "
            "direction outside A1-A4)");

    double beta = opts.beta0, b = opts.b0;
    if (opts.warm_start) {
        try {
            beta = fit_beta(A, x, 0.0);
            b = fit_b(A, x, beta);
        } catch (const NumericError&) {
            beta = opts.beta0;
            b = opts.b0;
        }
    }

    double obj = objective_at(pr.m, x, beta, b);
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        PLGradient g = gradient_at(pr.m, x, beta, b);
        if (g.norm() / n <= opts.tol) break;

        PLHessian h = hessian_at(pr.m, beta, b);
        double db, dB;
        const double det = h.det();
        if (det > 1e-14 * static_cast<double>(n) * n) {
            // Newton ascent direction from the closed-form 2x2 solve.
            db = (h.h22 * g.q - h.h12 * g.r) / det;
            dB = (h.h11 * g.r - h.h12 * g.q) / det;
        } else {
            // near-degenerate Hessian: plain gradient ascent
            db = g.q / n;
            dB = g.r / n;
        }

        // Armijo backtracking on the concave objective.
        const double slope = g.q * db + g.r * dB;  // > 0 for an ascent direction
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            const double nb = beta + step * db, nB = b + step * dB;
            const double nobj = objective_at(pr.m, x, nb, nB);
            if (nobj >= obj + 1e-4 * step * slope) {
                beta = nb;
                b = nB;
                obj = nobj;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // The objective cannot be improved at double precision; treat the
            // current point as stationary if the gradient is already tiny.
            PLGradient gg = gradient_at(pr.m, x, beta, b);
            if (gg.norm() / n <= 1e3 * opts.tol) break;
            throw NonConvergence("fit_joint: line search failed at iteration " +
                                 std::to_string(iter));
        }
    }
    PLGradient gfin = gradient_at(pr.m, x, beta, b);
    if (gfin.norm() / n > 1e3 * opts.tol && iter >= opts.max_iter)
        throw NonConvergence("fit_joint: iteration cap reached, grad norm " +
                             std::to_string(gfin.norm() / n));

    res.beta_hat = beta;
    res.b_hat = b;
    res.iterations = iter;
    res.final_gradient_norm = gfin.norm() / n;
    res.hessian_at_opt = hessian_at(pr.m, beta, b);
    return res;
}

double fit_beta(const CouplingMatrix& A, const SpinConfig& x, double b_known,
                double tol) {
    Prepared pr = prepare(A, x);
    bool any_nonzero = false, all_aligned = true, all_anti = true;
    for (std::size_t i = 0; i < pr.m.size(); ++i) {
        if (pr.m[i] != 0) any_nonzero = true;
        const double xm = x[i] * pr.m[i];
        if (xm < std::fabs(pr.m[i])) all_aligned = false;
        if (xm > -std::fabs(pr.m[i])) all_anti = false;
    }
    if (!any_nonzero)
        throw NoRoot(NoRoot::Kind::DegenerateFields, "fit_beta: all local fields zero");
    if (all_aligned)
        throw NoRoot(NoRoot::Kind::Aligned, "fit_beta: x_i m_i = |m_i| for all i (A2)");
    if (all_anti)
        throw NoRoot(NoRoot::Kind::AntiAligned,
                     "fit_beta: x_i m_i = -|m_i| for all i (A3)");

    auto q_at = [&](double beta) {
        return gradient_at(pr.m, x, beta, b_known).q;
    };

    // Q is strictly decreasing in beta; expand [-1, 1] until it brackets 0.
    double lo = -1.0, hi = 1.0;
    double qlo = q_at(lo), qhi = q_at(hi);
    while (qlo < 0 && lo > -65536.0) {
        lo *= 2;
        qlo = q_at(lo);
    }
    while (qhi > 0 && hi < 65536.0) {
        hi *= 2;
        qhi = q_at(hi);
    }
    if (qlo < 0 || qhi > 0)
        throw NoRoot(NoRoot::Kind::Aligned, "fit_beta: no sign change within bracket");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double qm = q_at(mid);
        if (std::fabs(qm) <= tol || hi - lo < 1e-15 * std::max(1.0, std::fabs(mid)))
            return mid;
        if (qm > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double fit_b(const CouplingMatrix& A, const SpinConfig& x, double beta_known,
             double tol) {
    Prepared pr = prepare(A, x);
    const bool all_plus = std::all_of(x.begin(), x.end(), [](int s) { return s == 1; });
    const bool all_minus = std::all_of(x.begin(), x.end(), [](int s) { return s == -1; });
    if (all_plus || all_minus)
        throw NoRoot(NoRoot::Kind::AllEqualSpins, "fit_b: x = +-1 (A4)");

    auto r_at = [&](double b) { return gradient_at(pr.m, x, beta_known, b).r; };

    // R is strictly decreasing in B.
    double lo = -1.0, hi = 1.0;
    double rlo = r_at(lo), rhi = r_at(hi);
    while (rlo < 0 && lo > -65536.0) {
        lo *= 2;
        rlo = r_at(lo);
    }
    while (rhi > 0 && hi < 65536.0) {
        hi *= 2;
        rhi = r_at(hi);
    }
    if (rlo < 0 || rhi > 0)
        throw NoRoot(NoRoot::Kind::AllEqualSpins, "fit_b: no sign change within bracket");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = r_at(mid);
        if (std::fabs(rm) <= tol || hi - lo < 1e-15 * std::max(1.0, std::fabs(mid)))
            return mid;
        if (rm > 0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string fit_result_to_json(const FitResult& r) {
    nlohmann::json j;
    if (r.verdict.exists) {
        j["beta_hat"] = r.beta_hat;
        j["b_hat"] = r.b_hat;
    } else {
        j["beta_hat"] = nullptr;
        j["b_hat"] = nullptr;
    }
    j["exists"] = r.verdict.exists;
    j["failing_sets"] = r.verdict.failing_sets();
    j["iterations"] = r.iterations;
    j["grad_norm"] = r.final_gradient_norm;
    j["t_stat"] = r.t_stat;
    j["rate_bound"] = std::isfinite(r.rate_bound) ? nlohmann::json(r.rate_bound)
                                                  : nlohmann::json("inf");
    return j.dump(2);
}

}  // namespace ising
