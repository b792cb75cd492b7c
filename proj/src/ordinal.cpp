#include "narmine/ordinal.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "narmine/error.hpp"
#include "narmine/stats.hpp"

namespace narmine::ordinal {

namespace {

constexpr double kProbFloor = 1e-300;

// Log-likelihood, gradient, and Hessian in (alpha, beta) coordinates.
struct Derivatives {
    double loglik = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

Derivatives evaluate(const std::vector<Observation>& data, int k,
                     const Eigen::VectorXd& theta, bool with_hessian) {
    const int km1 = k - 1;
    const int dim = k;  // km1 intercepts + slope
    Derivatives d;
    d.grad = Eigen::VectorXd::Zero(dim);
    if (with_hessian) d.hess = Eigen::MatrixXd::Zero(dim, dim);

    for (const auto& obs : data) {
        const int y = obs.y;
        double pi_upper = 1.0, pi_lower = 0.0;
        double phi_u = 0.0, dphi_u = 0.0, phi_l = 0.0, dphi_l = 0.0;
        if (y <= km1) {
            double s = stats::logistic(theta(y - 1) - theta(km1) * obs.x);
            pi_upper = s;
            phi_u = s * (1.0 - s);
            dphi_u = phi_u * (1.0 - 2.0 * s);
        }
        if (y >= 2) {
            double s = stats::logistic(theta(y - 2) - theta(km1) * obs.x);
            pi_lower = s;
            phi_l = s * (1.0 - s);
            dphi_l = phi_l * (1.0 - 2.0 * s);
        }
        double p = std::max(pi_upper - pi_lower, kProbFloor);
        d.loglik += std::log(p);

        double gu = phi_u / p;
        double gl = phi_l / p;
        if (y <= km1) {
            d.grad(y - 1) += gu;
            d.grad(km1) -= obs.x * gu;
        }
        if (y >= 2) {
            d.grad(y - 2) -= gl;
            d.grad(km1) += obs.x * gl;
        }
        if (!with_hessian) continue;

        auto add_outer = [&](int iu, int iv, double coeff, double xu, double xv) {
            // indices < km1 refer to intercepts with unit sensitivity; the
            // slope slot carries -x.
            d.hess(iu, iv) += coeff;
            d.hess(iu, km1) += coeff * xv;
            d.hess(km1, iv) += coeff * xu;
            d.hess(km1, km1) += coeff * xu * xv;
        };
        double mx = -obs.x;
        if (y <= km1) {
            double huu = dphi_u / p - gu * gu;
            add_outer(y - 1, y - 1, huu, mx, mx);
        }
        if (y >= 2) {
            double hll = -dphi_l / p - gl * gl;
            add_outer(y - 2, y - 2, hll, mx, mx);
        }
        if (y <= km1 && y >= 2) {
            double hul = gu * gl;
            add_outer(y - 1, y - 2, hul, mx, mx);
            add_outer(y - 2, y - 1, hul, mx, mx);
        }
    }
    return d;
}

// theta -> reparameterized coordinates (alpha_1, log-increments, beta)
Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta, int k) {
    Eigen::VectorXd out(k);
    out(0) = theta(0);
    for (int j = 1; j < k - 1; ++j) out(j) = std::log(theta(j) - theta(j - 1));
    out(k - 1) = theta(k - 1);
    return out;
}

Eigen::VectorXd to_natural(const Eigen::VectorXd& psi, int k) {
    Eigen::VectorXd theta(k);
    theta(0) = psi(0);
    for (int j = 1; j < k - 1; ++j) theta(j) = theta(j - 1) + std::exp(psi(j));
    theta(k - 1) = psi(k - 1);
    return theta;
}

}  // namespace

PomFit fit_pom(const std::vector<Observation>& data, int k, const FitOptions& opts) {
    if (k < 2) throw ConfigError("fit_pom: need at least 2 categories");
    if (static_cast<std::int64_t>(data.size()) <= k)
        throw Error("fit_pom: sample smaller than category count");

    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
    for (const auto& obs : data) {
        if (obs.y < 1 || obs.y > k)
            throw Error("fit_pom: category " + std::to_string(obs.y) + " outside 1.." +
                        std::to_string(k));
        ++counts[static_cast<std::size_t>(obs.y - 1)];
    }
    for (int j = 0; j < k; ++j)
        if (counts[static_cast<std::size_t>(j)] == 0)
            throw Error("fit_pom: category " + std::to_string(j + 1) + " missing from data");

    const int km1 = k - 1;
    const int dim = k;

    // Init: cumulative empirical logits, zero slope.
    Eigen::VectorXd theta(dim);
    std::int64_t cum = 0;
    for (int j = 0; j < km1; ++j) {
        cum += counts[static_cast<std::size_t>(j)];
        double frac = static_cast<double>(cum) / static_cast<double>(data.size());
        theta(j) = std::log(frac / (1.0 - frac));
    }
    theta(km1) = 0.0;

    Eigen::VectorXd psi = to_unconstrained(theta, k);
    Derivatives cur = evaluate(data, k, theta, true);

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (cur.grad.lpNorm<Eigen::Infinity>() < opts.gradient_tol) break;

        // Chain rule into the unconstrained coordinates.
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
        for (int j = 0; j < km1; ++j) {
            jac(j, 0) = 1.0;
            for (int l = 1; l <= j; ++l) jac(j, l) = std::exp(psi(l));
        }
        jac(km1, km1) = 1.0;
        Eigen::VectorXd grad_psi = jac.transpose() * cur.grad;
        Eigen::MatrixXd hess_psi = jac.transpose() * cur.hess * jac;
        for (int l = 1; l < km1; ++l) {
            double curvature = 0.0;
            for (int j = l; j < km1; ++j) curvature += cur.grad(j);
            hess_psi(l, l) += curvature * std::exp(psi(l));
        }

        Eigen::VectorXd step = -hess_psi.fullPivLu().solve(grad_psi);
        if (!step.allFinite() || grad_psi.dot(step) <= 0.0)
            step = grad_psi;  // fall back to steepest ascent

        // Step-halving keeps the likelihood non-decreasing.
        double scale = 1.0;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            Eigen::VectorXd psi_new = psi + scale * step;
            Eigen::VectorXd theta_new = to_natural(psi_new, k);
            if (theta_new.allFinite()) {
                Derivatives trial = evaluate(data, k, theta_new, true);
                if (std::isfinite(trial.loglik) && trial.loglik >= cur.loglik) {
                    psi = psi_new;
                    theta = theta_new;
                    cur = std::move(trial);
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if (!accepted) break;
        if (std::fabs(theta(km1)) > 1e3 || std::fabs(theta(0)) > 1e4)
            throw Error("divergent estimate: separation in ordinal fit");
    }
    if (cur.grad.lpNorm<Eigen::Infinity>() >= opts.gradient_tol)
        throw Error("divergent estimate: ordinal fit did not converge in " +
                    std::to_string(opts.max_iterations) + " iterations");

    PomFit fit;
    fit.k = k;
    fit.n = static_cast<std::int64_t>(data.size());
    fit.iterations = it;
    fit.log_likelihood = cur.loglik;
    fit.intercepts.assign(theta.data(), theta.data() + km1);
    fit.slope = theta(km1);

    Eigen::MatrixXd info = -cur.hess;
    fit.covariance = info.fullPivLu().inverse();
    fit.intercept_se.resize(static_cast<std::size_t>(km1));
    fit.intercept_t.resize(static_cast<std::size_t>(km1));
    fit.intercept_p.resize(static_cast<std::size_t>(km1));
    for (int j = 0; j < km1; ++j) {
        double se = std::sqrt(std::max(fit.covariance(j, j), 0.0));
        fit.intercept_se[static_cast<std::size_t>(j)] = se;
        double t = se > 0.0 ? fit.intercepts[static_cast<std::size_t>(j)] / se : 0.0;
        fit.intercept_t[static_cast<std::size_t>(j)] = t;
        fit.intercept_p[static_cast<std::size_t>(j)] = 2.0 * stats::normal_sf(std::fabs(t));
    }
    fit.slope_se = std::sqrt(std::max(fit.covariance(km1, km1), 0.0));
    fit.slope_t = fit.slope_se > 0.0 ? fit.slope / fit.slope_se : 0.0;
    fit.slope_p = 2.0 * stats::normal_sf(std::fabs(fit.slope_t));
    return fit;
}

OddsRatioReport odds_ratio(const PomFit& fit) {
    OddsRatioReport r;
    r.or_value = std::exp(fit.slope);
    r.ci_low = std::exp(fit.slope - 1.96 * fit.slope_se);
    r.ci_high = std::exp(fit.slope + 1.96 * fit.slope_se);
    return r;
}

Prediction predict_category(const PomFit& fit, double x) {
    Prediction pred;
    pred.probabilities.resize(static_cast<std::size_t>(fit.k));
    double prev = 0.0;
    for (int j = 0; j < fit.k; ++j) {
        double cum = j < fit.k - 1
                         ? stats::logistic(fit.intercepts[static_cast<std::size_t>(j)] -
                                           fit.slope * x)
                         : 1.0;
        pred.probabilities[static_cast<std::size_t>(j)] = cum - prev;
        prev = cum;
    }
    pred.category = 1;
    for (int j = 1; j < fit.k; ++j)
        if (pred.probabilities[static_cast<std::size_t>(j)] >
            pred.probabilities[static_cast<std::size_t>(pred.category - 1)])
            pred.category = j + 1;
    return pred;
}

double absolute_distance_coefficient(const std::vector<int>& predicted,
                                     const std::vector<int>& actual, int k) {
    if (predicted.size() != actual.size())
        throw Error("absolute_distance_coefficient: length mismatch");
    if (predicted.empty()) throw Error("absolute_distance_coefficient: empty input");
    if (k < 2) throw ConfigError("absolute_distance_coefficient: K must be >= 2");
    std::int64_t total = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] < 1 || predicted[i] > k || actual[i] < 1 || actual[i] > k)
            throw Error("absolute_distance_coefficient: category outside 1..K");
        total += std::llabs(static_cast<long long>(predicted[i]) -
                            static_cast<long long>(actual[i]));
    }
    return 1.0 - static_cast<double>(total) /
                     (static_cast<double>(predicted.size()) * static_cast<double>(k - 1));
}

Diagnostics fit_diagnostics(const PomFit& fit, const std::vector<Observation>& data) {
    std::map<double, std::vector<std::int64_t>> patterns;
    for (const auto& obs : data) {
        auto [it, inserted] =
            patterns.emplace(obs.x, std::vector<std::int64_t>(static_cast<std::size_t>(fit.k),
                                                              0));
        (void)inserted;
        ++it->second[static_cast<std::size_t>(obs.y - 1)];
    }

    Diagnostics diag;
    diag.n_patterns = static_cast<std::int64_t>(patterns.size());
    double deviance = 0.0;
    for (const auto& [x, observed] : patterns) {
        std::int64_t n_p = 0;
        for (std::int64_t c : observed) n_p += c;
        Prediction pred = predict_category(fit, x);
        for (int j = 0; j < fit.k; ++j) {
            std::int64_t o = observed[static_cast<std::size_t>(j)];
            if (o == 0) continue;
            double e = static_cast<double>(n_p) *
                       std::max(pred.probabilities[static_cast<std::size_t>(j)], kProbFloor);
            deviance += 2.0 * static_cast<double>(o) * std::log(static_cast<double>(o) / e);
        }
    }
    diag.deviance = std::max(deviance, 0.0);
    std::int64_t params = fit.k;  // k-1 intercepts + slope
    diag.dof = diag.n_patterns * (fit.k - 1) - params;
    diag.reliable = diag.dof > 0;
    diag.p_value = diag.dof > 0
                       ? stats::chi_square_sf(diag.deviance, static_cast<double>(diag.dof))
                       : 1.0;
    return diag;
}

}  // namespace narmine::ordinal
