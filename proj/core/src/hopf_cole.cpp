#include <algorithm>
#include <cmath>
#include <numbers>

#include "pathwise/errors.hpp"
#include "pathwise/pathwise_value.hpp"

namespace pathwise {

double hopf_cole_gaussian(double nu, double t, double w, double x) {
    const double m = x - std::sqrt(nu) * w;
    const double s = 1.0 + nu * t;
    return std::exp(-m * m / (2.0 * s)) / std::sqrt(s);
}

namespace {

// log sum_j exp(terms_j), ignoring terms more than 40 below the maximum.
double log_sum_exp(const std::vector<double>& terms) {
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double t : terms) {
        if (t > top - 40.0) acc += std::exp(t - top);
    }
    return top + std::log(acc);
}

}  // namespace

HopfColeResult hopf_cole_reference(double nu, const BrownianPath& path, const ScalarField& f,
                                   Accumulation mode, double core_fraction) {
    const SpaceGrid& g = f.grid();
    if (g.dim() != 1 || path.dim() != 1) throw ConfigError("Hopf-Cole reference is 1-D only");
    if (!(nu > 0.0)) throw ConfigError("noise level nu must be positive");
    const TimeGrid& tg = path.grid();
    const int N = tg.steps();
    const std::size_t M = g.node_count();
    const double h = g.spacing();
    const double sn = std::sqrt(nu);

    std::vector<double> logw(M, std::log(h));
    logw.front() = logw.back() = std::log(0.5 * h);

    const CoreRegion core = CoreRegion::of(g, core_fraction);
    std::vector<ScalarField> eta, logeta;
    eta.reserve(std::size_t(N) + 1);
    logeta.reserve(std::size_t(N) + 1);
    {
        std::vector<double> e0(M);
        for (std::size_t n = 0; n < M; ++n) e0[n] = std::exp(f[n]);
        eta.emplace_back(g, std::move(e0), BoundaryMode::clamp);
        logeta.emplace_back(g, std::vector<double>(f.values().begin(), f.values().end()),
                            BoundaryMode::clamp);
    }

    const double fmax = *std::max_element(f.values().begin(), f.values().end());
    double defect = 0.0;
    std::vector<double> num_terms, den_terms;
    num_terms.reserve(M);
    den_terms.reserve(M);
    for (int k = 1; k <= N; ++k) {
        const double var = nu * (tg.node(k) - tg.t0());
        const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
        const double shift = sn * path.at(k)[0];
        std::vector<double> le(M), e(M);
        for (std::size_t n = 0; n < M; ++n) {
            const double c = g.point(n)[0] - shift;
            double log_num, log_den;
            if (mode == Accumulation::log_sum_exp) {
                // Terms below exp(-40) of a known lower bound on the largest
                // numerator term cannot change either sum in double precision.
                const double s = std::clamp(std::round((c - g.lower()[0]) / h), 0.0, double(M - 1));
                const auto jc = std::size_t(s);
                const double zc = c - g.point(jc)[0];
                const double floor_term = -zc * zc / (2.0 * var) + f[jc];
                const double reach = std::sqrt(2.0 * var * std::max(0.0, fmax - floor_term + 40.0));
                const int ja = std::max(0, int(std::floor((c - reach - g.lower()[0]) / h)));
                const int jb = std::min(int(M) - 1, int(std::ceil((c + reach - g.lower()[0]) / h)));
                num_terms.clear();
                den_terms.clear();
                for (int j = ja; j <= jb; ++j) {
                    const auto ju = std::size_t(j);
                    const double z = c - g.point(ju)[0];
                    den_terms.push_back(logw[ju] - z * z / (2.0 * var));
                    num_terms.push_back(den_terms.back() + f[ju]);
                }
                log_num = log_sum_exp(num_terms);
                log_den = log_sum_exp(den_terms);
            } else {
                double num = 0.0, den = 0.0;
                for (std::size_t j = 0; j < M; ++j) {
                    const double z = c - g.point(j)[0];
                    const double kern = std::exp(logw[j] - z * z / (2.0 * var));
                    den += kern;
                    num += kern * std::exp(f[j]);
                }
                if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
                    throw NumericalRangeError(
                        "heat-kernel quadrature under/overflowed at step " + std::to_string(k) +
                        "; use log-sum-exp accumulation");
                }
                log_num = std::log(num);
                log_den = std::log(den);
            }
            le[n] = log_num - log_den;
            e[n] = std::exp(le[n]);
            if (core.contains_node(g, n)) {
                defect = std::max(defect, std::abs(1.0 - std::exp(log_den + log_norm)));
            }
        }
        eta.emplace_back(g, std::move(e), BoundaryMode::clamp);
        logeta.emplace_back(g, std::move(le), BoundaryMode::clamp);
    }

    double residual = 0.0;
    const double delta = tg.delta();
    for (int k = 0; k < N; ++k) {
        const auto u0 = logeta[std::size_t(k)].values();
        const auto u1 = logeta[std::size_t(k) + 1].values();
        const double dW = path.increment(k)[0];
        for (int i = std::max(core.lo, 1); i <= std::min(core.hi, int(M) - 2); ++i) {
            const auto n = std::size_t(i);
            const double ux = (u0[n + 1] - u0[n - 1]) / (2.0 * h);
            const double uxx = (u0[n + 1] - 2.0 * u0[n] + u0[n - 1]) / (h * h);
            const double r = (u1[n] - u0[n]) + sn * ux * dW - nu * (uxx + 0.5 * ux * ux) * delta;
            residual = std::max(residual, std::abs(r));
        }
    }

    return HopfColeResult{ValueSequence{tg, std::move(eta), "hopf-cole"},
                          ValueSequence{tg, std::move(logeta), "hopf-cole-log"}, residual, defect};
}

}  // namespace pathwise
