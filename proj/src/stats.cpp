#include "homog/stats.hpp"

#include <algorithm>
#include <cmath>

#include "homog/errors.hpp"
#include "homog/kernels.hpp"
#include "homog/mollify.hpp"
#include "homog/ops.hpp"

namespace homog {
namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double central_moment(const std::vector<double>& v, double mean, int order) {
    double s = 0.0;
    for (double x : v) s += std::pow(x - mean, order);
    return s / static_cast<double>(v.size());
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace

JackknifeEstimate jackknife(const std::vector<double>& samples,
                            const std::function<double(const std::vector<double>&)>& statistic) {
    const std::size_t n = samples.size();
    if (n < 2) throw ParameterError("jackknife: need at least 2 samples");
    JackknifeEstimate est;
    est.value = statistic(samples);
    std::vector<double> loo;
    loo.reserve(n - 1);
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) {
        loo.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) loo.push_back(samples[j]);
        theta[i] = statistic(loo);
    }
    const double tbar = mean_of(theta);
    double ss = 0.0;
    for (double t : theta) ss += (t - tbar) * (t - tbar);
    est.stderr_jk = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return est;
}

CltAccumulator::CltAccumulator(std::vector<double> scales, int n_components)
    : scales_(std::move(scales)), n_components_(n_components) {
    values_.resize(scales_.size());
    for (auto& per_scale : values_) per_scale.resize(static_cast<std::size_t>(n_components_));
}

void CltAccumulator::add_sample(const std::vector<std::vector<double>>& origin_values) {
    if (origin_values.size() != scales_.size())
        throw ParameterError("CltAccumulator: scale count mismatch");
    for (std::size_t s = 0; s < scales_.size(); ++s) {
        if (static_cast<int>(origin_values[s].size()) != n_components_)
            throw ParameterError("CltAccumulator: component count mismatch");
        for (int c = 0; c < n_components_; ++c)
            values_[s][static_cast<std::size_t>(c)].push_back(
                origin_values[s][static_cast<std::size_t>(c)]);
    }
}

CltProfile CltAccumulator::finalize() const {
    CltProfile prof;
    prof.scales = scales_;
    const std::size_t n = values_.empty() || values_[0].empty() ? 0 : values_[0][0].size();
    if (n < 30) throw ParameterError("CltProfile: need at least 30 samples");
    prof.n_samples = static_cast<int>(n);

    for (std::size_t s = 0; s < scales_.size(); ++s) {
        // Combined statistic: sqrt of the component-averaged variance. The
        // jackknife runs over samples of the vector statistic, so flatten by
        // recomputation on leave-one-out index sets.
        const auto& comps = values_[s];
        auto combined = [&](const std::vector<std::size_t>& idx) {
            double var_acc = 0.0;
            for (const auto& cv : comps) {
                double m = 0.0;
                for (std::size_t i : idx) m += cv[i];
                m /= static_cast<double>(idx.size());
                double ss = 0.0;
                for (std::size_t i : idx) ss += (cv[i] - m) * (cv[i] - m);
                var_acc += ss / static_cast<double>(idx.size() - 1);
            }
            return std::sqrt(var_acc / static_cast<double>(comps.size()));
        };
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        const double full = combined(all);

        std::vector<double> theta(n);
        std::vector<std::size_t> loo(n - 1);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t w = 0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) loo[w++] = j;
            theta[i] = combined(loo);
        }
        const double tbar = mean_of(theta);
        double ss = 0.0;
        for (double t : theta) ss += (t - tbar) * (t - tbar);
        prof.stddev.push_back(full);
        prof.stderr_jk.push_back(
            std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n)));
    }
    return prof;
}

namespace {

void check_scales(const TorusGrid& g, const std::vector<double>& scales) {
    for (double R : scales)
        if (!(R >= 1.0) || R > g.side / 8.0)
            throw ParameterError("clt_profile: scales must satisfy 1 <= R <= L/8");
}

} // namespace

CltProfile clt_profile(const std::vector<ScalarField>& samples,
                       const std::vector<double>& scales) {
    if (samples.empty()) throw ParameterError("clt_profile: no samples");
    const TorusGrid& g = samples.front().grid;
    check_scales(g, scales);
    MollifierPlan plan(g, scales);
    CltAccumulator acc(scales, 1);
    for (const auto& f : samples) {
        const std::vector<double> ov = plan.origin_values(f);
        std::vector<std::vector<double>> per_scale(scales.size());
        for (std::size_t s = 0; s < scales.size(); ++s) per_scale[s] = {ov[s]};
        acc.add_sample(per_scale);
    }
    return acc.finalize();
}

CltProfile clt_profile(const std::vector<VectorField>& samples,
                       const std::vector<double>& scales) {
    if (samples.empty()) throw ParameterError("clt_profile: no samples");
    const TorusGrid& g = samples.front().grid;
    check_scales(g, scales);
    MollifierPlan plan(g, scales);
    CltAccumulator acc(scales, g.dim);
    ScalarField comp(g);
    for (const auto& f : samples) {
        std::vector<std::vector<double>> per_scale(scales.size(),
                                                   std::vector<double>(g.dim, 0.0));
        for (int ax = 0; ax < g.dim; ++ax) {
            kernels::copy(f.comp(ax), comp.v.data(), g.sites());
            const std::vector<double> ov = plan.origin_values(comp);
            for (std::size_t s = 0; s < scales.size(); ++s) per_scale[s][ax] = ov[s];
        }
        acc.add_sample(per_scale);
    }
    return acc.finalize();
}

RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ParameterError("rate_fit: length mismatch");
    if (xs.size() < 4) throw ParameterError("rate_fit: need at least 4 points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw ParameterError("rate_fit: points must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return linear_fit(lx, ly);
}

RateFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ParameterError("linear_fit: length mismatch");
    const std::size_t n = xs.size();
    if (n < 4) throw ParameterError("linear_fit: need at least 4 points");

    const double xbar = mean_of(xs), ybar = mean_of(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        syy += (ys[i] - ybar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0) throw ParameterError("linear_fit: degenerate x-range");

    RateFit fit;
    fit.n_points = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    const double sigma2 = n > 2 ? ss_res / static_cast<double>(n - 2) : 0.0;
    fit.slope_stderr = std::sqrt(sigma2 / sxx);
    return fit;
}

CovarianceEstimate covariance_Q(const std::vector<std::array<double, 3>>& xi_means,
                                const TorusGrid& grid, double t) {
    const std::size_t n = xi_means.size();
    if (n < 100) throw ParameterError("covariance_Q: need at least 100 samples");
    const int d = grid.dim;
    const double vol = static_cast<double>(grid.sites());

    auto cov_of = [&](const std::vector<std::size_t>& idx, int i, int j) {
        double mi = 0.0, mj = 0.0;
        for (std::size_t k : idx) {
            mi += xi_means[k][static_cast<std::size_t>(i)];
            mj += xi_means[k][static_cast<std::size_t>(j)];
        }
        mi /= static_cast<double>(idx.size());
        mj /= static_cast<double>(idx.size());
        double acc = 0.0;
        for (std::size_t k : idx)
            acc += (xi_means[k][static_cast<std::size_t>(i)] - mi) *
                   (xi_means[k][static_cast<std::size_t>(j)] - mj);
        return vol * acc / static_cast<double>(idx.size() - 1);
    };

    CovarianceEstimate est;
    est.Q_hat = Mat(d);
    est.stderr_jk = Mat(d);
    est.t = t;
    est.n_samples = static_cast<int>(n);

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    std::vector<std::size_t> loo(n - 1);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            est.Q_hat(i, j) = cov_of(all, i, j);
            std::vector<double> theta(n);
            for (std::size_t k = 0; k < n; ++k) {
                std::size_t w = 0;
                for (std::size_t l = 0; l < n; ++l)
                    if (l != k) loo[w++] = l;
                theta[k] = cov_of(loo, i, j);
            }
            const double tbar = mean_of(theta);
            double ss = 0.0;
            for (double th : theta) ss += (th - tbar) * (th - tbar);
            est.stderr_jk(i, j) =
                std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
        }
    return est;
}

CovarianceEstimate covariance_Q(const std::vector<VectorField>& xi_samples, double t) {
    if (xi_samples.empty()) throw ParameterError("covariance_Q: no samples");
    const TorusGrid& g = xi_samples.front().grid;
    std::vector<std::array<double, 3>> means;
    means.reserve(xi_samples.size());
    for (const auto& xi : xi_samples) means.push_back(spatial_mean(xi));
    return covariance_Q(means, g, t);
}

NormalityReport normality_report(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 200) throw ParameterError("normality_report: need at least 200 samples");

    auto skew_stat = [](const std::vector<double>& v) {
        const double m = mean_of(v);
        const double m2 = central_moment(v, m, 2);
        return m2 > 0.0 ? central_moment(v, m, 3) / std::pow(m2, 1.5) : 0.0;
    };
    auto kurt_stat = [](const std::vector<double>& v) {
        const double m = mean_of(v);
        const double m2 = central_moment(v, m, 2);
        return m2 > 0.0 ? central_moment(v, m, 4) / (m2 * m2) - 3.0 : 0.0;
    };

    NormalityReport rep;
    rep.n_samples = static_cast<int>(n);
    rep.skewness = jackknife(samples, skew_stat);
    rep.excess_kurtosis = jackknife(samples, kurt_stat);

    const double m = mean_of(samples);
    const double sd = std::sqrt(central_moment(samples, m, 2));
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = sd > 0.0 ? (sorted[i] - m) / sd : 0.0;
        const double cdf = normal_cdf(z);
        ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - cdf));
        ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / n));
    }
    rep.ks_distance = ks;
    return rep;
}

ScalarField TestFunctional::weights(const TorusGrid& g) const {
    ScalarField w(g);
    const double rho = radius;
    for (std::size_t i = 0; i < g.sites(); ++i) {
        const auto x = g.coords(i);
        double dist2 = 0.0;
        for (int c = 0; c < g.dim; ++c) {
            double dx = std::fabs(x[c] - center[c]);
            dx = std::min(dx, g.side - dx);
            dist2 += dx * dx;
        }
        const double s2 = dist2 / (rho * rho);
        w.v[i] = s2 < 1.0 ? std::exp(-1.0 / (1.0 - s2)) : 0.0;
    }
    // normalize to unit discrete mass
    const double total = kernels::block_sum(w.v.data(), g.sites());
    if (total > 0.0) kernels::scale(1.0 / total, w.v.data(), g.sites());
    return w;
}

double TestFunctional::support_gap(const TestFunctional& other, const TorusGrid& g) const {
    double dist2 = 0.0;
    for (int c = 0; c < g.dim; ++c) {
        double dx = std::fabs(center[c] - other.center[c]);
        dx = std::min(dx, g.side - dx);
        dist2 += dx * dx;
    }
    return std::sqrt(dist2) - radius - other.radius;
}

IndependenceResult correlation_of_functionals(const std::vector<double>& a,
                                              const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw ParameterError("correlation: need paired samples");
    const double ma = mean_of(a), mb = mean_of(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    IndependenceResult res;
    res.correlation = (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
    res.stderr_mc = 1.0 / std::sqrt(static_cast<double>(a.size()));
    return res;
}

IndependenceResult independence_check(const std::vector<double>& integrals_a,
                                      const std::vector<double>& integrals_b,
                                      const TestFunctional& za, const TestFunctional& zb,
                                      const TorusGrid& grid, double separation) {
    if (integrals_a.size() < 200)
        throw ParameterError("independence_check: need at least 200 samples");
    const double gap = za.support_gap(zb, grid);
    if (gap < 0.0) throw ParameterError("independence_check: test supports overlap");
    if (gap + 1e-12 < separation)
        throw ParameterError("independence_check: supports closer than stated separation");
    return correlation_of_functionals(integrals_a, integrals_b);
}

} // namespace homog
