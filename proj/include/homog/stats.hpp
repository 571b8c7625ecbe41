#pragma once

#include <array>
#include <functional>
#include <vector>

#include "homog/field.hpp"
#include "homog/smallmat.hpp"

// Monte Carlo estimators. The paper's stretched-exponential norms are proxied
// by empirical standard deviations (rates live in the second moment) and the
// Gaussianity claims by moments 3-4 plus a Kolmogorov-Smirnov distance; all
// error bars are jackknife. Every estimator is a deterministic function of
// its input sample set.

namespace homog {

struct JackknifeEstimate {
    double value = 0.0;
    double stderr_jk = 0.0;
};

// Leave-one-out standard error for an arbitrary statistic of the sample set.
JackknifeEstimate jackknife(const std::vector<double>& samples,
                            const std::function<double(const std::vector<double>&)>& statistic);

struct CltProfile {
    std::vector<double> scales;
    std::vector<double> stddev;    // across samples, RMS-combined over components
    std::vector<double> stderr_jk; // jackknife
    int n_samples = 0;
};

// Accumulation form used by the experiments: per sample, the mollified origin
// values, indexed [scale][component].
class CltAccumulator {
public:
    CltAccumulator(std::vector<double> scales, int n_components);
    void add_sample(const std::vector<std::vector<double>>& origin_values);
    CltProfile finalize() const; // requires >= 30 samples
private:
    std::vector<double> scales_;
    int n_components_;
    std::vector<std::vector<std::vector<double>>> values_; // [scale][comp][sample]
};

// Spec-level entry: mollify each sample field at every scale, read the origin.
CltProfile clt_profile(const std::vector<ScalarField>& samples,
                       const std::vector<double>& scales);
CltProfile clt_profile(const std::vector<VectorField>& samples,
                       const std::vector<double>& scales);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    int n_points = 0;
};

// Ordinary least squares on (log x, log y); xs and ys must be positive and
// hold at least 4 points.
RateFit rate_fit(const std::vector<double>& xs, const std::vector<double>& ys);
// Plain linear fit y = intercept + slope * x (corrector-growth checks).
RateFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

struct CovarianceEstimate {
    Mat Q_hat;        // L^d x covariance of the torus-averaged commutator vector
    Mat stderr_jk;    // per-entry jackknife errors
    double t = 0.0;
    int n_samples = 0;
};

// Estimator of the commutator covariance (gr21-style):
//   Q_hat = L^d * Cov( torus-average of Xi(t) e ),
// from per-sample averaged vectors; needs >= 100 samples.
CovarianceEstimate covariance_Q(const std::vector<std::array<double, 3>>& xi_means,
                                const TorusGrid& grid, double t);
// Field-level convenience wrapper.
CovarianceEstimate covariance_Q(const std::vector<VectorField>& xi_samples, double t);

struct NormalityReport {
    JackknifeEstimate skewness;
    JackknifeEstimate excess_kurtosis;
    double ks_distance = 0.0; // against the moment-matched normal
    int n_samples = 0;
};

NormalityReport normality_report(const std::vector<double>& samples); // N >= 200

// Compactly supported test functional: a smooth bump of the given radius.
struct TestFunctional {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 0.0;
    // Discretized weights over the grid (zero outside the support).
    ScalarField weights(const TorusGrid& g) const;
    // Torus gap between the two supports (negative if they overlap).
    double support_gap(const TestFunctional& other, const TorusGrid& g) const;
};

struct IndependenceResult {
    double correlation = 0.0;
    double stderr_mc = 0.0;
};

// Correlation of paired test integrals for functionals with disjoint supports
// separated by at least `separation`; parameter error on overlap.
IndependenceResult independence_check(const std::vector<double>& integrals_a,
                                      const std::vector<double>& integrals_b,
                                      const TestFunctional& za, const TestFunctional& zb,
                                      const TorusGrid& grid, double separation);
// Overlap-permitting variant (e.g. correlating a functional with itself).
IndependenceResult correlation_of_functionals(const std::vector<double>& integrals_a,
                                              const std::vector<double>& integrals_b);

} // namespace homog
