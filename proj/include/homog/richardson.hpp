#pragma once

#include <vector>

#include "homog/errors.hpp"
#include "homog/field.hpp"
#include "homog/smallmat.hpp"

// Richardson extrapolation in the cutoff T:
//   f^1_T = f_T,   f^(k+1)_T = (2^k f^k_2T - f^k_T) / (2^k - 1),
// which cancels the leading 1/T, 1/T^2, ... error terms. The input holds the
// kappa base values at T, 2T, ..., 2^(kappa-1) T; the result is f^kappa_T.

namespace homog {

namespace detail {

inline double lincomb(double a, double x, double b, double y) { return a * x + b * y; }

inline Mat lincomb(double a, const Mat& x, double b, const Mat& y) {
    Mat out(x.dim);
    for (int i = 0; i < x.dim; ++i)
        for (int j = 0; j < x.dim; ++j) out(i, j) = a * x(i, j) + b * y(i, j);
    return out;
}

inline ScalarField lincomb(double a, const ScalarField& x, double b, const ScalarField& y) {
    ScalarField out(x.grid);
    for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] = a * x.v[i] + b * y.v[i];
    return out;
}

} // namespace detail

template <class V>
V richardson_extrapolate(std::vector<V> values, int kappa) {
    if (kappa < 1) throw ParameterError("richardson_extrapolate: kappa must be >= 1");
    if (static_cast<int>(values.size()) != kappa)
        throw ParameterError("richardson_extrapolate: need exactly kappa dyadic values");
    for (int level = 1; level < kappa; ++level) {
        const double pow2 = static_cast<double>(1 << level);
        for (int i = 0; i + level < kappa; ++i)
            values[static_cast<std::size_t>(i)] =
                detail::lincomb(pow2 / (pow2 - 1.0), values[static_cast<std::size_t>(i + 1)],
                                -1.0 / (pow2 - 1.0), values[static_cast<std::size_t>(i)]);
    }
    return std::move(values.front());
}

// Scalar resolvent from the spectral representation of the extrapolated
// corrector: g_1(mu, T) = 1 / (1/T + mu), extrapolated in T like above.
inline double resolvent_g_kappa(double mu, double T, int kappa) {
    if (kappa < 1) throw ParameterError("resolvent_g_kappa: kappa must be >= 1");
    if (!(T > 0.0) || mu < 0.0) throw ParameterError("resolvent_g_kappa: need T > 0, mu >= 0");
    std::vector<double> g(static_cast<std::size_t>(kappa));
    for (int j = 0; j < kappa; ++j) g[static_cast<std::size_t>(j)] =
        1.0 / (1.0 / (T * static_cast<double>(1 << j)) + mu);
    return richardson_extrapolate(std::move(g), kappa);
}

} // namespace homog
