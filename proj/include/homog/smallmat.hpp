#pragma once

#include <array>
#include <cmath>

#include "homog/errors.hpp"

namespace homog {

// Dense d x d matrix for homogenized tensors, d <= 3.
struct Mat {
    int dim = 2;
    std::array<std::array<double, 3>, 3> m{};

    Mat() = default;
    explicit Mat(int d) : dim(d) {
        for (auto& row : m) row.fill(0.0);
    }
    static Mat identity(int d, double c = 1.0) {
        Mat I(d);
        for (int i = 0; i < d; ++i) I.m[i][i] = c;
        return I;
    }

    double& operator()(int i, int j) { return m[i][j]; }
    double operator()(int i, int j) const { return m[i][j]; }

    std::array<double, 3> apply(const std::array<double, 3>& x) const {
        std::array<double, 3> y{0.0, 0.0, 0.0};
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) y[i] += m[i][j] * x[j];
        return y;
    }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    Mat& operator*=(double c) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m[i][j] *= c;
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator*(double c, Mat a) { return a *= c; }
    friend Mat operator-(Mat a, const Mat& b) {
        for (int i = 0; i < a.dim; ++i)
            for (int j = 0; j < a.dim; ++j) a.m[i][j] -= b.m[i][j];
        return a;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) s += m[i][j] * m[i][j];
        return std::sqrt(s);
    }
};

inline double quadratic_form(const Mat& a, const std::array<double, 3>& xi) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i)
        for (int j = 0; j < a.dim; ++j) s += xi[i] * a.m[i][j] * xi[j];
    return s;
}

} // namespace homog
