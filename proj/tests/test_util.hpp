#pragma once

// Shared test-only oracles. Everything here is deliberately written as
// straight-line/naive code, independent of the library's compute paths, so
// the tests check two routes against each other.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "swsmil/bag.hpp"
#include "swsmil/matrix.hpp"
#include "swsmil/mil_model.hpp"
#include "swsmil/rng.hpp"

namespace test_util {

inline swsmil::Matrix random_matrix(int rows, int cols, swsmil::Rng& rng, double lo = -1.0, double hi = 1.0) {
    swsmil::Matrix m(rows, cols);
    for (double& v : m.raw()) v = rng.uniform(lo, hi);
    return m;
}

// Naive i-j-k matmul, distinct loop order from the library implementation.
inline swsmil::Matrix naive_matmul(const swsmil::Matrix& a, const swsmil::Matrix& b) {
    swsmil::Matrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols(); ++k) acc += a.at(i, k) * b.at(k, j);
            out.at(i, j) = acc;
        }
    }
    return out;
}

// Straight-line reimplementation of the attention-MIL forward pass from the
// three defining formulas, scalar loops only.
struct OracleForward {
    std::vector<double> attention;
    std::vector<double> probs;
};

inline OracleForward abmil_oracle(const swsmil::MilParams& p, const swsmil::Matrix& x) {
    const int n = x.rows(), d = x.cols(), h = p.hidden(), c = p.num_classes();
    std::vector<double> scores(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int hh = 0; hh < h; ++hh) {
            double proj = 0.0;
            for (int k = 0; k < d; ++k) proj += p.v_att.at(hh, k) * x.at(j, k);
            s += p.w_att.at(0, hh) * std::tanh(proj);
        }
        scores[j] = s;
    }
    const double smax = *std::max_element(scores.begin(), scores.end());
    OracleForward out;
    out.attention.resize(n);
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
        out.attention[j] = std::exp(scores[j] - smax);
        denom += out.attention[j];
    }
    for (double& a : out.attention) a /= denom;

    std::vector<double> z(d, 0.0);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < d; ++k) z[k] += out.attention[j] * x.at(j, k);
    }
    std::vector<double> logits(c);
    for (int cc = 0; cc < c; ++cc) {
        double l = p.b_cls.at(0, cc);
        for (int k = 0; k < d; ++k) l += p.w_cls.at(cc, k) * z[k];
        logits[cc] = l;
    }
    const double lmax = *std::max_element(logits.begin(), logits.end());
    out.probs.resize(c);
    double pden = 0.0;
    for (int cc = 0; cc < c; ++cc) {
        out.probs[cc] = std::exp(logits[cc] - lmax);
        pden += out.probs[cc];
    }
    for (double& v : out.probs) v /= pden;
    return out;
}

// Exhaustive Shapley values over all N! instance orderings, evaluating each
// coalition with the production forward pass on gathered rows. The empty
// coalition is the single-zero-instance baseline. Usable for N <= 8.
inline std::vector<double> exact_shapley(const swsmil::MilParams& model, const swsmil::Bag& bag) {
    const int n = bag.num_instances();
    const double baseline = swsmil::forward(model, swsmil::Matrix(1, bag.dim())).probs[bag.label];
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> totals(n, 0.0);
    long count = 0;
    do {
        std::vector<int> coalition;
        double prev = baseline;
        for (int j : perm) {
            coalition.push_back(j);
            std::vector<int> sorted = coalition;
            std::sort(sorted.begin(), sorted.end());
            const double cur =
                swsmil::forward(model, swsmil::gather_rows(bag.features, sorted)).probs[bag.label];
            totals[j] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& t : totals) t /= static_cast<double>(count);
    return totals;
}

// Central finite differences of a scalar function with respect to one
// parameter coordinate.
inline double central_difference(const std::function<double()>& eval, double& coord, double step = 1e-4) {
    const double saved = coord;
    coord = saved + step;
    const double up = eval();
    coord = saved - step;
    const double down = eval();
    coord = saved;
    return (up - down) / (2.0 * step);
}

inline double rel_error(double a, double b) {
    const double denom = std::max({std::fabs(a), std::fabs(b), 1e-6});
    return std::fabs(a - b) / denom;
}

}  // namespace test_util
