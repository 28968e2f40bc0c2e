#include "swsmil/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "swsmil/error.hpp"

namespace swsmil {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    if (rows < 0 || cols < 0) {
        throw DimensionError("matrix dimensions must be non-negative");
    }
}

Matrix Matrix::row_vector(std::vector<double> values) {
    Matrix m;
    m.rows_ = 1;
    m.cols_ = static_cast<int>(values.size());
    m.data_ = std::move(values);
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw DimensionError(msg);
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.rows(), "matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
    Matrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) {
                out.at(i, j) += aik * b.at(k, j);
            }
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "matmul_nt shape mismatch: " + a.shape_str() + " * " + b.shape_str() + "^T");
    Matrix out(a.rows(), b.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols(); ++k) {
                acc += a.at(i, k) * b.at(j, k);
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "add shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) out.raw()[i] += b.raw()[i];
    return out;
}

Matrix add_bias(const Matrix& m, const Matrix& bias) {
    require(bias.rows() == 1 && bias.cols() == m.cols(),
            "add_bias expects 1x" + std::to_string(m.cols()) + " bias, got " + bias.shape_str());
    Matrix out = m;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            out.at(i, j) += bias.at(0, j);
        }
    }
    return out;
}

Matrix tanh_ew(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.raw()) v = std::tanh(v);
    return out;
}

Matrix softmax_rows(const Matrix& m) {
    require(m.cols() >= 1, "softmax_rows needs at least one column");
    Matrix out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
        double mx = m.at(i, 0);
        for (int j = 1; j < m.cols(); ++j) mx = std::max(mx, m.at(i, j));
        double denom = 0.0;
        for (int j = 0; j < m.cols(); ++j) {
            const double e = std::exp(m.at(i, j) - mx);
            out.at(i, j) = e;
            denom += e;
        }
        for (int j = 0; j < m.cols(); ++j) out.at(i, j) /= denom;
    }
    return out;
}

Matrix elementwise_mul(const Matrix& a, const Matrix& b) {
    require(a.same_shape(b), "elementwise_mul shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    Matrix out = a;
    for (size_t i = 0; i < out.size(); ++i) out.raw()[i] *= b.raw()[i];
    return out;
}

Matrix weighted_sum_rows(const Matrix& weights, const Matrix& m) {
    require(weights.rows() == 1 && weights.cols() == m.rows(),
            "weighted_sum_rows expects 1x" + std::to_string(m.rows()) + " weights, got " + weights.shape_str());
    Matrix out(1, m.cols());
    for (int r = 0; r < m.rows(); ++r) {
        const double w = weights.at(0, r);
        for (int j = 0; j < m.cols(); ++j) {
            out.at(0, j) += w * m.at(r, j);
        }
    }
    return out;
}

Matrix scale(const Matrix& m, double c) {
    Matrix out = m;
    for (double& v : out.raw()) v *= c;
    return out;
}

double reduce_sum(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.raw()) acc += v;
    return acc;
}

Matrix gather_rows(const Matrix& m, const std::vector<int>& row_indices) {
    Matrix out(static_cast<int>(row_indices.size()), m.cols());
    for (size_t i = 0; i < row_indices.size(); ++i) {
        const int r = row_indices[i];
        if (r < 0 || r >= m.rows()) {
            throw DomainError("gather_rows: row index " + std::to_string(r) + " out of range");
        }
        for (int j = 0; j < m.cols(); ++j) {
            out.at(static_cast<int>(i), j) = m.at(r, j);
        }
    }
    return out;
}

Matrix concat_rows(const Matrix& a, const Matrix& b) {
    require(a.cols() == b.cols(), "concat_rows column mismatch: " + a.shape_str() + " vs " + b.shape_str());
    Matrix out(a.rows() + b.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) out.at(a.rows() + i, j) = b.at(i, j);
    return out;
}

}  // namespace swsmil
