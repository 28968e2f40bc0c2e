#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace swsmil {

// Dense row-major matrix of doubles. Compute happens in 64-bit throughout;
// 32-bit precision exists only at the storage boundary (feature files,
// checkpoints). No broadcasting beyond bias-add; all shapes are explicit.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0);
    static Matrix row_vector(std::vector<double> values);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return data_.size(); }

    double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const;
    std::string shape_str() const;

    bool operator==(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

// Plain (non-recording) primitives. The trainer goes through the Tape; these
// back the inference path and double as building blocks for its forward pass.
Matrix matmul(const Matrix& a, const Matrix& b);     // a (m×k) · b (k×n)
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a (m×k) · bᵀ (n×k)
Matrix add(const Matrix& a, const Matrix& b);
Matrix add_bias(const Matrix& m, const Matrix& bias);  // bias is 1×cols, added per row
Matrix tanh_ew(const Matrix& m);
Matrix softmax_rows(const Matrix& m);  // row-wise, max-subtraction stabilized
Matrix elementwise_mul(const Matrix& a, const Matrix& b);
Matrix weighted_sum_rows(const Matrix& weights, const Matrix& m);  // (1×N)·(N×d) -> 1×d
Matrix scale(const Matrix& m, double c);
double reduce_sum(const Matrix& m);

// Row selection/concatenation used to materialize pseudo bags and merges.
Matrix gather_rows(const Matrix& m, const std::vector<int>& row_indices);
Matrix concat_rows(const Matrix& a, const Matrix& b);

}  // namespace swsmil
