#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "spectre/errors.hpp"

namespace spectre {

template <typename T>
using Complex = std::complex<T>;

/// Dense row-major matrix. Rows are tokens (or frequency bins), columns are
/// channels. Storage is a single contiguous vector so its size is exactly
/// rows*cols elements.
template <typename E>
class Matrix {
public:
    using value_type = E;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, E fill)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<E>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw ShapeError("ragged initializer list");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = E{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    E& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const E& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<E> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const E> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<E> flat() noexcept { return data_; }
    std::span<const E> flat() const noexcept { return data_; }
    E* data() noexcept { return data_.data(); }
    const E* data() const noexcept { return data_.data(); }

    std::size_t capacity() const noexcept { return data_.capacity(); }

    void fill(E value) { std::fill(data_.begin(), data_.end(), value); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<E> data_;
};

template <typename T>
using RealMatrix = Matrix<T>;

template <typename T>
using ComplexMatrix = Matrix<Complex<T>>;

inline void require_shape(bool ok, const std::string& what) {
    if (!ok) throw ShapeError(what);
}

/// out = a * b. Loop order i-k-j keeps the inner loop contiguous.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
    require_shape(a.cols() == b.rows(), "matmul: inner dimensions differ (" +
                                            std::to_string(a.cols()) + " vs " +
                                            std::to_string(b.rows()) + ")");
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{0}) continue;
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

/// Row vector times matrix: out = x * w.
template <typename T>
std::vector<T> vecmat(std::span<const T> x, const Matrix<T>& w) {
    require_shape(x.size() == w.rows(), "vecmat: length " + std::to_string(x.size()) +
                                            " vs rows " + std::to_string(w.rows()));
    std::vector<T> out(w.cols(), T{0});
    for (std::size_t k = 0; k < w.rows(); ++k) {
        const T xk = x[k];
        auto w_row = w.row(k);
        for (std::size_t j = 0; j < w.cols(); ++j) out[j] += xk * w_row[j];
    }
    return out;
}

/// Columns [first, first+count) of m.
template <typename E>
Matrix<E> column_block(const Matrix<E>& m, std::size_t first, std::size_t count) {
    require_shape(first + count <= m.cols(), "column_block out of range");
    Matrix<E> out(m.rows(), count);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::copy_n(m.row(r).begin() + static_cast<std::ptrdiff_t>(first), count, out.row(r).begin());
    }
    return out;
}

template <typename E>
void set_column_block(Matrix<E>& dst, std::size_t first, const Matrix<E>& src) {
    require_shape(dst.rows() == src.rows() && first + src.cols() <= dst.cols(),
                  "set_column_block shape mismatch");
    for (std::size_t r = 0; r < src.rows(); ++r) {
        std::copy(src.row(r).begin(), src.row(r).end(),
                  dst.row(r).begin() + static_cast<std::ptrdiff_t>(first));
    }
}

/// Rows [first, first+count) of m.
template <typename E>
Matrix<E> row_block(const Matrix<E>& m, std::size_t first, std::size_t count) {
    require_shape(first + count <= m.rows(), "row_block out of range");
    Matrix<E> out(count, m.cols());
    std::copy_n(m.data() + first * m.cols(), count * m.cols(), out.data());
    return out;
}

/// Zero-pads (or truncates) to `rows` rows.
template <typename E>
Matrix<E> resize_rows(const Matrix<E>& m, std::size_t rows) {
    Matrix<E> out(rows, m.cols());
    std::copy_n(m.data(), std::min(rows, m.rows()) * m.cols(), out.data());
    return out;
}

template <typename To, typename From>
Matrix<To> cast(const Matrix<From>& m) {
    Matrix<To> out(m.rows(), m.cols());
    std::transform(m.data(), m.data() + m.size(), out.data(),
                   [](const From& v) { return static_cast<To>(v); });
    return out;
}

template <typename E>
double max_abs_diff(const Matrix<E>& a, const Matrix<E>& b) {
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
    }
    return worst;
}

template <typename E>
bool all_finite(const Matrix<E>& m) {
    return std::all_of(m.data(), m.data() + m.size(), [](const E& v) {
        if constexpr (std::is_arithmetic_v<E>) {
            return std::isfinite(v);
        } else {
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        }
    });
}

}  // namespace spectre
