#pragma once

#include <vector>

#include "camel/errors.hpp"

namespace camel {

// Dense row-major matrix. Rows are samples, columns are features.
template <typename T>
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), T(0)) {}
    Matrix(int r, int c, std::vector<T> d) : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != static_cast<size_t>(r) * static_cast<size_t>(c))
            throw InputError("matrix: data size does not match dimensions");
    }

    T& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const T& operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    T* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
    const T* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

    size_t size() const { return data.size(); }
    void fill(T v) { std::fill(data.begin(), data.end(), v); }
};

}  // namespace camel
