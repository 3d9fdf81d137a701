#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace lwo::detail {

// In-place fraction-free elimination on a rows x cols row-major buffer.
// Works for any exact integer type T where every Bareiss intermediate (a
// 2x2 cross product of minors) fits. Returns the rank; when `det` is non-null
// and the matrix is square it receives the determinant.
template <class T>
std::size_t bareiss(std::vector<T>& a, std::size_t rows, std::size_t cols, T* det = nullptr) {
    auto at = [&](std::size_t r, std::size_t c) -> T& { return a[r * cols + c]; };
    T prev = T(1);
    bool negate = false;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && at(pivot, col) == T(0)) {
            ++pivot;
        }
        if (pivot == rows) {
            continue;
        }
        if (pivot != rank) {
            for (std::size_t c = 0; c < cols; ++c) {
                std::swap(at(pivot, c), at(rank, c));
            }
            negate = !negate;
        }
        const T p = at(rank, col);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const T f = at(r, col);
            for (std::size_t c = col + 1; c < cols; ++c) {
                at(r, c) = (p * at(r, c) - f * at(rank, c)) / prev;
            }
            at(r, col) = T(0);
        }
        prev = p;
        ++rank;
    }
    if (det != nullptr) {
        if (rows != cols || rank < rows) {
            *det = T(0);
        } else {
            *det = negate ? T(0) - prev : prev;
        }
    }
    return rank;
}

}  // namespace lwo::detail
