#pragma once

#include "lwo/bigint.hpp"
#include "lwo/rational.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace lwo {

/// Dense row-major matrix of arbitrary-precision integers.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols);
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const BigInt> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    const std::vector<BigInt>& data() const { return data_; }

    bool is_zero() const;

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<BigInt> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);

// Fraction-free (Bareiss) determinant. Pivot: first nonzero entry in the column.
BigInt det_exact(const IntMatrix& m);

// Rank over Q.
std::size_t rank_exact(const IntMatrix& m);

struct NoSolution {
    friend bool operator==(NoSolution, NoSolution) { return true; }
};
struct Underdetermined {
    friend bool operator==(Underdetermined, Underdetermined) { return true; }
};

using SolveResult = std::variant<std::vector<Rational>, NoSolution, Underdetermined>;

// Solves a·x = b exactly. Singular systems are classified by comparing
// rank(a) with rank([a | b]).
SolveResult solve_rational(const IntMatrix& a, std::span<const BigInt> b);

}  // namespace lwo
