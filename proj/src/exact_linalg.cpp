#include "lwo/exact_linalg.hpp"

#include "lwo/detail/bareiss.hpp"
#include "lwo/error.hpp"

#include <string>

namespace lwo {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("ragged matrix literal");
        }
        for (long v : r) {
            data_.emplace_back(v);
        }
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1;
    }
    return m;
}

bool IntMatrix::is_zero() const {
    for (const auto& x : data_) {
        if (sgn(x) != 0) {
            return false;
        }
    }
    return true;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix product: inner dimensions differ");
    }
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (sgn(a(i, k)) == 0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return c;
}

BigInt det_exact(const IntMatrix& m) {
    if (!m.is_square()) {
        throw DimensionError("det_exact: matrix is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    if (m.rows() == 0) {
        return BigInt(1);
    }
    std::vector<BigInt> work = m.data();
    BigInt det;
    detail::bareiss(work, m.rows(), m.cols(), &det);
    return det;
}

std::size_t rank_exact(const IntMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return 0;
    }
    std::vector<BigInt> work = m.data();
    return detail::bareiss(work, m.rows(), m.cols());
}

SolveResult solve_rational(const IntMatrix& a, std::span<const BigInt> b) {
    if (!a.is_square()) {
        throw DimensionError("solve_rational: coefficient matrix must be square");
    }
    const std::size_t n = a.rows();
    if (b.size() != n) {
        throw DimensionError("solve_rational: right-hand side has length " +
                             std::to_string(b.size()) + ", expected " + std::to_string(n));
    }
    if (n == 0) {
        return std::vector<Rational>{};
    }
    // Fraction-free elimination on the augmented matrix [a | b].
    const std::size_t cols = n + 1;
    std::vector<BigInt> aug(n * cols);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug[i * cols + j] = a(i, j);
        }
        aug[i * cols + n] = b[i];
    }
    std::vector<BigInt> coeff = a.data();
    const std::size_t rank_a = detail::bareiss(coeff, n, n);
    if (rank_a < n) {
        const std::size_t rank_aug = detail::bareiss(aug, n, cols);
        if (rank_aug > rank_a) {
            return NoSolution{};
        }
        return Underdetermined{};
    }
    detail::bareiss(aug, n, cols);
    // Upper triangular now; back substitution in rationals.
    std::vector<Rational> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Rational acc(aug[ii * cols + n]);
        for (std::size_t j = ii + 1; j < n; ++j) {
            acc -= Rational(aug[ii * cols + j]) * x[j];
        }
        x[ii] = acc / Rational(aug[ii * cols + ii]);
    }
    return x;
}

}  // namespace lwo
