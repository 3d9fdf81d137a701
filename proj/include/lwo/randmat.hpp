#pragma once

#include "lwo/rational.hpp"
#include "lwo/walk.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lwo {

/// n x n matrix whose first n - l rows are i.i.d. lazy-sign entries and whose
/// last l rows are the given fixed vectors.
struct MatrixSample {
    std::size_t n = 0;
    Rational mu{1};
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::vector<std::vector<std::int64_t>> fixed_rows;
    std::vector<std::int64_t> entries;  // row-major

    std::int64_t at(std::size_t r, std::size_t c) const { return entries[r * n + c]; }
    static MatrixSample from_rows(const std::vector<std::vector<std::int64_t>>& rows);
};

// Entry stream: u = mix(mix(mix(seed) ^ trial) ^ index) with the splitmix64
// finaliser, index = row * n + col. The entry is 0 when
// u < floor((1 - mu) 2^64), otherwise -1 on the lower and +1 on the upper half
// of the remaining range.
std::uint64_t entry_bits(std::uint64_t seed, std::uint64_t trial, std::uint64_t index);

MatrixSample sample_matrix(std::size_t n, const WalkParams& p, std::uint64_t seed,
                           const std::vector<std::vector<std::int64_t>>& fixed_rows = {}, std::uint64_t trial = 0);

bool is_singular_exact(const MatrixSample& m);

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double low, double high)
        : std::runtime_error(what), low_(low), high_(high) {}
    double low() const { return low_; }
    double high() const { return high_; }

private:
    double low_;
    double high_;
};

struct SpectralOptions {
    std::size_t max_iterations = 20'000;
};

double smallest_singular_value(const MatrixSample& m, double tol, const SpectralOptions& opts = {});
double largest_singular_value(const MatrixSample& m, double tol, const SpectralOptions& opts = {});
// sigma_1 / sigma_n, +infinity for singular matrices.
double condition_number(const MatrixSample& m, double tol, const SpectralOptions& opts = {});

struct SpectralSummary {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    double cond = std::numeric_limits<double>::infinity();
    bool singular_exact = false;
};

SpectralSummary spectral_summary(const MatrixSample& m, double tol, const SpectralOptions& opts = {});

// Exact P(M singular) by enumerating all 3^(n^2) patterns; n <= 3.
Rational brute_force_singularity(std::size_t n, const WalkParams& p);

struct Comparator {
    std::string name;
    double value = 0.0;
};

struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
    double delta_mu = 0.0;  // max(1 - mu, mu / 2)
    std::vector<Comparator> comparators;
};

// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials);

double delta_mu(const WalkParams& p);

McEstimate mc_singularity(std::size_t n, const WalkParams& p, std::uint64_t trials, std::uint64_t seed,
                          const std::vector<std::vector<std::int64_t>>& fixed_rows = {}, unsigned threads = 1);

// sigma_n of every trial (0 for exactly singular samples), in trial order.
std::vector<double> sigma_min_samples(std::size_t n, const WalkParams& p, std::uint64_t trials, std::uint64_t seed,
                                      double tol = 1e-10, unsigned threads = 1);

McEstimate tail_estimate(const std::vector<double>& sigmas, std::size_t n, double b_exponent, std::uint64_t seed);

// P(sigma_n <= n^-B); exactly singular samples always count.
McEstimate mc_sigma_tail(std::size_t n, const WalkParams& p, double b_exponent, std::uint64_t trials,
                         std::uint64_t seed, unsigned threads = 1);

}  // namespace lwo
