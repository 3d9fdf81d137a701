#pragma once

#include "lwo/multiset.hpp"
#include "lwo/rational.hpp"

#include <cstdint>
#include <vector>

namespace lwo {

/// Laziness parameter of the step variable: 0 with probability 1-mu and +-1
/// with probability mu/2 each.
class WalkParams {
public:
    explicit WalkParams(Rational mu);
    const Rational& mu() const { return mu_; }

private:
    Rational mu_;
};

struct Atom {
    std::int64_t value;
    Rational prob;
    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite law on the integers with exact rational point masses, sorted by
/// value. Every stored probability is positive and the total is exactly 1.
class Distribution {
public:
    Distribution() = default;
    explicit Distribution(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    Rational at(std::int64_t value) const;
    Rational total() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<Atom> atoms_;
};

struct ConcentrationResult {
    std::int64_t best_atom = 0;
    Rational probability;
};

struct WalkOptions {
    // Refuse inputs with sum |v_i| above this many atoms.
    std::uint64_t support_cap = 10'000'000;
    // Convolve a value of multiplicity m in one pass with the closed-form
    // m-step kernel instead of m three-point convolutions.
    bool merge_repeats = true;
};

/// Integer-weight form of the law: P(Y = value) = weight / denominator.
/// Cheaper than Distribution when only a few atoms are inspected.
struct WeightedLaw {
    std::vector<std::pair<std::int64_t, BigInt>> atoms;  // ascending, weights > 0
    BigInt denominator{1};
};

WeightedLaw weighted_law(const Multiset& v, const WalkParams& p, const WalkOptions& opts = {});

Distribution exact_distribution(const Multiset& v, const WalkParams& p, const WalkOptions& opts = {});

// Largest point mass; ties go to the smallest |a|, then to a >= 0.
ConcentrationResult concentration(const Multiset& v, const WalkParams& p, const WalkOptions& opts = {});

// P(eta_1 + ... + eta_m = a) from the binomial closed form.
Rational equal_steps_atom(std::uint64_t m, const WalkParams& p, const BigInt& a);

struct FourierEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

// Composite midpoint rule for int_0^1 prod_j (1-mu+mu cos(2 pi v_j xi)) dxi,
// which equals P(Y = 0) when mu <= 1/2. The bound is L/(4*grid) with the
// Lipschitz constant L = 2 pi mu sum |v_j|.
FourierEstimate fourier_estimate(const Multiset& v, const WalkParams& p, std::size_t grid);

double halasz_factor(const Multiset& v, const WalkParams& p, double xi);

}  // namespace lwo
