#pragma once

#include <array>
#include <compare>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>

namespace tether {

/// Multi-index (i_1, ..., i_n) with n in {1, 2, 3}.
class MultiIndex {
public:
    static constexpr int max_dimension = 3;

    MultiIndex() = default;
    /// The dimension is the number of entries.
    MultiIndex(std::initializer_list<int> entries);
    static MultiIndex zero(int dimension);
    /// Unit vector e_k (k is zero-based).
    static MultiIndex unit(int dimension, int k);

    int dimension() const noexcept { return dim_; }
    int operator[](int k) const { return i_.at(static_cast<std::size_t>(k)); }
    int order() const noexcept;
    double factorial() const noexcept;

    /// Copy with entry k changed by `delta`; throws if it would turn negative.
    MultiIndex shifted(int k, int delta) const;
    MultiIndex operator+(const MultiIndex& other) const;

    std::string to_string() const;

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    int dim_ = 1;
    std::array<int, max_dimension> i_{};
};

/// Probabilists' Hermite polynomial He_j(s) by the three-term recurrence.
double hermite_1d(int j, double s);

/// Tensor Hermite polynomial H_i(sigma) = prod_k He_{i_k}(sigma_k).
double hermite_eval(const MultiIndex& i, std::span<const double> sigma);

/// Finite linear combination of basis functions labelled by multi-indices.
/// The same container holds Hermite expansions and monomial polynomials.
template <class Tag>
class IndexedSum {
public:
    explicit IndexedSum(int dimension = 1);
    IndexedSum(int dimension, std::initializer_list<std::pair<MultiIndex, double>> terms);

    int dimension() const noexcept { return dim_; }
    const std::map<MultiIndex, double>& terms() const noexcept { return terms_; }
    double coefficient(const MultiIndex& i) const;
    void add(const MultiIndex& i, double c);
    /// Largest |i| with a non-zero coefficient (-1 for the zero element).
    int degree() const noexcept;
    double max_abs() const noexcept;
    /// Removes coefficients with |c| <= tol.
    void prune(double tol = 0.0);

    IndexedSum& operator+=(const IndexedSum& other);
    IndexedSum& operator-=(const IndexedSum& other);
    IndexedSum& operator*=(double s);
    friend IndexedSum operator+(IndexedSum a, const IndexedSum& b) { return a += b; }
    friend IndexedSum operator-(IndexedSum a, const IndexedSum& b) { return a -= b; }
    friend IndexedSum operator*(double s, IndexedSum a) { return a *= s; }

private:
    int dim_;
    std::map<MultiIndex, double> terms_;
};

struct HermiteTag {};
struct MonomialTag {};
using HermiteExpansion = IndexedSum<HermiteTag>;
/// Polynomial sum c_i sigma^i.
using Polynomial = IndexedSum<MonomialTag>;

extern template class IndexedSum<HermiteTag>;
extern template class IndexedSum<MonomialTag>;

double evaluate(const HermiteExpansion& h, std::span<const double> sigma);
double evaluate(const Polynomial& p, std::span<const double> sigma);

/// Exact change of basis between monomials and Hermite polynomials.
HermiteExpansion to_hermite(const Polynomial& p);
Polynomial to_polynomial(const HermiteExpansion& h);

Polynomial multiply(const Polynomial& a, const Polynomial& b);

/// sigma_k * h, using sigma He_n = He_{n+1} + n He_{n-1} in coordinate k.
HermiteExpansion multiply_sigma(const HermiteExpansion& h, int k);
/// d/d sigma_k of h, using He_n' = n He_{n-1}.
HermiteExpansion derivative_sigma(const HermiteExpansion& h, int k);

/// Ornstein-Uhlenbeck generator B h = Lap h - sigma . grad h; diagonal in
/// the Hermite basis with eigenvalue -|i|.
HermiteExpansion apply_B(const HermiteExpansion& h);

/// B f at one point by fourth-order central differences with step `step`
/// (exact up to rounding for polynomials of degree <= 5).
double apply_B_fd(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> sigma, double step = 1e-2);

/// H_i * H_j for |i| = 1 and |j| in {1, 2} (either order). Other order
/// combinations throw.
HermiteExpansion hermite_product(const MultiIndex& i, const MultiIndex& j);

/// int f g M_1 d sigma by a tensor Gauss-Hermite rule with `order` points
/// per axis. `degree` is the total polynomial degree of f * g; the rule is
/// exact up to degree 2 order - 1 and a higher degree throws.
double weighted_inner_product(const std::function<double(std::span<const double>)>& f,
                              const std::function<double(std::span<const double>)>& g,
                              int dimension, int degree, int order);
/// Same for two expansions, with the order chosen from their degrees.
double weighted_inner_product(const HermiteExpansion& f, const HermiteExpansion& g);

}  // namespace tether
