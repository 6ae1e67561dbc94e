#include "tether/asymptotics/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tether/core/error.hpp"
#include "tether/core/quadrature.hpp"

namespace tether {

namespace {

void check_dimension(int dim) {
    if (dim < 1 || dim > MultiIndex::max_dimension)
        throw Error("multi-index dimension must be 1, 2 or 3");
}

void check_sigma(int dim, std::span<const double> sigma) {
    if (sigma.size() < static_cast<std::size_t>(dim))
        throw Error("sigma has fewer components than the expansion dimension");
}

double factorial_int(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Monomial coefficients of He_n, lowest power first.
std::vector<double> hermite_coefficients(int n) {
    std::vector<double> prev{1.0};
    if (n == 0) return prev;
    std::vector<double> cur{0.0, 1.0};
    for (int j = 1; j < n; ++j) {
        std::vector<double> next(static_cast<std::size_t>(j + 2), 0.0);
        for (std::size_t p = 0; p < cur.size(); ++p) next[p + 1] += cur[p];
        for (std::size_t p = 0; p < prev.size(); ++p) next[p] -= j * prev[p];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Recursively expands a tensor product of per-axis 1D expansions.
template <class Sum>
void tensor_expand(const std::vector<std::vector<std::pair<int, double>>>& axes, int axis,
                   std::array<int, 3>& idx, double c, Sum& out) {
    const int dim = static_cast<int>(axes.size());
    if (axis == dim) {
        MultiIndex m = MultiIndex::zero(dim);
        for (int k = 0; k < dim; ++k) m = m.shifted(k, idx[static_cast<std::size_t>(k)]);
        out.add(m, c);
        return;
    }
    for (const auto& [power, coef] : axes[static_cast<std::size_t>(axis)]) {
        idx[static_cast<std::size_t>(axis)] = power;
        tensor_expand(axes, axis + 1, idx, c * coef, out);
    }
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> entries) {
    dim_ = static_cast<int>(entries.size());
    check_dimension(dim_);
    std::size_t k = 0;
    for (int e : entries) {
        if (e < 0) throw Error("multi-index entries must be >= 0");
        i_[k++] = e;
    }
}

MultiIndex MultiIndex::zero(int dimension) {
    check_dimension(dimension);
    MultiIndex m;
    m.dim_ = dimension;
    return m;
}

MultiIndex MultiIndex::unit(int dimension, int k) {
    if (k < 0 || k >= dimension) throw Error("unit multi-index: axis out of range");
    return zero(dimension).shifted(k, 1);
}

int MultiIndex::order() const noexcept {
    int s = 0;
    for (int k = 0; k < dim_; ++k) s += i_[static_cast<std::size_t>(k)];
    return s;
}

double MultiIndex::factorial() const noexcept {
    double f = 1.0;
    for (int k = 0; k < dim_; ++k) f *= factorial_int(i_[static_cast<std::size_t>(k)]);
    return f;
}

MultiIndex MultiIndex::shifted(int k, int delta) const {
    if (k < 0 || k >= dim_) throw Error("multi-index axis out of range");
    MultiIndex m = *this;
    auto& e = m.i_[static_cast<std::size_t>(k)];
    if (e + delta < 0) throw Error("multi-index entry would be negative");
    e += delta;
    return m;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (other.dim_ != dim_) throw Error("multi-index dimension mismatch");
    MultiIndex m = *this;
    for (std::size_t k = 0; k < m.i_.size(); ++k) m.i_[k] += other.i_[k];
    return m;
}

std::string MultiIndex::to_string() const {
    std::string s = "(";
    for (int k = 0; k < dim_; ++k) {
        if (k) s += ",";
        s += std::to_string(i_[static_cast<std::size_t>(k)]);
    }
    return s + ")";
}

double hermite_1d(int j, double s) {
    if (j < 0) throw Error("Hermite degree must be >= 0");
    if (j == 0) return 1.0;
    double prev = 1.0;
    double cur = s;
    for (int k = 1; k < j; ++k) {
        const double next = s * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_eval(const MultiIndex& i, std::span<const double> sigma) {
    check_sigma(i.dimension(), sigma);
    double v = 1.0;
    for (int k = 0; k < i.dimension(); ++k) v *= hermite_1d(i[k], sigma[static_cast<std::size_t>(k)]);
    return v;
}

template <class Tag>
IndexedSum<Tag>::IndexedSum(int dimension) : dim_(dimension) {
    check_dimension(dimension);
}

template <class Tag>
IndexedSum<Tag>::IndexedSum(int dimension,
                            std::initializer_list<std::pair<MultiIndex, double>> terms)
    : IndexedSum(dimension) {
    for (const auto& [i, c] : terms) add(i, c);
}

template <class Tag>
double IndexedSum<Tag>::coefficient(const MultiIndex& i) const {
    const auto it = terms_.find(i);
    return it == terms_.end() ? 0.0 : it->second;
}

template <class Tag>
void IndexedSum<Tag>::add(const MultiIndex& i, double c) {
    if (i.dimension() != dim_) throw Error("expansion dimension mismatch");
    terms_[i] += c;
}

template <class Tag>
int IndexedSum<Tag>::degree() const noexcept {
    int d = -1;
    for (const auto& [i, c] : terms_)
        if (c != 0.0) d = std::max(d, i.order());
    return d;
}

template <class Tag>
double IndexedSum<Tag>::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& [i, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

template <class Tag>
void IndexedSum<Tag>::prune(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

template <class Tag>
IndexedSum<Tag>& IndexedSum<Tag>::operator+=(const IndexedSum& other) {
    for (const auto& [i, c] : other.terms_) add(i, c);
    return *this;
}

template <class Tag>
IndexedSum<Tag>& IndexedSum<Tag>::operator-=(const IndexedSum& other) {
    for (const auto& [i, c] : other.terms_) add(i, -c);
    return *this;
}

template <class Tag>
IndexedSum<Tag>& IndexedSum<Tag>::operator*=(double s) {
    for (auto& [i, c] : terms_) c *= s;
    return *this;
}

template class IndexedSum<HermiteTag>;
template class IndexedSum<MonomialTag>;

double evaluate(const HermiteExpansion& h, std::span<const double> sigma) {
    check_sigma(h.dimension(), sigma);
    double v = 0.0;
    for (const auto& [i, c] : h.terms()) v += c * hermite_eval(i, sigma);
    return v;
}

double evaluate(const Polynomial& p, std::span<const double> sigma) {
    check_sigma(p.dimension(), sigma);
    double v = 0.0;
    for (const auto& [i, c] : p.terms()) {
        double m = c;
        for (int k = 0; k < i.dimension(); ++k) m *= std::pow(sigma[static_cast<std::size_t>(k)], i[k]);
        v += m;
    }
    return v;
}

HermiteExpansion to_hermite(const Polynomial& p) {
    HermiteExpansion out(p.dimension());
    const int dim = p.dimension();
    for (const auto& [a, c] : p.terms()) {
        // s^n = sum_m n! / (2^m m! (n - 2m)!) He_{n - 2m}
        std::vector<std::vector<std::pair<int, double>>> axes(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            const int n = a[k];
            for (int m = 0; 2 * m <= n; ++m) {
                const double w = factorial_int(n) /
                                 (std::ldexp(1.0, m) * factorial_int(m) * factorial_int(n - 2 * m));
                axes[static_cast<std::size_t>(k)].emplace_back(n - 2 * m, w);
            }
        }
        std::array<int, 3> idx{};
        tensor_expand(axes, 0, idx, c, out);
    }
    return out;
}

Polynomial to_polynomial(const HermiteExpansion& h) {
    Polynomial out(h.dimension());
    const int dim = h.dimension();
    for (const auto& [i, c] : h.terms()) {
        std::vector<std::vector<std::pair<int, double>>> axes(static_cast<std::size_t>(dim));
        for (int k = 0; k < dim; ++k) {
            const auto coef = hermite_coefficients(i[k]);
            for (std::size_t p = 0; p < coef.size(); ++p)
                if (coef[p] != 0.0) axes[static_cast<std::size_t>(k)].emplace_back(static_cast<int>(p), coef[p]);
        }
        std::array<int, 3> idx{};
        tensor_expand(axes, 0, idx, c, out);
    }
    return out;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
    if (a.dimension() != b.dimension()) throw Error("polynomial dimension mismatch");
    Polynomial out(a.dimension());
    for (const auto& [i, ci] : a.terms())
        for (const auto& [j, cj] : b.terms()) out.add(i + j, ci * cj);
    return out;
}

HermiteExpansion multiply_sigma(const HermiteExpansion& h, int k) {
    if (k < 0 || k >= h.dimension()) throw Error("sigma component out of range");
    HermiteExpansion out(h.dimension());
    for (const auto& [i, c] : h.terms()) {
        out.add(i.shifted(k, 1), c);
        if (i[k] > 0) out.add(i.shifted(k, -1), c * i[k]);
    }
    return out;
}

HermiteExpansion derivative_sigma(const HermiteExpansion& h, int k) {
    if (k < 0 || k >= h.dimension()) throw Error("sigma component out of range");
    HermiteExpansion out(h.dimension());
    for (const auto& [i, c] : h.terms())
        if (i[k] > 0) out.add(i.shifted(k, -1), c * i[k]);
    return out;
}

HermiteExpansion apply_B(const HermiteExpansion& h) {
    HermiteExpansion out(h.dimension());
    for (const auto& [i, c] : h.terms()) out.add(i, -static_cast<double>(i.order()) * c);
    return out;
}

double apply_B_fd(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> sigma, double step) {
    if (!(step > 0.0)) throw Error("finite-difference step must be > 0");
    std::vector<double> s(sigma.begin(), sigma.end());
    const double f0 = f(s);
    double out = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const double base = s[k];
        auto at = [&](double off) {
            s[k] = base + off * step;
            const double v = f(s);
            s[k] = base;
            return v;
        };
        const double p1 = at(1.0), m1 = at(-1.0), p2 = at(2.0), m2 = at(-2.0);
        const double d2 = (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * step * step);
        const double d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * step);
        out += d2 - base * d1;
    }
    return out;
}

HermiteExpansion hermite_product(const MultiIndex& i, const MultiIndex& j) {
    if (i.dimension() != j.dimension()) throw Error("hermite_product: dimension mismatch");
    const MultiIndex* first = &i;
    const MultiIndex* other = &j;
    if (i.order() != 1) std::swap(first, other);
    if (first->order() != 1 || other->order() < 1 || other->order() > 2)
        throw Error("hermite_product supports first-order times first- or second-order factors only");
    int k = 0;
    while ((*first)[k] == 0) ++k;
    // H_{e_k} H_j = H_{j + e_k} + j_k H_{j - e_k}
    HermiteExpansion out(i.dimension());
    out.add(other->shifted(k, 1), 1.0);
    if ((*other)[k] > 0) out.add(other->shifted(k, -1), (*other)[k]);
    return out;
}

double weighted_inner_product(const std::function<double(std::span<const double>)>& f,
                              const std::function<double(std::span<const double>)>& g,
                              int dimension, int degree, int order) {
    check_dimension(dimension);
    if (order < 1) throw Error("quadrature order must be >= 1");
    if (degree < 0) throw Error("polynomial degree must be >= 0");
    if (degree > 2 * order - 1)
        throw Error("quadrature order " + std::to_string(order) + " is too low for degree " +
                    std::to_string(degree));
    const auto rule = gauss_hermite_probabilist(order);
    const auto n = static_cast<std::size_t>(order);
    std::size_t total = 1;
    for (int d = 0; d < dimension; ++d) total *= n;
    std::vector<double> s(static_cast<std::size_t>(dimension));
    double sum = 0.0;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double w = 1.0;
        for (std::size_t d = 0; d < s.size(); ++d) {
            const std::size_t q = rem % n;
            rem /= n;
            s[d] = rule.nodes[q];
            w *= rule.weights[q];
        }
        sum += w * f(s) * g(s);
    }
    return sum;
}

double weighted_inner_product(const HermiteExpansion& f, const HermiteExpansion& g) {
    if (f.dimension() != g.dimension()) throw Error("inner product: dimension mismatch");
    const int degree = std::max(0, f.degree()) + std::max(0, g.degree());
    const int order = degree / 2 + 1;
    return weighted_inner_product([&](std::span<const double> s) { return evaluate(f, s); },
                                  [&](std::span<const double> s) { return evaluate(g, s); },
                                  f.dimension(), degree, order);
}

}  // namespace tether
