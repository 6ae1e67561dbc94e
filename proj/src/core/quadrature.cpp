#include "tether/core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "tether/core/error.hpp"

namespace tether {

namespace {

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
/// mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(int n, double mu0, const std::function<double(int)>& off_diagonal) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int j = 1; j < n; ++j) {
        J(j, j - 1) = off_diagonal(j);
        J(j - 1, j) = J(j, j - 1);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v * v;
    }
    return rule;
}

const QuadratureRule& cached_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
    return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw Error("quadrature order must be positive");
    return golub_welsch(n, 2.0, [](int j) {
        const double jj = j;
        return jj / std::sqrt(4.0 * jj * jj - 1.0);
    });
}

QuadratureRule gauss_hermite_probabilist(int n) {
    if (n < 1) throw Error("quadrature order must be positive");
    return golub_welsch(n, 1.0, [](int j) { return std::sqrt(static_cast<double>(j)); });
}

double integrate_piecewise(const std::function<double(double)>& f, double lo, double hi,
                           std::vector<double> breakpoints, int order) {
    if (!(hi > lo)) return 0.0;
    breakpoints.push_back(lo);
    breakpoints.push_back(hi);
    std::erase_if(breakpoints, [&](double b) { return b < lo || b > hi; });
    std::sort(breakpoints.begin(), breakpoints.end());
    const QuadratureRule& rule = cached_legendre(order);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        if (!(b > a)) continue;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            s += rule.weights[q] * f(mid + half * rule.nodes[q]);
        total += half * s;
    }
    return total;
}

}  // namespace tether
