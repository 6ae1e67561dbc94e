#include "tether/asymptotics/h_solutions.hpp"

#include <algorithm>
#include <cmath>

#include "tether/core/error.hpp"

namespace tether {

namespace {

using MI = MultiIndex;

MI e(int n, int k) { return MI::unit(n, k); }

/// grad_sigma h - sigma h, component j.
HermiteExpansion drift(const HermiteExpansion& h, int j) {
    return derivative_sigma(h, j) - multiply_sigma(h, j);
}

Polynomial monomial(int n, std::initializer_list<int> axes, double c) {
    MI m = MI::zero(n);
    for (int k : axes) m = m.shifted(k, 1);
    return Polynomial(n, {{m, c}});
}

}  // namespace

HSolutions build_h_solutions(const VelocityJet& jet, int n) {
    HSolutions h;
    for (auto& x : h.h1) x = HermiteExpansion(n);
    for (auto& x : h.h2) x = HermiteExpansion(n);
    const auto& v = jet.v;
    const auto& dv = jet.dv;
    const auto& d2v = jet.d2v;
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        h.h1[0].add(e(n, i), v[ui]);
        for (int k = 0; k < n; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            h.h1[1].add(e(n, k) + e(n, i), 0.5 * dv[uk][ui]);
            h.h1[2].add(e(n, k), 0.5 * d2v[uk][ui][ui]);
            h.h2[0].add(e(n, k) + e(n, i), 0.5 * v[uk] * v[ui]);
            h.h2[1].add(e(n, k), v[ui] * dv[ui][uk]);
            for (int j = 0; j < n; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                h.h1[2].add(e(n, k) + e(n, i) + e(n, j), d2v[uk][ui][uj] / 6.0);
                h.h2[1].add(e(n, k) + e(n, i) + e(n, j), 0.5 * v[ui] * dv[uk][uj]);
            }
        }
        h.h2[1].add(e(n, i), -jet.dt_v[ui]);
    }
    for (auto& x : h.h1) x.prune();
    for (auto& x : h.h2) x.prune();
    return h;
}

HSolutions h_solution_rhs(const VelocityJet& jet, int n) {
    const auto& v = jet.v;
    const auto& dv = jet.dv;
    const auto& d2v = jet.d2v;

    // First order: monomials in sigma, converted to the Hermite basis.
    Polynomial f10(n), f11(n), f12(n);
    for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        f10 += monomial(n, {k}, -v[uk]);
        f11 += monomial(n, {}, dv[uk][uk]);
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            f11 += monomial(n, {k, i}, -dv[uk][ui]);
            f12 += monomial(n, {k}, d2v[ui][uk][ui]);
            for (int j = 0; j < n; ++j)
                f12 += monomial(n, {k, i, j}, -0.5 * d2v[uk][ui][static_cast<std::size_t>(j)]);
        }
    }

    HSolutions rhs;
    rhs.h1 = {to_hermite(f10), to_hermite(f11), to_hermite(f12)};

    // Second order: built from the first-order solutions by Hermite algebra.
    const HSolutions sol = build_h_solutions(jet, n);
    const auto& h10 = sol.h1[0];
    const auto& h11 = sol.h1[1];
    HermiteExpansion f20(n), f21(n);
    double div = 0.0;
    for (int k = 0; k < n; ++k) div += dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
    for (int j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const HermiteExpansion d0 = drift(h10, j);
        f20 += v[uj] * d0;
        f21 += v[uj] * drift(h11, j);
        // (sigma_k d_k v_j) (d_j h1^0 - sigma_j h1^0)
        for (int k = 0; k < n; ++k)
            f21 += dv[static_cast<std::size_t>(k)][uj] * multiply_sigma(d0, k);
        f21.add(e(n, j), jet.dt_v[uj]);
    }
    f21 += div * h10;
    rhs.h2 = {f20, f21};
    for (auto& x : rhs.h1) x.prune();
    for (auto& x : rhs.h2) x.prune();
    return rhs;
}

double HResiduals::max_coefficient() const noexcept {
    return *std::max_element(coefficient.begin(), coefficient.end());
}

bool parity_rule_holds(const HermiteExpansion& h, int order_gamma, int k) {
    const int max_order = k + order_gamma;
    for (const auto& [i, c] : h.terms()) {
        if (c == 0.0) continue;
        const int o = i.order();
        if (o > max_order) return false;
        const bool same_parity = (o % 2) == (k % 2);
        if (order_gamma == 1 && same_parity) return false;
        if (order_gamma == 2 && !same_parity) return false;
    }
    return true;
}

HResiduals h_solution_residuals(const ExternalVelocityField& field, std::span<const double> y,
                                double t) {
    const VelocityJet jet = field.jet(y, t);
    if (!jet.has_second) throw Error("h-solution residuals need second derivatives of the field");
    if (!jet.has_time) throw Error("h-solution residuals need the time derivative of the field");
    const int n = field.dimension();
    const HSolutions sol = build_h_solutions(jet, n);
    const HSolutions rhs = h_solution_rhs(jet, n);

    HResiduals out;
    std::array<const HermiteExpansion*, 5> hs{&sol.h1[0], &sol.h1[1], &sol.h1[2], &sol.h2[0], &sol.h2[1]};
    std::array<const HermiteExpansion*, 5> fs{&rhs.h1[0], &rhs.h1[1], &rhs.h1[2], &rhs.h2[0], &rhs.h2[1]};
    const HermiteExpansion one(n, {{MI::zero(n), 1.0}});
    for (std::size_t c = 0; c < hs.size(); ++c) {
        out.coefficient[c] = (apply_B(*hs[c]) - *fs[c]).max_abs();
        out.mean_coefficient = std::max(out.mean_coefficient, std::abs(hs[c]->coefficient(MI::zero(n))));
        out.mean_quadrature = std::max(out.mean_quadrature, std::abs(weighted_inner_product(one, *hs[c])));
    }
    for (int k = 0; k < 3; ++k) out.parity_ok = out.parity_ok && parity_rule_holds(sol.h1[static_cast<std::size_t>(k)], 1, k);
    for (int k = 0; k < 2; ++k) out.parity_ok = out.parity_ok && parity_rule_holds(sol.h2[static_cast<std::size_t>(k)], 2, k);
    return out;
}

}  // namespace tether
