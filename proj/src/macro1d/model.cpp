#include "tether/macro1d/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tether/core/csv.hpp"
#include "tether/core/domain.hpp"
#include "tether/core/error.hpp"
#include "tether/core/finite_difference.hpp"

namespace tether {

std::string_view to_string(ClosureOrder order) noexcept {
    return order == ClosureOrder::Gamma1 ? "gamma1" : "gamma2";
}

ClosureOrder closure_order_from_string(std::string_view name) {
    if (name == "gamma1") return ClosureOrder::Gamma1;
    if (name == "gamma2") return ClosureOrder::Gamma2;
    throw Error("unknown closure order '" + std::string(name) + "'");
}

void MacroParams::validate() const {
    if (!(zeta > 0.0)) throw Error("zeta must be positive");
    if (!(eta > 0.0)) throw Error("eta must be positive");
    if (!(mu >= 0.0)) throw Error("mu must be non-negative");
    if (!(gamma >= 0.0)) throw Error("gamma must be non-negative");
    if (!(delta >= 0.0)) throw Error("delta must be non-negative");
    if (!(rho0 > 0.0)) throw Error("rho0 must be positive");
    if (!std::isfinite(c1)) throw Error("c1 must be finite");
    kernel.validate();
    if (kernel.dimension != 1) throw Error("macro model needs a 1D kernel");
}

ClosureDiagnostics diagnose_obstacle_density(const DensityField& rho_f) {
    ClosureDiagnostics d;
    d.min_rho_f = rho_f.min();
    for (double v : rho_f.values())
        if (v < 0.0) ++d.negative_cells;
    return d;
}

MacroOperator::MacroOperator(const MacroParams& params, const Grid1D& grid)
    : params_(params), grid_(grid), fft_(std::make_shared<RealFft>(grid.size())) {
    params_.validate();
    const std::size_t n = grid.size();
    const double dx = grid.dx();
    // Periodise the kernel so supports wider than half the domain wrap correctly.
    const KernelSpec& k = params_.kernel;
    const int images = k.family == KernelFamily::QuadraticCompact
                           ? static_cast<int>(std::ceil(k.radius / grid.length()))
                           : 0;
    const auto samples = sample_kernel(grid, [&](double x) {
        double s = 0.0;
        for (int j = -images; j <= images; ++j) s += potential(k, x + j * grid.length());
        return s;
    });
    const auto spec = fft_->forward(samples);
    const std::size_t ns = fft_->spectrum_size();
    k_hat_.resize(ns);
    lambda_.resize(ns);
    first_order_.resize(ns);
    time_term_.resize(ns);
    const double g = params_.gamma, eta = params_.eta, delta = params_.delta;
    for (std::size_t m = 0; m < ns; ++m) {
        k_hat_[m] = spec[m].real() * dx;
        lambda_[m] = discrete_laplacian_symbol(m, n, dx);
        // -(gamma/(delta eta)) (1 - exp(-delta lambda)) -> -(gamma/eta) lambda as delta -> 0.
        const double smoothing = delta > 0.0 ? -std::expm1(-delta * lambda_[m]) / delta : lambda_[m];
        first_order_[m] = -(g / eta) * smoothing;
        // -(gamma^2/eta) d_xx -> +(gamma^2/eta) lambda.
        time_term_[m] = (g * g / eta) * lambda_[m];
    }
}

std::vector<double> MacroOperator::apply(const std::vector<double>& multiplier,
                                         std::span<const double> values) const {
    auto hat = fft_->forward(values);
    for (std::size_t m = 0; m < hat.size(); ++m) hat[m] *= multiplier[m];
    return fft_->inverse(hat);
}

DensityField MacroOperator::obstacle_deviation(const DensityField& rho_g,
                                               const DensityField* drho_dt) const {
    return obstacle_deviation(rho_g, params_.closure, drho_dt);
}

DensityField MacroOperator::obstacle_deviation(const DensityField& rho_g, ClosureOrder order,
                                               const DensityField* drho_dt) const {
    if (!(rho_g.grid() == grid_)) throw Error("macro operator: grid mismatch");
    std::vector<double> mult(k_hat_.size());
    if (order == ClosureOrder::Gamma1) {
        // The first-order closure is always taken at delta = 0.
        for (std::size_t m = 0; m < mult.size(); ++m)
            mult[m] = -(params_.gamma / params_.eta) * lambda_[m] * k_hat_[m];
        return DensityField(grid_, apply(mult, rho_g.values()));
    }
    for (std::size_t m = 0; m < mult.size(); ++m) mult[m] = first_order_[m] * k_hat_[m];
    auto dev = apply(mult, rho_g.values());
    if (drho_dt) {
        require_same_grid(rho_g, *drho_dt);
        for (std::size_t m = 0; m < mult.size(); ++m) mult[m] = time_term_[m] * k_hat_[m];
        const auto t = apply(mult, drho_dt->values());
        for (std::size_t i = 0; i < dev.size(); ++i) dev[i] += t[i];
    }
    return DensityField(grid_, std::move(dev));
}

std::vector<double> MacroOperator::smoothed_obstacle_deviation(const DensityField& rho_g,
                                                               const DensityField* drho_dt) const {
    // phi * dev composes the kernel twice, so the result depends on phi-hat^2
    // only and is exactly invariant under a sign flip of the kernel mass.
    std::vector<double> mult(k_hat_.size());
    const bool second = params_.closure == ClosureOrder::Gamma2;
    for (std::size_t m = 0; m < mult.size(); ++m) {
        const double k2 = k_hat_[m] * k_hat_[m];
        mult[m] = (second ? first_order_[m] : -(params_.gamma / params_.eta) * lambda_[m]) * k2;
    }
    auto out = apply(mult, rho_g.values());
    if (second && drho_dt) {
        for (std::size_t m = 0; m < mult.size(); ++m)
            mult[m] = time_term_[m] * k_hat_[m] * k_hat_[m];
        const auto t = apply(mult, drho_dt->values());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += t[i];
    }
    return out;
}

DensityField obstacle_density_gamma1(const DensityField& rho_g, const MacroParams& params) {
    const MacroOperator op(params, rho_g.grid());
    auto dev = op.obstacle_deviation(rho_g, ClosureOrder::Gamma1, nullptr);
    for (double& v : dev.values()) v += 1.0;
    return dev;
}

DensityField obstacle_density_gamma2(const DensityField& rho_g, const DensityField& drho_g_dt,
                                     const MacroParams& params) {
    const MacroOperator op(params, rho_g.grid());
    auto dev = op.obstacle_deviation(rho_g, ClosureOrder::Gamma2, &drho_g_dt);
    for (double& v : dev.values()) v += 1.0;
    return dev;
}

std::vector<double> face_velocities(const MacroOperator& op, const DensityField& rho_g,
                                    const DensityField* drho_dt) {
    const auto& p = op.params();
    const std::size_t n = rho_g.size();
    const double dx = rho_g.grid().dx();
    auto pi = op.smoothed_obstacle_deviation(rho_g, drho_dt);
    for (std::size_t i = 0; i < n; ++i) pi[i] += p.mu * rho_g[i];
    std::vector<double> u(n);
    const double scale = 1.0 / (p.zeta * dx);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        u[i] = p.c1 - (pi[ip] - pi[i]) * scale;
    }
    return u;
}

namespace {

/// Face flux F_{i+1/2} for face velocity u[i] between cells i and i+1.
std::vector<double> face_fluxes(const DensityField& rho, const std::vector<double>& u,
                                FluxScheme scheme) {
    const std::size_t n = rho.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        if (scheme == FluxScheme::Upwind)
            f[i] = std::max(u[i], 0.0) * rho[i] + std::min(u[i], 0.0) * rho[ip];
        else
            f[i] = u[i] * 0.5 * (rho[i] + rho[ip]);
    }
    return f;
}

DensityField flux_divergence(const DensityField& rho, const std::vector<double>& f) {
    const std::size_t n = rho.size();
    const double inv = 1.0 / rho.grid().dx();
    DensityField out(rho.grid());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        out[i] = -(f[i] - f[im]) * inv;
    }
    return out;
}

}  // namespace

DensityField macro_rhs(const MacroOperator& op, const DensityField& rho_g,
                       const DensityField* drho_dt, FluxScheme scheme) {
    return flux_divergence(rho_g, face_fluxes(rho_g, face_velocities(op, rho_g, drho_dt), scheme));
}

DensityField macro_rhs(const DensityField& rho_g, const MacroParams& params, FluxScheme scheme) {
    const MacroOperator op(params, rho_g.grid());
    return macro_rhs(op, rho_g, nullptr, scheme);
}

std::vector<double> discrete_macro_kernel(const KernelSpec& kernel, const Grid1D& grid) {
    const auto k = sample_kernel(grid, [&](double x) { return potential(kernel, x); });
    const DensityField kf(grid, k);
    const auto kk = convolve_periodic(kf, k);
    return second_difference_periodic(kk.values(), grid.dx());
}

DensityField gradient_flow_rhs(const DensityField& rho_g, const MacroParams& params,
                               std::span<const double> w_kernel) {
    const std::size_t n = rho_g.size();
    const double dx = rho_g.grid().dx();
    const auto wr = convolve_periodic(rho_g, w_kernel);
    std::vector<double> potential_field(n);
    for (std::size_t i = 0; i < n; ++i)
        potential_field[i] = params.mu * rho_g[i] + (params.gamma / params.eta) * wr[i];
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        const double grad = (potential_field[ip] - potential_field[i]) / dx;
        f[i] = 0.5 * (rho_g[i] + rho_g[ip]) * grad / params.zeta;
    }
    DensityField out(rho_g.grid());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        out[i] = (f[i] - f[im]) / dx;
    }
    return out;
}

DensityField centered_advection(const DensityField& rho_g, double c1) {
    const std::size_t n = rho_g.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = i + 1 == n ? 0 : i + 1;
        f[i] = c1 * 0.5 * (rho_g[i] + rho_g[ip]);
    }
    return flux_divergence(rho_g, f);
}

DensityField translate(const DensityField& field, double distance) {
    const std::size_t n = field.size();
    const double cells = wrap(distance, field.grid().length()) / field.grid().dx();
    double whole = std::floor(cells);
    double frac = cells - whole;
    std::size_t j = static_cast<std::size_t>(whole) % n;
    DensityField out(field.grid());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = (i + n - j) % n;
        const std::size_t b = (a + n - 1) % n;
        out[i] = frac == 0.0 ? field[a] : (1.0 - frac) * field[a] + frac * field[b];
    }
    return out;
}

DensityField lab_density(const MacroState& state) {
    if (state.shift == 0.0) return state.rho_g;
    return translate(state.rho_g, state.shift);
}

DensityField time_derivative_estimate(const MacroState& state) {
    DensityField d(state.rho_g.grid());
    if (!state.rho_g_prev || !(state.dt_prev > 0.0)) return d;
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = (state.rho_g[i] - (*state.rho_g_prev)[i]) / state.dt_prev;
    if (state.frame_velocity != 0.0) {
        // Lab d_t = frame d_t - v d_x (central difference).
        const std::size_t n = d.size();
        const double v = state.frame_velocity / (2.0 * state.rho_g.grid().dx());
        for (std::size_t i = 0; i < n; ++i)
            d[i] -= v * (state.rho_g[(i + 1) % n] - state.rho_g[(i + n - 1) % n]);
    }
    return d;
}

namespace {

/// Outflow rate per cell: (u+_{i+1/2} - u-_{i-1/2}) / dx. Returns the maximum
/// and the index of the limiting cell.
std::pair<double, std::size_t> max_outflow_rate(const std::vector<double>& u, double dx) {
    const std::size_t n = u.size();
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        const double r = (std::max(u[i], 0.0) - std::min(u[im], 0.0)) / dx;
        if (r > best) {
            best = r;
            arg = i;
        }
    }
    return {best, arg};
}

}  // namespace

std::vector<double> transport_velocities(const MacroOperator& op, const MacroState& state) {
    std::optional<DensityField> dt_est;
    if (op.params().closure == ClosureOrder::Gamma2) dt_est = time_derivative_estimate(state);
    auto u = face_velocities(op, state.rho_g, dt_est ? &*dt_est : nullptr);
    if (state.frame_velocity != 0.0)
        for (double& v : u) v -= state.frame_velocity;
    return u;
}

double max_stable_dt(const MacroOperator& op, const MacroState& state) {
    const auto u = transport_velocities(op, state);
    const double rate = max_outflow_rate(u, state.rho_g.grid().dx()).first;
    return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

MacroState macro_step(const MacroState& state, double dt, const MacroOperator& op) {
    if (!(dt > 0.0)) throw Error("macro_step: dt must be positive");
    const auto& rho = state.rho_g;
    const double dx = rho.grid().dx();
    const auto u = transport_velocities(op, state);
    const auto [rate, cell] = max_outflow_rate(u, dx);
    if (dt * rate > 1.0) {
        const std::size_t n = u.size();
        const std::size_t im = cell == 0 ? n - 1 : cell - 1;
        std::ostringstream msg;
        msg << "CFL violation: dt*(u+ - u-)/dx = " << format_double(dt * rate) << " > 1 at cell "
            << cell << " (face velocities " << format_double(u[im]) << ", " << format_double(u[cell])
            << "); reduce dt below " << format_double(1.0 / rate);
        throw NumericalError(msg.str(), state.step);
    }
    const auto f = face_fluxes(rho, u, FluxScheme::Upwind);
    MacroState next{DensityField(rho.grid()), state.t + dt, rho, dt, state.step + 1,
                    state.frame_velocity,
                    wrap(state.shift + state.frame_velocity * dt, rho.grid().length())};
    const double lam = dt / dx;
    const std::size_t n = rho.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t im = i == 0 ? n - 1 : i - 1;
        next.rho_g[i] = rho[i] - lam * (f[i] - f[im]);
    }
    if (!next.rho_g.all_finite())
        throw NumericalError("non-finite SPP density", next.step);
    return next;
}

MacroState macro_step(const MacroState& state, double dt, const MacroParams& params) {
    const MacroOperator op(params, state.rho_g.grid());
    return macro_step(state, dt, op);
}

}  // namespace tether
