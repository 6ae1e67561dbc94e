#include "tether/ibm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tether/core/error.hpp"
#include "tether/core/rng.hpp"
#include "tether/ibm/neighbors.hpp"

namespace tether {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite(Vec2 v) noexcept { return std::isfinite(v.x) && std::isfinite(v.y); }

double squared_support(const KernelSpec& k) {
    const double s = k.support();
    return std::isfinite(s) ? s * s : std::numeric_limits<double>::infinity();
}

double interaction_cutoff(const IbmParams& p) {
    return std::max({p.r_A, p.psi.support(), p.phi.support()});
}

// Key for initial-state draws: category in the high bits, particle index below.
std::uint64_t init_entity(std::uint64_t category, std::size_t i) {
    return (category << 32) ^ static_cast<std::uint64_t>(i);
}

// Exceptions must not escape the parallel loops, so non-finite values are
// passed through and reported after the loop.
double wrap_or_keep(double x, double length) {
    return std::isfinite(x) ? wrap(x, length) : x;
}

Vec2 wrap_or_keep(Vec2 p, const PeriodicDomain& d) {
    return finite(p) ? wrap(p, d) : p;
}

void check_finite(const IbmState& s) {
    auto bad = [](const std::vector<Vec2>& v) {
        return std::any_of(v.begin(), v.end(), [](Vec2 p) { return !finite(p); });
    };
    if (bad(s.Z) || bad(s.alpha) || bad(s.X))
        throw NumericalError("non-finite particle state", static_cast<std::int64_t>(s.step));
}

// The neighbour loops use the unchecked minimum image, which needs
// coordinates inside the box; a wrapped copy is made only when needed.
const std::vector<Vec2>& in_box(const std::vector<Vec2>& v, const PeriodicDomain& d,
                                std::vector<Vec2>& storage) {
    const double lx = d.length(0), ly = d.length(1);
    const auto inside = [&](Vec2 q) { return q.x >= 0.0 && q.x < lx && q.y >= 0.0 && q.y < ly; };
    if (std::all_of(v.begin(), v.end(), inside)) return v;
    storage.resize(v.size());
    std::transform(v.begin(), v.end(), storage.begin(), [&](Vec2 q) { return wrap(q, d); });
    return storage;
}

}  // namespace

void IbmParams::validate(int dimension) const {
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    require(std::isfinite(eta) && eta > 0.0, "eta must be > 0");
    require(std::isfinite(zeta) && zeta > 0.0, "zeta must be > 0");
    require(std::isfinite(nu) && nu >= 0.0, "nu must be >= 0");
    require(std::isfinite(d_s) && d_s >= 0.0, "d_s must be >= 0");
    require(std::isfinite(d_o) && d_o >= 0.0, "d_o must be >= 0");
    require(std::isfinite(r_A) && r_A >= 0.0, "r_A must be >= 0");
    require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
    require(dt * kappa / eta < 1.0, "dt * kappa / eta must be < 1 for a stable spring update");
    require(N + M > 0, "particle count N + M must be positive");
    try {
        phi.validate();
        psi.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    require(phi.dimension == dimension, "phi kernel dimension does not match the simulation");
    require(psi.dimension == dimension, "psi kernel dimension does not match the simulation");
}

void IbmState::check_consistent() const {
    if (alpha.size() != Z.size()) throw Error("orientation count differs from SPP count");
    if (Y.size() != X.size()) throw Error("anchor count differs from obstacle count");
    if (Z.empty() && X.empty()) throw Error("state holds no particles");
}

IbmState make_initial_state_2d(const IbmParams& params, const PeriodicDomain& domain,
                               std::uint64_t seed) {
    if (domain.dimension() != 2) throw Error("make_initial_state_2d needs a 2D domain");
    IbmState s;
    s.domain = domain;
    const double lx = domain.length(0), ly = domain.length(1);
    s.Y.resize(params.N);
    for (std::size_t i = 0; i < params.N; ++i) {
        RngStream rng(seed, StreamPurpose::Initialisation, init_entity(0, i), 0);
        const double x = rng.uniform(0.0, lx);
        s.Y[i] = wrap(Vec2{x, rng.uniform(0.0, ly)}, domain);
    }
    s.X = s.Y;
    s.Z.resize(params.M);
    s.alpha.resize(params.M);
    for (std::size_t k = 0; k < params.M; ++k) {
        RngStream rng(seed, StreamPurpose::Initialisation, init_entity(1, k), 0);
        const double x = rng.uniform(0.0, lx);
        const double y = rng.uniform(0.0, ly);
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.Z[k] = wrap(Vec2{x, y}, domain);
        s.alpha[k] = {std::cos(a), std::sin(a)};
    }
    return s;
}

IbmState make_initial_state_1d(const IbmParams& params, double length, std::uint64_t seed) {
    IbmState s;
    s.domain = PeriodicDomain(1, length);
    s.Y.resize(params.N);
    for (std::size_t i = 0; i < params.N; ++i)
        s.Y[i] = {(static_cast<double>(i) + 0.5) * length / static_cast<double>(params.N), 0.0};
    s.X = s.Y;
    s.Z.resize(params.M);
    s.alpha.assign(params.M, Vec2{1.0, 0.0});
    for (std::size_t k = 0; k < params.M; ++k) {
        RngStream rng(seed, StreamPurpose::Initialisation, init_entity(1, k), 0);
        s.Z[k] = {wrap(rng.uniform(0.0, length), length), 0.0};
    }
    return s;
}

Vec2 mean_direction(const IbmState& state, std::size_t k, double r_A, bool include_self,
                    std::uint64_t* degenerate) {
    if (k >= state.Z.size()) throw Error("mean_direction: particle index out of range");
    const double r2 = r_A * r_A;
    Vec2 J{};
    for (std::size_t j = 0; j < state.Z.size(); ++j) {
        if (j == k && !include_self) continue;
        if (norm2(min_image(state.Z[k], state.Z[j], state.domain)) <= r2) J += state.alpha[j];
    }
    const double n = norm(J);
    if (n < 1e-14) {
        if (degenerate) ++*degenerate;
        return state.alpha[k];
    }
    return (1.0 / n) * J;
}

IbmState ibm_step_2d(const IbmState& state, const IbmParams& p, std::uint64_t seed) {
    p.validate(2);
    state.check_consistent();
    if (state.domain.dimension() != 2) throw Error("ibm_step_2d needs a 2D state");
    check_finite(state);
    const auto& dom = state.domain;
    const Vec2 box{dom.length(0), dom.length(1)};
    std::vector<Vec2> zs, xs, ys;
    const auto& Z = in_box(state.Z, dom, zs);
    const auto& X = in_box(state.X, dom, xs);
    const auto& Y = in_box(state.Y, dom, ys);
    const std::size_t M = state.n_spp(), N = state.n_obstacles();
    const double inv_m = M > 0 ? 1.0 / static_cast<double>(M) : 0.0;
    const double inv_n = N > 0 ? 1.0 / static_cast<double>(N) : 0.0;
    const double cutoff = interaction_cutoff(p);
    const CellList spp_cells(Z, dom, cutoff);
    const CellList obs_cells(X, dom, cutoff);
    const double rA2 = p.r_A * p.r_A;
    const double psi2 = squared_support(p.psi);
    const double phi2 = squared_support(p.phi);
    const double dt = p.dt;
    const double angle_noise = std::sqrt(2.0 * p.d_s * dt);
    const double obstacle_noise = std::sqrt(2.0 * p.d_o * dt);
    const std::uint64_t step = state.step;

    IbmState next = state;
    std::uint64_t degenerate = 0;

#pragma omp parallel for schedule(static) reduction(+ : degenerate)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(M); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        const Vec2 z = Z[k];
        Vec2 J{}, f_psi{}, f_phi{};
        spp_cells.for_each_candidate(z, [&](std::size_t j) {
            const Vec2 d = min_image_wrapped(z, Z[j], box);
            const double r2 = norm2(d);
            if (r2 <= rA2) J += state.alpha[j];
            if (j != k && r2 < psi2) f_psi += force(p.psi, d);
        });
        obs_cells.for_each_candidate(z, [&](std::size_t i) {
            const Vec2 d = min_image_wrapped(z, X[i], box);
            if (norm2(d) < phi2) f_phi += force(p.phi, d);
        });
        const Vec2 a = state.alpha[k];
        const Vec2 drift = a - (inv_n / p.zeta) * f_phi - (inv_m / p.zeta) * f_psi;
        next.Z[k] = wrap_or_keep(z + dt * drift, dom);

        // Rotate toward the mean direction; the angle form keeps |alpha| = 1.
        Vec2 abar = a;
        const double jn = norm(J);
        if (jn < 1e-14)
            ++degenerate;
        else
            abar = (1.0 / jn) * J;
        double dtheta = p.nu * dt * (a.x * abar.y - a.y * abar.x);
        if (angle_noise > 0.0) {
            RngStream rng(seed, StreamPurpose::SppOrientation, k, step);
            dtheta += angle_noise * rng.normal();
        }
        const double c = std::cos(dtheta), s = std::sin(dtheta);
        const Vec2 rotated{c * a.x - s * a.y, s * a.x + c * a.y};
        next.alpha[k] = (1.0 / norm(rotated)) * rotated;
    }

    const double spring = p.kappa / p.eta;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(N); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Vec2 x = X[i];
        Vec2 f_phi{};
        spp_cells.for_each_candidate(x, [&](std::size_t k) {
            const Vec2 d = min_image_wrapped(x, Z[k], box);
            if (norm2(d) < phi2) f_phi += force(p.phi, d);
        });
        Vec2 dx = dt * (-spring * min_image_wrapped(x, Y[i], box) - (inv_m / p.eta) * f_phi);
        if (obstacle_noise > 0.0) {
            RngStream rng(seed, StreamPurpose::ObstacleNoise, i, step);
            const double gx = rng.normal();
            dx += obstacle_noise * Vec2{gx, rng.normal()};
        }
        next.X[i] = wrap_or_keep(x + dx, dom);
    }

    next.degenerate_alignments += degenerate;
    next.t = state.t + dt;
    next.step = step + 1;
    check_finite(next);
    return next;
}

IbmState ibm_step_1d(const IbmState& state, const IbmParams& p, std::uint64_t seed) {
    p.validate(1);
    state.check_consistent();
    if (state.domain.dimension() != 1) throw Error("ibm_step_1d needs a 1D state");
    check_finite(state);
    const double L = state.domain.length();
    std::vector<Vec2> zs, xs, ys;
    const auto& Z = in_box(state.Z, state.domain, zs);
    const auto& X = in_box(state.X, state.domain, xs);
    const auto& Y = in_box(state.Y, state.domain, ys);
    const std::size_t M = state.n_spp(), N = state.n_obstacles();
    const double inv_m = M > 0 ? 1.0 / static_cast<double>(M) : 0.0;
    const double inv_n = N > 0 ? 1.0 / static_cast<double>(N) : 0.0;
    const double cutoff = std::max(p.psi.support(), p.phi.support());
    const CellList spp_cells(Z, state.domain, cutoff);
    const CellList obs_cells(X, state.domain, cutoff);
    const double psi_r = p.psi.support();
    const double phi_r = p.phi.support();
    const double dt = p.dt;
    const double obstacle_noise = std::sqrt(2.0 * p.d_o * dt);
    const std::uint64_t step = state.step;

    IbmState next = state;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(M); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        const double z = Z[k].x;
        double f_psi = 0.0, f_phi = 0.0;
        spp_cells.for_each_candidate(Z[k], [&](std::size_t j) {
            if (j == k) return;
            const double d = min_image_wrapped(z, Z[j].x, L);
            if (std::abs(d) < psi_r) f_psi += force(p.psi, d);
        });
        obs_cells.for_each_candidate(Z[k], [&](std::size_t i) {
            const double d = min_image_wrapped(z, X[i].x, L);
            if (std::abs(d) < phi_r) f_phi += force(p.phi, d);
        });
        const double v = 1.0 - (inv_n / p.zeta) * f_phi - (inv_m / p.zeta) * f_psi;
        next.Z[k] = {wrap_or_keep(z + dt * v, L), 0.0};
        next.alpha[k] = {1.0, 0.0};
    }

    const double spring = p.kappa / p.eta;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(N); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double x = X[i].x;
        double f_phi = 0.0;
        spp_cells.for_each_candidate(X[i], [&](std::size_t k) {
            const double d = min_image_wrapped(x, Z[k].x, L);
            if (std::abs(d) < phi_r) f_phi += force(p.phi, d);
        });
        double dx = dt * (-spring * min_image_wrapped(x, Y[i].x, L) - (inv_m / p.eta) * f_phi);
        if (obstacle_noise > 0.0) {
            RngStream rng(seed, StreamPurpose::ObstacleNoise, i, step);
            dx += obstacle_noise * rng.normal();
        }
        next.X[i] = {wrap_or_keep(x + dx, L), 0.0};
    }

    next.t = state.t + dt;
    next.step = step + 1;
    check_finite(next);
    return next;
}

IbmState ibm_step(const IbmState& state, const IbmParams& params, std::uint64_t seed) {
    return state.domain.dimension() == 1 ? ibm_step_1d(state, params, seed)
                                         : ibm_step_2d(state, params, seed);
}

}  // namespace tether
