#include "tether/asymptotics/velocity.hpp"

#include <cmath>
#include <numbers>

#include "tether/core/error.hpp"
#include "tether/core/quadrature.hpp"
#include "tether/core/rng.hpp"

namespace tether {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

struct Mode {
    std::array<double, 3> q{};  // integer wave vector
    std::array<double, 3> a{};  // amplitude vector
    double b = 0.0;             // potential amplitude when conservative
    double omega = 0.0;
    double phase = 0.0;
};

void check_point(int dim, std::span<const double> y) {
    if (y.size() < static_cast<std::size_t>(dim)) throw Error("point has too few components");
}

}  // namespace

ExternalVelocityField::ExternalVelocityField(int dimension, JetFn jet, PotentialFn potential)
    : dim_(dimension), jet_(std::move(jet)), potential_(std::move(potential)) {
    if (dim_ < 1 || dim_ > 3) throw Error("velocity field dimension must be 1, 2 or 3");
    if (!jet_) throw Error("velocity field needs a jet function");
}

VelocityJet ExternalVelocityField::jet(std::span<const double> y, double t) const {
    check_point(dim_, y);
    return jet_(y, t);
}

double ExternalVelocityField::potential(std::span<const double> y, double t) const {
    if (!potential_) throw Error("velocity field is not conservative");
    check_point(dim_, y);
    return potential_(y, t);
}

ExternalVelocityField ExternalVelocityField::constant(std::vector<double> c) {
    const int dim = static_cast<int>(c.size());
    VelocityJet j;
    for (std::size_t k = 0; k < c.size() && k < 3; ++k) j.v[k] = c[k];
    auto pot = [c](std::span<const double> y, double) {
        double s = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * y[k];
        return s;
    };
    return ExternalVelocityField(dim, [j](std::span<const double>, double) { return j; }, pot);
}

ExternalVelocityField ExternalVelocityField::linear(const std::vector<std::vector<double>>& A) {
    const int dim = static_cast<int>(A.size());
    Mat3 m{};
    for (std::size_t j = 0; j < A.size(); ++j) {
        if (A[j].size() != A.size()) throw Error("linear field matrix must be square");
        for (std::size_t k = 0; k < A.size(); ++k) m[j][k] = A[j][k];
    }
    auto jet = [m, dim](std::span<const double> y, double) {
        VelocityJet out;
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k) {
                out.v[static_cast<std::size_t>(j)] += m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
                out.dv[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            }
        return out;
    };
    return ExternalVelocityField(dim, jet);
}

ExternalVelocityField ExternalVelocityField::shear_2d(double amplitude) {
    auto jet = [amplitude](std::span<const double> y, double) {
        VelocityJet out;
        const double s = std::sin(two_pi * y[1]);
        const double c = std::cos(two_pi * y[1]);
        out.v[0] = amplitude * s;
        out.dv[1][0] = amplitude * two_pi * c;
        out.d2v[0][1][1] = -amplitude * two_pi * two_pi * s;
        return out;
    };
    return ExternalVelocityField(2, jet);
}

ExternalVelocityField ExternalVelocityField::random_trigonometric(int dimension, int modes,
                                                                  std::uint64_t seed,
                                                                  bool conservative) {
    if (dimension < 1 || dimension > 3) throw Error("velocity field dimension must be 1, 2 or 3");
    if (modes < 1) throw Error("random field needs at least one mode");
    std::vector<Mode> ms(static_cast<std::size_t>(modes));
    for (std::size_t m = 0; m < ms.size(); ++m) {
        RngStream rng(seed, StreamPurpose::Test, m, 0);
        auto& mode = ms[m];
        bool nonzero = false;
        while (!nonzero) {
            for (int k = 0; k < dimension; ++k) {
                mode.q[static_cast<std::size_t>(k)] = std::floor(rng.uniform(-2.0, 3.0));
                nonzero = nonzero || mode.q[static_cast<std::size_t>(k)] != 0.0;
            }
        }
        mode.omega = rng.normal();
        mode.phase = rng.uniform(0.0, two_pi);
        const double scale = 1.0 / std::sqrt(static_cast<double>(modes));
        if (conservative) {
            mode.b = scale * rng.normal() / two_pi;
            for (int k = 0; k < dimension; ++k)
                mode.a[static_cast<std::size_t>(k)] = mode.b * two_pi * mode.q[static_cast<std::size_t>(k)];
        } else {
            for (int k = 0; k < dimension; ++k) mode.a[static_cast<std::size_t>(k)] = scale * rng.normal();
        }
    }
    const int dim = dimension;
    auto jet = [ms, dim](std::span<const double> y, double t) {
        VelocityJet out;
        const auto n = static_cast<std::size_t>(dim);
        for (const auto& m : ms) {
            double arg = m.omega * t + m.phase;
            for (std::size_t k = 0; k < n; ++k) arg += two_pi * m.q[k] * y[k];
            const double c = std::cos(arg);
            const double s = std::sin(arg);
            for (std::size_t j = 0; j < n; ++j) {
                out.v[j] += m.a[j] * c;
                out.dt_v[j] -= m.a[j] * m.omega * s;
                for (std::size_t k = 0; k < n; ++k) {
                    out.dv[k][j] -= m.a[j] * two_pi * m.q[k] * s;
                    for (std::size_t i = 0; i < n; ++i)
                        out.d2v[j][i][k] -= m.a[j] * two_pi * two_pi * m.q[i] * m.q[k] * c;
                }
            }
        }
        return out;
    };
    PotentialFn pot;
    if (conservative) {
        pot = [ms, dim](std::span<const double> y, double t) {
            double v = 0.0;
            for (const auto& m : ms) {
                double arg = m.omega * t + m.phase;
                for (std::size_t k = 0; k < static_cast<std::size_t>(dim); ++k) arg += two_pi * m.q[k] * y[k];
                v += m.b * std::sin(arg);
            }
            return v;
        };
    }
    return ExternalVelocityField(dimension, jet, pot);
}

ExternalVelocityField ExternalVelocityField::without_second_derivatives() const {
    auto inner = jet_;
    auto jet = [inner](std::span<const double> y, double t) {
        VelocityJet j = inner(y, t);
        j.d2v = {};
        j.has_second = false;
        return j;
    };
    return ExternalVelocityField(dim_, jet, potential_);
}

double curl_residual(const ExternalVelocityField& field,
                     std::span<const std::array<double, 3>> points, double t, double side) {
    const int dim = field.dimension();
    if (dim == 1) return 0.0;
    if (!(side > 0.0)) throw Error("loop side must be > 0");
    const auto rule = gauss_legendre(24);
    double worst = 0.0;
    for (const auto& centre : points) {
        for (int a = 0; a < dim; ++a) {
            for (int b = a + 1; b < dim; ++b) {
                // Counter-clockwise square in the (a, b) plane.
                const std::array<std::array<double, 2>, 4> corners{
                    {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}};
                double circulation = 0.0;
                for (std::size_t e = 0; e < 4; ++e) {
                    const auto& p0 = corners[e];
                    const auto& p1 = corners[(e + 1) % 4];
                    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                        const double s = 0.5 * (rule.nodes[q] + 1.0);
                        std::array<double, 3> y = centre;
                        y[static_cast<std::size_t>(a)] += side * (p0[0] + s * (p1[0] - p0[0]));
                        y[static_cast<std::size_t>(b)] += side * (p0[1] + s * (p1[1] - p0[1]));
                        const auto v = field.jet(y, t).v;
                        const double tangent = v[static_cast<std::size_t>(a)] * (p1[0] - p0[0]) +
                                               v[static_cast<std::size_t>(b)] * (p1[1] - p0[1]);
                        circulation += 0.5 * rule.weights[q] * tangent * side;
                    }
                }
                worst = std::max(worst, std::abs(circulation) / (side * side));
            }
        }
    }
    return worst;
}

}  // namespace tether
