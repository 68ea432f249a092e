#include "tec/flow.hpp"

#include <algorithm>
#include <cmath>

namespace tec {

namespace {

using std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

Point2 eval(const VelocityField& field, Point2 p, double t) {
    return std::visit(
        overloaded{
            [&](const SingleVortex& f) -> Point2 {
                const double g = std::cos(pi * t / f.period);
                const double sx = std::sin(pi * p.x), sy = std::sin(pi * p.y);
                const double cx = std::cos(pi * p.x), cy = std::cos(pi * p.y);
                return {-2.0 * g * cy * sx * sx * sy, 2.0 * g * cx * sx * sy * sy};
            },
            [&](const RigidRotation& f) -> Point2 {
                return {-f.omega * (p.y - f.center.y), f.omega * (p.x - f.center.x)};
            },
            [&](const Deformation& f) -> Point2 {
                const double g = std::cos(pi * t / f.period);
                const double k = f.vortices * pi;
                const double ax = k * (p.x + 0.5), ay = k * (p.y + 0.5);
                return {-g * std::sin(ax) * std::sin(ay), -g * std::cos(ax) * std::cos(ay)};
            },
            [&](const UniformTranslation& f) -> Point2 { return f.velocity; },
            [&](const ZeroField&) -> Point2 { return {0.0, 0.0}; },
            [&](const CustomField& f) -> Point2 { return f.fn(p, t); },
        },
        field);
}

Point2 rk4_trace(const VelocityField& field, Point2 p, double t0, double dt) {
    if (std::holds_alternative<ZeroField>(field)) return p;
    const Point2 k1 = eval(field, p, t0);
    const Point2 k2 = eval(field, p + (0.5 * dt) * k1, t0 + 0.5 * dt);
    const Point2 k3 = eval(field, p + (0.5 * dt) * k2, t0 + 0.5 * dt);
    const Point2 k4 = eval(field, p + dt * k3, t0 + dt);
    return p + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_speed(const VelocityField& field, const BBox& domain) {
    return std::visit(
        overloaded{
            // max of 2 sin^2 sin cos over the unit square is attained at the
            // domain center line: |u| = 1 at (1/2, 1/4), |v| = 1 at (1/4, 1/2).
            [&](const SingleVortex&) { return 1.0; },
            [&](const RigidRotation& f) {
                double r = 0.0;
                for (Point2 c : {Point2{domain.xmin, domain.ymin}, Point2{domain.xmax, domain.ymin},
                                 Point2{domain.xmax, domain.ymax}, Point2{domain.xmin, domain.ymax}})
                    r = std::max(r, distance(c, f.center));
                return std::abs(f.omega) * r;
            },
            // |u|^2 + |v|^2 = sin^2 a sin^2 b + cos^2 a cos^2 b <= 1, equality at a = b = 0.
            [&](const Deformation&) { return 1.0; },
            [&](const UniformTranslation& f) { return norm(f.velocity); },
            [&](const ZeroField&) { return 0.0; },
            [&](const CustomField& f) { return f.max_speed; },
        },
        field);
}

StepPlan timestep(const VelocityField& field, const TriMesh& mesh, double cr, double period) {
    if (!(cr > 0.0)) throw std::invalid_argument("Courant number must be positive");
    const double umax = max_speed(field, mesh.bounds());
    if (!(umax > 0.0)) throw std::invalid_argument("velocity field has zero maximum speed");
    const double raw = cr * mesh.char_length() / umax;
    if (!(period > 0.0)) return {raw, 0};
    const auto steps = static_cast<std::int64_t>(std::ceil(period / raw - 1e-9));
    return {period / static_cast<double>(steps), steps};
}

}  // namespace tec
