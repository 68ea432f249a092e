#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "tec/geom.hpp"
#include "tec/mesh.hpp"

namespace tec {

// Rider-Kothe single vortex on [0,1]^2, reversing at T/2.
struct SingleVortex {
    double period = 8.0;
};

struct RigidRotation {
    Point2 center{0.0, 0.0};
    double omega = 0.5;
};

// n x n vortex deformation field, reversing at T/2.
struct Deformation {
    double period = 2.0;
    int vortices = 4;
};

struct UniformTranslation {
    Point2 velocity{1.0, 0.0};
};

struct ZeroField {};

struct CustomField {
    std::function<Point2(Point2, double)> fn;
    double max_speed = 0.0;
};

using VelocityField = std::variant<SingleVortex, RigidRotation, Deformation, UniformTranslation, ZeroField, CustomField>;

Point2 eval(const VelocityField& field, Point2 p, double t);

// Classical RK4 from time t0 over the signed increment dt.
Point2 rk4_trace(const VelocityField& field, Point2 p, double t0, double dt);

// Maximum speed over the domain at t = 0.
double max_speed(const VelocityField& field, const BBox& domain);

struct StepPlan {
    double dt = 0.0;
    std::int64_t steps = 0;
};

// dt = Cr * char_length / U_max, shortened so `period` is a whole number of steps.
StepPlan timestep(const VelocityField& field, const TriMesh& mesh, double cr, double period);

}  // namespace tec
