#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tec/advect.hpp"
#include "tec/shapes.hpp"

namespace tec {

class MetricsError : public std::invalid_argument {
public:
    explicit MetricsError(const std::string& what) : std::invalid_argument(what) {}
};

// Lattice cells pair triangles 2k and 2k+1; otherwise each triangle is a group.
enum class Grouping { Auto, LatticeCells, Triangles };

struct ErrorReport {
    double E_g = 0.0;
    double E_r = 0.0;
    double E_m = 0.0;
    std::vector<double> per_group;  // |A - Ã| per group
};

double shape_error(const InterfaceState& state, const DensePolygon& truth, Grouping grouping = Grouping::Auto,
                   std::vector<double>* per_group = nullptr);

double mass_error(const InterfaceState& state, double A0);

ErrorReport error_report(const InterfaceState& state, const DensePolygon& truth, double A0,
                         Grouping grouping = Grouping::Auto);

struct ConvergenceResult {
    std::vector<std::optional<double>> orders;  // one per consecutive pair
    std::optional<double> slope;                // least-squares order over all levels
};

// levels: (resolution, error) with the resolution doubling per level
// (N for lattices, 2^l for refinement levels).
ConvergenceResult convergence_order(std::span<const std::pair<double, double>> levels);

enum class FitFrame { XParabola, YParabola };

struct CurvatureSample {
    std::size_t triangle = 0;
    int segment = 0;
    Point2 midpoint;
    double kappa = 0.0;  // positive where the liquid is locally convex
    FitFrame frame = FitFrame::XParabola;
};

struct CurvatureResult {
    std::vector<CurvatureSample> samples;
    std::size_t skipped = 0;  // segments with fewer than 3 distinct fit points
};

// Least-squares parabola through pts in the frame with the larger coordinate
// range, evaluated at the abscissa of `at`. liquid_normal fixes the sign.
double fit_curvature(std::span<const Point2> pts, Point2 at, Point2 liquid_normal, FitFrame* frame = nullptr);

CurvatureResult curvature(const InterfaceState& state);

// max |k - k_true| / |k_true| over the samples.
double curvature_error(std::span<const CurvatureSample> samples, const std::function<double(Point2)>& truth);

// Connected components of the reconstructed liquid; pieces connect through
// shared boundary of positive length.
std::size_t liquid_components(const InterfaceState& state);

}  // namespace tec
