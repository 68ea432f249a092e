#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "tec/correction.hpp"
#include "tec/edgecut.hpp"
#include "tec/flow.hpp"
#include "tec/mesh.hpp"

namespace tec {

struct InterfaceState {
    std::shared_ptr<const TriMesh> mesh;
    std::vector<EdgeCut> cuts;
    double time = 0.0;
    std::int64_t step = 0;
};

InterfaceState empty_state(std::shared_ptr<const TriMesh> mesh);

// Liquid area sum(F1 * |T|).
double total_liquid_area(const InterfaceState& state);

enum class EventKind {
    DegeneratePreimage,     // inverted pre-image, previous cut kept
    ParityRepair,           // a cut dropped to restore even parity
    ParityFallback,         // cuts cleared after an unclassifiable pattern
    VertexLineIntersection, // case-2 vertex from the generating-line fallback
    VertexFarthest,         // case-2 vertex from the farthest-vertex fallback
    VertexAbsent,           // case 2 abandoned, cuts cleared
    CorrectionUnreachable,  // target outside the reachable range
    Unrepresentable,        // no cut to move, fraction differs from target
    TargetClamped,          // pre-image fraction outside [0,1]
    SubResolution,          // boundary crosses an edge more than twice (initialization)
    PreviousCut,            // pure advected cut with a mixed target; previous cut corrected instead
};

const char* to_string(EventKind k);

// True for events that leave the triangle's liquid fraction off target.
bool is_failure(EventKind k);

struct StepEvent {
    std::int32_t triangle = 0;
    EventKind kind = EventKind::ParityRepair;
    double a = 0.0;  // target fraction (or event-specific value)
    double b = 0.0;  // achieved fraction (or event-specific value)
};

struct StepReport {
    std::vector<StepEvent> events;
    std::size_t active_triangles = 0;

    std::size_t count(EventKind k) const;
    // Distinct triangles with at least one failure event.
    std::size_t failed_triangles() const;
    // Sum of (achieved - target) * |T| over failure events that carry fractions.
    // nullopt when a failed triangle has no target (degenerate pre-image).
    std::optional<double> off_target_area(const TriMesh& mesh) const;
};

struct AdvectOptions {
    std::uint64_t seed = 0;
    double perturbation = 1e-6;  // multiple of char_length
    unsigned workers = 0;        // 0: TEC_WORKERS or hardware threads
    bool narrow_band = true;
};

// Per-step read-only view of a state: reconstructed pieces of every cut
// triangle plus material lookup.
class InterfaceIndex {
public:
    explicit InterfaceIndex(const InterfaceState& state, unsigned workers = 1);

    const InterfaceState& state() const { return *state_; }
    const TriMesh& mesh() const { return *state_->mesh; }

    enum class Kind : std::uint8_t { Air, Liquid, Mixed };
    Kind kind(std::size_t t) const { return kind_[t]; }
    const CutGeometry& geometry(std::size_t t) const { return geom_[slot_[t]]; }

    Material material_at(std::size_t t, Point2 p) const;
    Material material_query(Point2 p, std::optional<std::int32_t> hint = std::nullopt) const;

    struct Hit {
        double t = 0.0;   // parameter along the query segment
        Point2 p;
        Segment generator;  // interface line that produced the hit
    };
    using HitList = boost::container::small_vector<Hit, 4>;

    // All interface crossings of e among the candidate triangles, unfiltered.
    HitList raw_hits(const Segment& e, std::span<const std::uint32_t> candidates) const;

    // Liquid pieces of region within the candidates, appended to out.
    double clip_liquid(const ConvexPolygon& region, std::span<const std::uint32_t> candidates,
                       PolygonList* out) const;

private:
    const InterfaceState* state_;
    std::vector<Kind> kind_;
    std::vector<std::uint32_t> slot_;
    std::vector<CutGeometry> geom_;
};

// Keeps 0 or 2 hits (first and last) for same-material endpoints, the first
// hit for different materials.
InterfaceIndex::HitList parity_filter(InterfaceIndex::HitList hits, Material a, Material b);

// Deterministic offset of magnitude <= scale for a (seed, step, vertex) triple.
Point2 perturbation(std::uint64_t seed, std::int64_t step, std::uint32_t vertex, double scale);

// Pre-image of triangle tri with the per-vertex perturbation applied first.
Triangle preimage_triangle(const TriMesh& mesh, std::size_t tri, const VelocityField& field, double t, double dt,
                           std::uint64_t seed, std::int64_t step, double perturbation_scale = 1e-6);

Material material_query(const InterfaceState& state, Point2 p);

// Filtered crossings of e' (endpoint materials from material queries).
std::vector<std::pair<double, Point2>> edge_cuts_on_segment(const InterfaceState& state, const Segment& e);

enum class VertexSource { Centroid, LineIntersection, Farthest };

struct AdditionalVertex {
    Point2 p;
    VertexSource source = VertexSource::Centroid;
};

struct AdditionalVertexInput {
    Triangle tri;
    int edge = 0;                       // edge of tri carrying the two cuts
    Point2 r1, r2;                      // projected cut points
    std::span<const ConvexPolygon> pieces;  // liquid pieces of the pre-image
    bool liquid_outside = false;        // liquid is the complement of the small region
    std::optional<Segment> line1, line2;  // generating interface lines (pre-image space)
};

std::optional<AdditionalVertex> find_additional_vertex(const AdditionalVertexInput& in, const VelocityField& field,
                                                       double t, double dt);

// Cut advection only: advected cuts for one triangle, no vertex recovery or
// area correction.
EdgeCut advect_simple(const InterfaceState& state, std::size_t tri, const VelocityField& field, double dt,
                      std::uint64_t seed = 0);

// Corrects e toward the target fraction, snapping near-pure targets to the
// pure state and logging failures for triangle tri.
EdgeCut correct_to_fraction(const EdgeCut& e, double target, std::size_t tri, std::vector<StepEvent>& events);

struct StepResult {
    InterfaceState state;
    StepReport report;
};

StepResult advect_step(const InterfaceState& state, const VelocityField& field, double dt,
                       const AdvectOptions& opts = {});

}  // namespace tec
