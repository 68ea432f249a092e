#pragma once

#include <optional>

#include "tec/edgecut.hpp"

namespace tec {

enum class Direction { Expand, Shrink, None };

struct CorrectionTarget {
    double fraction = 0.0;  // target liquid fraction F1*
    Direction direction = Direction::None;
};

CorrectionTarget make_target(const EdgeCut& e, double target_fraction);

enum class CorrectionStatus { Corrected, NoChange, Unreachable };

struct Correction {
    CorrectionStatus status = CorrectionStatus::NoChange;
    EdgeCut cut;      // corrected cut, or the input when not corrected
    double tau = 0.0;
};

// Moves the cuts of e along the straight paths toward their limit positions
// until the liquid fraction equals the target. The cut count per edge is kept.
Correction edge_cut_correction(const EdgeCut& e, double target_fraction);

// The cut after moving a fraction tau of the way toward the limit for the
// given direction, taken in the basic-case frame (Expand grows the canonical
// liquid, which is the original air when the case is swapped). Empty once a
// cut leaves the valid band.
std::optional<EdgeCut> correction_path(const EdgeCut& e, Direction dir, double tau);

}  // namespace tec
