#include "tec/correction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace tec {

namespace {

// Edge cut in its basic-case frame: R11 R12 R21 R22 R31 R32, single cuts in
// the first slot of their row, plus the case-2 barycentrics.
struct Canon {
    CanonicalForm form;
    Material c = Material::Air;
    std::array<double, 6> p{0, 1, 0, 1, 0, 1};
    double u = 0.0;
    double v = 0.0;
    CutCount count{};
};

Canon to_canon(const EdgeCut& e) {
    Canon k;
    k.form = classify(e);
    EdgeCut r = rotated(e, k.form.rot);
    if (k.form.swap) r = swapped(r);
    k.c = r.c;
    k.count = cut_count(r);
    for (int i = 0; i < 3; ++i) {
        const int n = row_count(r.R[i]);
        k.p[2 * i] = n >= 1 ? row_cut(r.R[i], 0) : 0.0;
        k.p[2 * i + 1] = n == 2 ? row_cut(r.R[i], 1) : 1.0;
    }
    if (k.form.case_id == 2) {
        if (!r.vt) throw InvalidEdgeCut("case 2 requires an interior vertex");
        k.u = r.vt->u;
        k.v = r.vt->v;
    }
    return k;
}

double canon_f1(int case_id, const std::array<double, 6>& p, double v) {
    switch (case_id) {
        case 2:
            return v * (p[1] - p[0]);
        case 3:
            return (1.0 - p[0]) * p[3] - (1.0 - p[1]) * p[2];
        case 4:
            return 1.0 - (p[0] * (1.0 - p[5]) + (1.0 - p[1]) * p[2] + (1.0 - p[3]) * p[4]);
        case 5:
            return p[0] * (1.0 - p[4]);
        case 6:
            return 1.0 - ((1.0 - p[0]) * p[2] + (1.0 - p[3]) * p[4]);
        default:
            return 0.0;
    }
}

double split_point(const std::array<double, 6>& p, int row) {
    const double a = p[2 * row];
    const double b = p[2 * row + 1];
    return a / (a + 1.0 - b);
}

struct Path {
    Canon start;
    std::array<double, 6> target;
    double tu = 0.0;
    double tv = 0.0;

    Canon at(double tau) const {
        Canon k = start;
        for (int i = 0; i < 6; ++i) k.p[i] = start.p[i] + tau * (target[i] - start.p[i]);
        k.u = start.u + tau * (tu - start.u);
        k.v = start.v + tau * (tv - start.v);
        return k;
    }
    double f(double tau) const {
        const Canon k = at(tau);
        return canon_f1(start.form.case_id, k.p, k.v);
    }
};

Path make_path(const Canon& k, Direction dir) {
    Path path{k, k.p, k.u, k.v};
    auto& t = path.target;
    const bool grow = dir == Direction::Expand;
    auto open_row = [&](int row) {
        t[2 * row] = 0.0;
        t[2 * row + 1] = 1.0;
    };
    auto close_row = [&](int row) {
        const double s = split_point(k.p, row);
        t[2 * row] = s;
        t[2 * row + 1] = s;
    };
    switch (k.form.case_id) {
        case 2:
            if (grow) {
                open_row(0);
                path.tu = 0.0;
                path.tv = 1.0;
            } else {
                close_row(0);
                const double w = 1.0 - k.u - k.v;
                path.tu = k.u / (k.u + w);
                path.tv = 0.0;
            }
            break;
        case 3:
            for (int r : {0, 1}) grow ? open_row(r) : close_row(r);
            break;
        case 4:
            for (int r : {0, 1, 2}) grow ? open_row(r) : close_row(r);
            break;
        case 5:
            t[0] = grow ? 1.0 : 0.0;
            t[4] = grow ? 0.0 : 1.0;
            break;
        case 6:
            t[0] = grow ? 1.0 : 0.0;
            grow ? open_row(1) : close_row(1);
            t[4] = grow ? 0.0 : 1.0;
            break;
        default:
            break;
    }
    return path;
}

// Empty when a moved cut left the valid band or two cuts on an edge met.
std::optional<EdgeCut> from_canon(const Canon& k) {
    EdgeCut r;
    r.c = k.c;
    for (int i = 0; i < 3; ++i) {
        const double a = k.p[2 * i], b = k.p[2 * i + 1];
        switch (k.count[i]) {
            case 0:
                r.R[i] = {0.0, 1.0};
                break;
            case 1:
                if (!is_valid_cut(a)) return std::nullopt;
                r.R[i] = {a, 1.0};
                break;
            default:
                if (!is_valid_cut(a) || !is_valid_cut(b) || !(a < b)) return std::nullopt;
                r.R[i] = {a, b};
                break;
        }
    }
    if (k.form.case_id == 2) r.vt = Barycentric{k.u, k.v};
    if (k.form.swap) r = swapped(r);
    return rotated(r, (3 - k.form.rot) % 3);
}

double solve_root(double a, double b, double c) {
    // a tau^2 + b tau + c = 0, root in [0, 1].
    const double scale = std::abs(a) + std::abs(b) + std::abs(c);
    if (std::abs(a) <= 1e-14 * scale) return b != 0.0 ? -c / b : -1.0;
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    const double r1 = q / a;
    const double r2 = q != 0.0 ? c / q : r1;
    auto dist = [](double r) { return r < 0.0 ? -r : (r > 1.0 ? r - 1.0 : 0.0); };
    return dist(r1) <= dist(r2) ? r1 : r2;
}

}  // namespace

CorrectionTarget make_target(const EdgeCut& e, double target_fraction) {
    const double f1 = area_fractions(e).liquid;
    Direction d = Direction::None;
    if (target_fraction > f1) d = Direction::Expand;
    if (target_fraction < f1) d = Direction::Shrink;
    return {target_fraction, d};
}

std::optional<EdgeCut> correction_path(const EdgeCut& e, Direction dir, double tau) {
    const Canon k = to_canon(e);
    if (dir == Direction::None || k.form.case_id == 1) return e;
    return from_canon(make_path(k, dir).at(tau));
}

Correction edge_cut_correction(const EdgeCut& e, double target_fraction) {
    if (!(target_fraction >= 0.0 && target_fraction <= 1.0))
        throw std::invalid_argument("target liquid fraction outside [0,1]");
    Correction out;
    out.cut = e;
    const Canon k = to_canon(e);
    const double f_now = canon_f1(k.form.case_id, k.p, k.v);
    const double goal = k.form.swap ? 1.0 - target_fraction : target_fraction;
    if (goal == f_now) return out;
    if (k.form.case_id == 1) {
        out.status = CorrectionStatus::Unreachable;
        return out;
    }
    const Direction dir = goal > f_now ? Direction::Expand : Direction::Shrink;
    const Path path = make_path(k, dir);

    const double f0 = f_now;
    const double fh = path.f(0.5);
    const double f1 = path.f(1.0);
    // Reachable targets lie strictly between the start value and the limit.
    if (!(std::min(f0, f1) < goal && goal < std::max(f0, f1))) {
        out.status = CorrectionStatus::Unreachable;
        return out;
    }
    const double a = 2.0 * (f1 - 2.0 * fh + f0);
    const double b = f1 - f0 - a;
    double tau = std::clamp(solve_root(a, b, f0 - goal), 0.0, 1.0);
    for (int it = 0; it < 4; ++it) {
        const double g = path.f(tau) - goal;
        const double slope = 2.0 * a * tau + b;
        if (g == 0.0 || slope == 0.0) break;
        const double next = std::clamp(tau - g / slope, 0.0, 1.0);
        if (next == tau) break;
        tau = next;
    }
    if (!(tau < 1.0)) {
        out.status = CorrectionStatus::Unreachable;
        return out;
    }
    const Canon moved = path.at(tau);
    const std::optional<EdgeCut> result = from_canon(moved);
    if (!result || cut_count(*result) != cut_count(e)) {
        out.status = CorrectionStatus::Unreachable;
        return out;
    }
    if (moved.form.case_id == 2) {
        const Barycentric b{moved.u, moved.v};
        if (!(b.u > 0.0 && b.v > 0.0 && b.w() > 0.0)) {
            out.status = CorrectionStatus::Unreachable;
            return out;
        }
    }
    out.status = CorrectionStatus::Corrected;
    out.cut = *result;
    out.tau = tau;
    return out;
}

}  // namespace tec
