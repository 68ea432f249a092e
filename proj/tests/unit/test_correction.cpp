#include <doctest.h>

#include <random>

#include <tec/correction.hpp>

#include "support.hpp"

using namespace tec;

namespace {

double F1(const EdgeCut& e) { return area_fractions(e).liquid; }

// Random reachable target: a point on the correction path itself.
struct Instance {
    EdgeCut e;
    Direction dir;
    double target;
};

std::optional<Instance> reachable_instance(std::mt19937_64& rng, int case_id) {
    const EdgeCut e = test::random_cut(rng, case_id);
    const Direction dir = rng() % 2 ? Direction::Expand : Direction::Shrink;
    const double tau = std::uniform_real_distribution<double>(0.0, 0.95)(rng);
    const auto moved = correction_path(e, dir, tau);
    if (!moved) return std::nullopt;
    return Instance{e, dir, F1(*moved)};
}

}  // namespace

TEST_SUITE("correction") {

TEST_CASE("case 5 closed-form shrink") {
    EdgeCut e;
    e.c = Material::Liquid;
    e.R = {{{0.7, 1}, {0, 1}, {0.4, 1}}};
    const Correction c = edge_cut_correction(e, 0.105);
    REQUIRE(c.status == CorrectionStatus::Corrected);
    CHECK(c.tau == doctest::Approx(0.5));
    CHECK(c.cut.R[0][0] == doctest::Approx(0.35));
    CHECK(c.cut.R[2][0] == doctest::Approx(0.7));
    CHECK(F1(c.cut) == doctest::Approx(0.105).epsilon(1e-14));
}

TEST_CASE("target equal to the current fraction changes nothing") {
    std::mt19937_64 rng(21);
    for (int k = 1; k <= 6; ++k) {
        const EdgeCut e = test::random_cut(rng, k);
        const Correction c = edge_cut_correction(e, F1(e));
        CHECK(c.status != CorrectionStatus::Unreachable);
        CHECK(c.tau <= 1e-12);
        CHECK(std::abs(F1(c.cut) - F1(e)) <= 1e-14);
        CHECK(cut_count(c.cut) == cut_count(e));
    }
}

TEST_CASE("case 4 below its closed-row limit is unreachable") {
    // Closing every row at its split point leaves the medial triangle, F1 = 0.25.
    EdgeCut e;
    e.R = {{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}};
    CHECK(F1(e) == doctest::Approx(0.73));
    CHECK(edge_cut_correction(e, 0.3).status == CorrectionStatus::Corrected);
    const Correction c = edge_cut_correction(e, 0.1);
    CHECK(c.status == CorrectionStatus::Unreachable);
    CHECK(c.cut == e);
}

TEST_CASE("targets outside [0,1] are rejected") {
    CHECK_THROWS_AS(edge_cut_correction(EdgeCut::pure(Material::Air), 1.5), std::invalid_argument);
    CHECK_THROWS_AS(edge_cut_correction(EdgeCut::pure(Material::Air), -0.1), std::invalid_argument);
}

TEST_CASE("make_target direction") {
    EdgeCut e;
    e.c = Material::Liquid;
    e.R = {{{0.7, 1}, {0, 1}, {0.4, 1}}};
    CHECK(make_target(e, 0.1).direction == Direction::Shrink);
    CHECK(make_target(e, 0.9).direction == Direction::Expand);
    CHECK(make_target(e, F1(e)).direction == Direction::None);
}

TEST_CASE("correction is exact and preserves the cut counts") {
    std::mt19937_64 rng(22);
    int done = 0;
    for (int k = 2; k <= 6; ++k) {
        for (int i = 0; i < 2000; ++i) {
            const auto inst = reachable_instance(rng, k);
            if (!inst) continue;
            const Correction c = edge_cut_correction(inst->e, inst->target);
            REQUIRE(c.status != CorrectionStatus::Unreachable);
            REQUIRE(std::abs(F1(c.cut) - inst->target) <= 1e-12);
            REQUIRE(cut_count(c.cut) == cut_count(inst->e));
            REQUIRE(classify(c.cut).case_id == k);
            ++done;
        }
    }
    CHECK(done > 9000);
}

TEST_CASE("two-cut shrink keeps the outer ratio") {
    std::mt19937_64 rng(23);
    for (int k : {2, 3, 4, 6}) {
        for (int i = 0; i < 500; ++i) {
            // Shrinking in the basic-case frame moves two-cut rows toward their split point.
            const EdgeCut e = test::canonical_cut(rng, k);
            for (double tau : {0.1, 0.4, 0.8}) {
                const auto m = correction_path(e, Direction::Shrink, tau);
                if (!m) continue;
                for (int r = 0; r < 3; ++r) {
                    if (row_count(e.R[r]) != 2) continue;
                    const double before = e.R[r][0] / (1.0 - e.R[r][1]);
                    const double after = m->R[r][0] / (1.0 - m->R[r][1]);
                    REQUIRE(after == doctest::Approx(before).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("fraction is monotone along the correction path") {
    std::mt19937_64 rng(24);
    for (int k = 2; k <= 6; ++k) {
        for (int i = 0; i < 200; ++i) {
            const EdgeCut e = test::random_cut(rng, k);
            for (Direction d : {Direction::Expand, Direction::Shrink}) {
                int sign = 0;
                double prev = F1(e);
                for (int s = 1; s < 100; ++s) {
                    const auto m = correction_path(e, d, s / 100.0);
                    if (!m) break;
                    const double f = F1(*m);
                    const int sg = (f > prev) - (f < prev);
                    if (sg != 0) {
                        if (sign == 0) sign = sg;
                        REQUIRE(sg == sign);
                    }
                    prev = f;
                }
                // Directions act on the basic-case frame, where liquid and air may be exchanged.
                const int grow = (d == Direction::Expand) != classify(e).swap ? 1 : -1;
                if (sign != 0) CHECK(sign == grow);
            }
        }
    }
}

}  // TEST_SUITE
