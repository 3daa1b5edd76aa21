// Trajectory generation, spherical displacement, and bearing geometry.
// Expected values marked "frozen" were computed with an independent
// high-precision script before this implementation existed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "csisim/errors.hpp"
#include "csisim/rng.hpp"
#include "csisim/trajectory.hpp"
#include "doctest.h"

using namespace csisim;

namespace {
constexpr double kPi = 3.14159265358979323846;

TrajectorySpec circular_spec() {
    TrajectorySpec s;
    s.kind = TrajectoryKind::circular;
    s.radius_m = 0.3;
    s.duration_s = 10.0;
    s.sample_rate_hz = 100.0;
    return s;
}
}  // namespace

TEST_CASE("stationary_emits_identical_poses_on_nominal_grid") {
    TrajectorySpec s;
    s.kind = TrajectoryKind::stationary;
    s.start.pos = {1.0, 2.0, 3.0};
    s.start.yaw = 0.5;
    s.duration_s = 10.0;
    s.sample_rate_hz = 100.0;
    auto traj = generate_trajectory(s);
    REQUIRE(traj.size() == 1001);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj[k].t_ns == k * 10'000'000ull);
        CHECK(traj[k].pos.x == 1.0);
        CHECK(traj[k].pos.y == 2.0);
        CHECK(traj[k].pos.z == 3.0);
        CHECK(traj[k].yaw == 0.5);
    }
}

TEST_CASE("circular_matches_closed_form_parameterization") {
    // Independent algebraic route: start (0,0) yaw 0 puts the center at
    // (0, r); position(t) = (r sin(w t), r - r cos(w t)) with w = 2 pi / T.
    auto traj = generate_trajectory(circular_spec());
    REQUIRE(traj.size() == 1001);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = static_cast<double>(traj[k].t_ns) * 1e-9;
        const double w = 2.0 * kPi / 10.0;
        CHECK(std::abs((traj[k].pos.x) - (0.3 * std::sin(w * t))) <= 1e-12);
        CHECK(std::abs((traj[k].pos.y) - (0.3 - 0.3 * std::cos(w * t))) <= 1e-12);
        CHECK(traj[k].pos.z == 0.0);
    }
}

TEST_CASE("circular_midpoint_is_diametrically_opposite_start") {
    auto traj = generate_trajectory(circular_spec());
    const Pose& mid = traj[500];
    CHECK(std::abs((mid.pos.x) - (0.0)) <= 1e-12);
    CHECK(std::abs((mid.pos.y) - (0.6)) <= 1e-12);
    CHECK(mid.pos.z == 0.0);
}

TEST_CASE("circular_poses_stay_on_the_circle") {
    auto traj = generate_trajectory(circular_spec());
    const Vec3 center{0.0, 0.3, 0.0};
    for (const Pose& p : traj) CHECK(std::abs((p.pos - center).norm() - 0.3) < 1e-9);
}

TEST_CASE("circular_chord_sum_matches_circumference") {
    auto traj = generate_trajectory(circular_spec());
    const double analytic = 2.0 * kPi * 0.3;
    CHECK(std::abs(path_length(traj) - analytic) / analytic < 1e-3);
}

TEST_CASE("circular_sample_spacing_is_a_fifth_of_the_aliasing_limit") {
    auto traj = generate_trajectory(circular_spec());
    auto st = sample_spacing(traj);
    // frozen: chord 2 r sin(pi/1000) for the default circle
    CHECK(st.mean_m == doctest::Approx(0.0018849524915277379).epsilon(1e-12));
    CHECK(st.max_m == doctest::Approx(0.0018849524915277379).epsilon(1e-9));
    CHECK(st.max_m < 0.0271);  // half wavelength at 5.54 GHz
}

TEST_CASE("circular_with_nonzero_start_yaw_turns_left") {
    TrajectorySpec s = circular_spec();
    s.start.pos = {2.0, -1.0, 0.5};
    s.start.yaw = kPi / 2.0;  // heading +y, center must be at (-r, 0) offset
    auto traj = generate_trajectory(s);
    const Vec3 center{2.0 - 0.3, -1.0, 0.5};
    for (const Pose& p : traj) CHECK(std::abs((p.pos - center).norm() - 0.3) < 1e-9);
    CHECK(std::abs((traj.front().pos.x) - (2.0)) <= 1e-12);
    // Quarter way around, a left (counterclockwise) turn from +y heading
    // moves the robot toward -x and +y; halfway it sits at the antipode.
    CHECK(std::abs((traj[250].pos.x) - (2.0 - 0.3)) <= 1e-9);
    CHECK(std::abs((traj[250].pos.y) - (-1.0 + 0.3)) <= 1e-9);
    CHECK(std::abs((traj[500].pos.x) - (2.0 - 0.6)) <= 1e-9);
    CHECK(std::abs((traj[500].pos.y) - (-1.0)) <= 1e-9);
}

TEST_CASE("linear_moves_along_initial_heading") {
    TrajectorySpec s;
    s.kind = TrajectoryKind::linear;
    s.length_m = 2.0 * kPi * 0.3;
    s.duration_s = 10.0;
    s.sample_rate_hz = 100.0;
    s.start.yaw = kPi / 4.0;
    auto traj = generate_trajectory(s);
    REQUIRE(traj.size() == 1001);
    CHECK(path_length(traj) == doctest::Approx(s.length_m).epsilon(1e-12));
    const Pose& last = traj.back();
    CHECK(last.pos.x == doctest::Approx(s.length_m * std::cos(kPi / 4.0)).epsilon(1e-12));
    CHECK(last.pos.y == doctest::Approx(s.length_m * std::sin(kPi / 4.0)).epsilon(1e-12));
    for (const Pose& p : traj) CHECK(p.yaw == doctest::Approx(kPi / 4.0));
}

TEST_CASE("waypoints_path_visits_corners_at_constant_speed") {
    TrajectorySpec s;
    s.kind = TrajectoryKind::waypoints;
    s.waypoints = {{1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
    s.duration_s = 2.0;
    s.sample_rate_hz = 100.0;
    auto traj = generate_trajectory(s);
    REQUIRE(traj.size() == 201);
    CHECK(std::abs((traj[100].pos.x) - (1.0)) <= 1e-12);
    CHECK(std::abs((traj[100].pos.y) - (0.0)) <= 1e-12);
    CHECK(std::abs((traj.back().pos.x) - (1.0)) <= 1e-12);
    CHECK(std::abs((traj.back().pos.y) - (1.0)) <= 1e-12);
    CHECK(traj[50].yaw == doctest::Approx(0.0));
    CHECK(traj[150].yaw == doctest::Approx(kPi / 2.0));
}

TEST_CASE("generate_rejects_bad_parameters") {
    TrajectorySpec s = circular_spec();
    s.duration_s = 0.0;
    CHECK_THROWS_AS(generate_trajectory(s), ValidationError);
    s = circular_spec();
    s.sample_rate_hz = -1.0;
    CHECK_THROWS_AS(generate_trajectory(s), ValidationError);
    s = circular_spec();
    s.radius_m = 0.0;
    CHECK_THROWS_AS(generate_trajectory(s), ValidationError);
    s = circular_spec();
    s.kind = TrajectoryKind::linear;
    s.length_m = 0.0;
    CHECK_THROWS_AS(generate_trajectory(s), ValidationError);
    s = circular_spec();
    s.kind = TrajectoryKind::waypoints;
    s.waypoints.clear();
    CHECK_THROWS_AS(generate_trajectory(s), ValidationError);
}

TEST_CASE("displacement_spherical_axis_cases") {
    Pose a, b;
    SUBCASE("zero displacement uses the zero convention") {
        auto s = displacement_spherical(a, a);
        CHECK(s.d == 0.0);
        CHECK(s.phi_disp == 0.0);
        CHECK(s.xi_disp == 0.0);
    }
    SUBCASE("unit x lies in the horizontal plane") {
        b.pos = {1.0, 0.0, 0.0};
        auto s = displacement_spherical(a, b);
        CHECK(s.d == doctest::Approx(1.0));
        CHECK(s.phi_disp == doctest::Approx(0.0));
        CHECK(s.xi_disp == doctest::Approx(kPi / 2.0));
    }
    SUBCASE("unit z is along the polar axis") {
        b.pos = {0.0, 0.0, 1.0};
        auto s = displacement_spherical(a, b);
        CHECK(s.d == doctest::Approx(1.0));
        CHECK(s.phi_disp == doctest::Approx(0.0));
        CHECK(s.xi_disp == doctest::Approx(0.0));
    }
}

TEST_CASE("displacement_spherical_round_trips_random_vectors") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        Pose a, b;
        a.pos = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        b.pos = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
        auto s = displacement_spherical(a, b);
        CHECK(s.xi_disp >= 0.0);
        CHECK(s.xi_disp <= kPi);
        CHECK(s.phi_disp >= -kPi);
        CHECK(s.phi_disp < kPi + 1e-15);
        Vec3 rec = spherical_to_cartesian(s);
        Vec3 want = b.pos - a.pos;
        CHECK(std::abs(rec.x - want.x) < 1e-9);
        CHECK(std::abs(rec.y - want.y) < 1e-9);
        CHECK(std::abs(rec.z - want.z) < 1e-9);
    }
}

TEST_CASE("ground_truth_bearing_examples") {
    Pose rx, tx;
    SUBCASE("diagonal offset") {
        tx.pos = {1.0, 1.0, 0.0};
        CHECK(ground_truth_bearing(rx, tx) == doctest::Approx(kPi / 4.0));
    }
    SUBCASE("default node separation") {
        tx.pos = {3.858, 0.929, 0.0};
        // frozen: atan2(0.929, 3.858)
        CHECK(ground_truth_bearing(rx, tx) == doctest::Approx(0.23629970495614175).epsilon(1e-14));
    }
    SUBCASE("behind along minus x wraps to the interval boundary") {
        tx.pos = {-1.0, 0.0, 0.0};
        CHECK(ground_truth_bearing(rx, tx) == doctest::Approx(-kPi));
    }
    SUBCASE("rx yaw rotates the frame") {
        tx.pos = {1.0, 1.0, 0.0};
        rx.yaw = kPi / 4.0;
        CHECK(std::abs((ground_truth_bearing(rx, tx)) - (0.0)) <= 1e-15);
    }
    SUBCASE("co-located nodes rejected") {
        tx.pos = {0.0, 0.0, 5.0};
        CHECK_THROWS_AS(ground_truth_bearing(rx, tx), ValidationError);
    }
}

TEST_CASE("wrap_pi_half_open_interval") {
    CHECK(wrap_pi(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_pi(-kPi) == doctest::Approx(-kPi));
    CHECK(wrap_pi(3.0 * kPi) == doctest::Approx(-kPi));
    CHECK(wrap_pi(0.1) == doctest::Approx(0.1));
    CHECK(wrap_pi(2.0 * kPi + 0.1) == doctest::Approx(0.1));
}

TEST_CASE("centroid_of_full_circle_is_near_the_center") {
    auto traj = generate_trajectory(circular_spec());
    Vec3 c = centroid(traj);
    // Start pose counted twice (closed loop), biasing by r/n toward it.
    CHECK(std::abs(c.x - 0.0) < 1e-3);
    CHECK(std::abs(c.y - 0.3) < 1e-3);
}
