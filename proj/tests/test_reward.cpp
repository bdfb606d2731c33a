#include <doctest.h>

#include <cmath>

#include "aforge/reward.hpp"
#include "aforge/rng.hpp"

using namespace aforge;

namespace {

RewardInputs base_inputs() {
    RewardInputs in;
    in.p_prev = {-0.5, 0.0, 0.0};
    in.p_cur = {-0.4, 0.0, 0.0};
    in.s = {0.5, 0.0, 0.0};
    in.s_prev = {0.0, 0.0, 0.0};
    in.d_best = 0.9;
    return in;
}

} // namespace

TEST_CASE("position reward is the distance decrease, faded by the curriculum") {
    RewardInputs in = base_inputs();
    const RewardBreakdown r0 = reward(in);
    CHECK(r0.pos == doctest::Approx(0.1).epsilon(1e-12));

    in.curriculum = 1.0;
    const RewardBreakdown r1 = reward(in);
    CHECK(r1.pos == 0.0);

    in.curriculum = 0.5;
    CHECK(reward(in).pos == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("angular velocity penalty kicks in above 10 rad/s") {
    RewardInputs in = base_inputs();
    in.omega = {12.0, 0.0, 0.0};
    CHECK(reward(in).angvel == doctest::Approx(-4.0).epsilon(1e-12));
    in.omega = {5.0, 0.0, 0.0};
    CHECK(reward(in).angvel == 0.0);
}

TEST_CASE("orientation penalty: z threshold and linear y term") {
    RewardInputs in = base_inputs();
    in.orientation = Eigen::Quaterniond::Identity();
    CHECK(reward(in).orientation == 0.0);

    // Upside down about x: both the z and y axes swing through pi.
    in.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
    const double expect = -2.0 * (M_PI - M_PI / 2.0) - 0.01 * M_PI;
    CHECK(reward(in).orientation == doctest::Approx(expect).epsilon(1e-9));

    // Pure yaw leaves z alone; only the small y term bites.
    in.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(1.0, Eigen::Vector3d::UnitZ()));
    CHECK(reward(in).orientation == doctest::Approx(-0.01 * 1.0).epsilon(1e-9));
}

TEST_CASE("crash penalty scales with the curriculum") {
    RewardInputs in = base_inputs();
    in.crash_dist = true;
    in.curriculum = 1.0;
    CHECK(reward(in).crash == doctest::Approx(-100.0));
    in.crash_orient = true;
    CHECK(reward(in).crash == doctest::Approx(-200.0));
    in.curriculum = 0.0;
    CHECK(reward(in).crash == 0.0);
}

TEST_CASE("instantaneous task performance") {
    RewardInputs in = base_inputs();
    in.gate_crossed = true;
    CHECK(reward(in).instantaneous_task_performance == doctest::Approx(10.0));
    in.gate_crossed = false;
    in.gate_missed = true;
    CHECK(reward(in).instantaneous_task_performance == doctest::Approx(-100.0));
}

TEST_CASE("no-improvement penalty uses the 0.5 m slack") {
    RewardInputs in = base_inputs();
    in.d_best = 0.2; // current distance 0.9, excess over best+slack = 0.2
    const double dist = (in.p_cur - in.s).norm();
    const double expect = -2.0 * std::max(dist - in.d_best - 0.5, 0.0);
    CHECK(reward(in).no_improvement == doctest::Approx(expect).epsilon(1e-12));
    in.d_best = dist; // fresh best, no penalty
    CHECK(reward(in).no_improvement == 0.0);
}

TEST_CASE("path deviation factor geometry") {
    const double hw = 0.25;
    SUBCASE("straight segment") {
        const Eigen::Vector3d s_prev(0, 0, 0), s(1, 0, 0);
        CHECK(path_deviation_factor({0.5, 0.0, 0.0}, s_prev, s, hw) == 0.0);
        CHECK(path_deviation_factor({0.5, 0.2, 0.1}, s_prev, s, hw) == 0.0);
        // With both gates at y=0 the corridor equals the bounding box, so any
        // lateral excursion beyond the half width is fully penalized.
        CHECK(path_deviation_factor({0.5, 0.4, 0.0}, s_prev, s, hw) == 1.0);
        CHECK(path_deviation_factor({0.5, 5.0, 0.0}, s_prev, s, hw) == 1.0);
    }
    SUBCASE("dog-leg segment interpolates between corridor and box") {
        const Eigen::Vector3d s_prev(0, 0, 0), s(1, 0.5, 0);
        CHECK(path_deviation_factor({0.5, 0.3, 0.0}, s_prev, s, hw) == 0.0);
        const double mid = path_deviation_factor({0.2, 0.45, 0.0}, s_prev, s, hw);
        CHECK(mid == doctest::Approx(0.25).epsilon(1e-12));
        // Monotone in the lateral offset inside the box.
        const double far = path_deviation_factor({0.2, 0.55, 0.0}, s_prev, s, hw);
        CHECK(far == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(far >= mid);
        // Outside the bounding box of the two gates.
        CHECK(path_deviation_factor({0.2, 0.9, 0.0}, s_prev, s, hw) == 1.0);
    }
}

TEST_CASE("total equals the sum of components, penalties are non-positive") {
    Rng rng(83);
    for (int t = 0; t < 500; ++t) {
        RewardInputs in;
        in.p_prev = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        in.p_cur = in.p_prev + Eigen::Vector3d(rng.uniform(-0.1, 0.1),
                                               rng.uniform(-0.1, 0.1),
                                               rng.uniform(-0.1, 0.1));
        in.s = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        in.s_prev = in.s - Eigen::Vector3d(0.5, 0, 0);
        in.d_best = rng.uniform(0.0, 3.0);
        in.omega = {rng.uniform(-15, 15), rng.uniform(-15, 15), rng.uniform(-15, 15)};
        in.orientation = Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(),
                                            rng.normal()).normalized();
        in.curriculum = rng.uniform();
        in.gate_crossed = rng.uniform() < 0.1;
        in.gate_missed = !in.gate_crossed && rng.uniform() < 0.1;
        in.crash_dist = rng.uniform() < 0.1;
        in.action = Vector6::Constant(rng.uniform(83, 400));
        in.action_prev = Vector6::Constant(rng.uniform(83, 400));
        in.has_action_prev = true;
        RewardWeights w;
        w.smoothing_weight = 1e-3;

        const RewardBreakdown r = reward(in, w);
        const double sum = r.pos + r.path_deviation + r.no_improvement + r.angvel +
                           r.orientation + r.crash + r.instantaneous_task_performance +
                           r.smoothing;
        CHECK(r.total == doctest::Approx(sum).epsilon(1e-12));
        CHECK(r.path_deviation <= 0.0);
        CHECK(r.no_improvement <= 0.0);
        CHECK(r.angvel <= 0.0);
        CHECK(r.orientation <= 0.0);
        CHECK(r.crash <= 0.0);
        CHECK(r.smoothing <= 0.0);
    }
}

TEST_CASE("smoothing penalty formula and gating") {
    const Vector6 a = Vector6::Constant(200.0);
    Vector6 b = a;
    b[0] = 210.0;
    CHECK(smoothing_penalty(a, a, 1e-3) == 0.0);
    CHECK(smoothing_penalty(a, b, 0.0) == 0.0);
    CHECK(smoothing_penalty(a, b, 1e-3) == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("r6d round trips rotations") {
    Rng rng(89);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Quaterniond q =
            Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal())
                .normalized();
        const Eigen::Matrix3d R = q.toRotationMatrix();
        Eigen::Matrix<double, 6, 1> r6d;
        r6d << R.col(0), R.col(1);
        const Eigen::Matrix3d back = rotation_from_r6d(r6d);
        CHECK((back - R).norm() < 1e-12);
    }
    // Gram-Schmidt fixes slightly corrupted inputs into a valid rotation.
    Eigen::Matrix<double, 6, 1> noisy;
    noisy << 1.01, 0.02, 0.0, 0.03, 0.98, 0.01;
    const Eigen::Matrix3d R = rotation_from_r6d(noisy);
    CHECK((R * R.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observation layout") {
    RigidBodyState s;
    s.position = {1.0, 2.0, 3.0};
    s.linear_velocity = {0.1, 0.2, 0.3};
    s.angular_velocity = {0.4, 0.5, 0.6};
    s.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitZ()));
    Gate g;
    g.center = {2.0, 2.0, 3.0};

    const Observation obs = observe(s, g);
    CHECK((obs.p - Eigen::Vector3d(1.0, 0.0, 0.0)).norm() < 1e-12);
    const Eigen::Matrix3d R = s.orientation.toRotationMatrix();
    CHECK((obs.r6d.head<3>() - R.col(0)).norm() < 1e-12);
    CHECK((obs.r6d.tail<3>() - R.col(1)).norm() < 1e-12);
    CHECK((obs.v - s.linear_velocity).norm() == 0.0);
    CHECK((obs.omega - s.angular_velocity).norm() == 0.0);

    const auto vec = obs.to_vector();
    CHECK(vec.size() == 15);
    CHECK(vec[0] == obs.p[0]);
    CHECK(vec[14] == obs.omega[2]);
}

TEST_CASE("axis angles") {
    CHECK(axis_angle_z(Eigen::Quaterniond::Identity()) == doctest::Approx(0.0));
    const Eigen::Quaterniond flip(Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()));
    CHECK(axis_angle_z(flip) == doctest::Approx(M_PI).epsilon(1e-9));
    CHECK(axis_angle_y(flip) == doctest::Approx(M_PI).epsilon(1e-9));
    const Eigen::Quaterniond yaw(Eigen::AngleAxisd(1.0, Eigen::Vector3d::UnitZ()));
    CHECK(axis_angle_z(yaw) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(axis_angle_y(yaw) == doctest::Approx(1.0).epsilon(1e-9));
}
