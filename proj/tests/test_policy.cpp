#include <doctest.h>

#include <cstdio>

#include "aforge/policy.hpp"

using namespace aforge;

TEST_CASE("mlp forward shapes and determinism") {
    Rng rng(301);
    const Mlp net({4, 8, 3}, rng);
    Eigen::MatrixXd x(5, 4);
    Rng rx(302);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = rx.normal();
    const Eigen::MatrixXd y1 = net.forward(x);
    const Eigen::MatrixXd y2 = net.forward(x);
    CHECK(y1.rows() == 5);
    CHECK(y1.cols() == 3);
    CHECK((y1 - y2).norm() == 0.0);
}

TEST_CASE("mlp backward matches finite differences") {
    Rng rng(303);
    Mlp net({3, 6, 5, 2}, rng);
    Eigen::MatrixXd x(4, 3);
    Rng rx(304);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = rx.normal();

    // Loss = 0.5 * |Y|^2, so dL/dY = Y.
    Mlp::Tape tape;
    const Eigen::MatrixXd y = net.forward(x, tape);
    Mlp::Gradients grads = net.zero_gradients();
    const Eigen::MatrixXd dx = net.backward(tape, y, grads);
    const Eigen::VectorXd g = Mlp::flatten_gradients(grads);

    const Eigen::VectorXd theta = net.flatten();
    CHECK(theta.size() == net.parameter_count());
    CHECK(g.size() == theta.size());

    const double eps = 1e-6;
    auto loss_at = [&](const Eigen::VectorXd& t) {
        Mlp probe = net;
        probe.unflatten(t);
        return 0.5 * probe.forward(x).squaredNorm();
    };
    // Spot-check a spread of coordinates rather than all of them.
    for (int k = 0; k < theta.size(); k += std::max<int>(1, theta.size() / 37)) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp[k] += eps;
        tm[k] -= eps;
        const double fd = (loss_at(tp) - loss_at(tm)) / (2.0 * eps);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
    }

    // Input gradient, same trick.
    for (int k = 0; k < 3; ++k) {
        Eigen::MatrixXd xp = x, xm = x;
        xp(1, k) += eps;
        xm(1, k) -= eps;
        const double fd =
            (0.5 * net.forward(xp).squaredNorm() - 0.5 * net.forward(xm).squaredNorm()) /
            (2.0 * eps);
        CHECK(dx(1, k) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("flatten then unflatten is the identity") {
    Rng rng(305);
    Mlp net({5, 7, 4}, rng);
    const Eigen::VectorXd theta = net.flatten();
    Rng r2(306);
    Mlp other({5, 7, 4}, r2);
    other.unflatten(theta);
    CHECK((other.flatten() - theta).norm() == 0.0);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(3, 5);
    CHECK((other.forward(x) - net.forward(x)).norm() == 0.0);
}

TEST_CASE("policy actions always respect actuator bounds") {
    Rng rng(307);
    const Policy pol(83.0, 400.0, rng);
    Rng rx(308);
    for (int t = 0; t < 200; ++t) {
        Eigen::Matrix<double, 15, 1> obs;
        for (int i = 0; i < 15; ++i) obs[i] = 100.0 * rx.normal(); // deliberately huge
        const Vector6 a = pol.act(obs);
        for (int k = 0; k < 6; ++k) {
            CHECK(a[k] >= 83.0);
            CHECK(a[k] <= 400.0);
        }
    }
}

TEST_CASE("output bias shifts the zero-observation action to a target") {
    Rng rng(309);
    Policy pol(83.0, 400.0, rng);
    const Vector6 hover = Vector6::Constant(217.3);
    pol.bias_output_towards(hover);
    const Vector6 a = pol.act(Eigen::Matrix<double, 15, 1>::Zero());
    for (int k = 0; k < 6; ++k) CHECK(a[k] == doctest::Approx(217.3).epsilon(1e-9));
}

TEST_CASE("squash jacobian matches finite differences") {
    Rng rng(310);
    const Policy pol(83.0, 400.0, rng);
    Vector6 raw;
    raw << -1.2, -0.3, 0.0, 0.4, 1.1, 2.0;
    const Vector6 jac = pol.squash_jacobian_diag(raw);
    const double eps = 1e-7;
    for (int k = 0; k < 6; ++k) {
        Vector6 rp = raw, rm = raw;
        rp[k] += eps;
        rm[k] -= eps;
        const double fd = (pol.squash(rp)[k] - pol.squash(rm)[k]) / (2.0 * eps);
        CHECK(jac[k] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("policy save/load round trip") {
    Rng rng(311);
    Policy pol(83.0, 400.0, rng);
    pol.bias_output_towards(Vector6::Constant(200.0));
    const std::string path = "policy_roundtrip_test.json";
    pol.save(path);
    const Policy back = Policy::load(path);
    std::remove(path.c_str());

    CHECK(back.rps_min() == pol.rps_min());
    CHECK(back.rps_max() == pol.rps_max());
    Rng rx(312);
    for (int t = 0; t < 20; ++t) {
        Eigen::Matrix<double, 15, 1> obs;
        for (int i = 0; i < 15; ++i) obs[i] = rx.normal();
        CHECK((back.act(obs) - pol.act(obs)).norm() < 1e-12);
    }
}
