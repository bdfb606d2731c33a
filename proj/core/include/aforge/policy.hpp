#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aforge/dynamics.hpp"
#include "aforge/rng.hpp"

namespace aforge {

/// Fully connected network with tanh hidden activations and a linear output
/// layer. Supports batched forward passes and backprop; rows are samples.
class Mlp {
public:
    Mlp() = default;
    Mlp(const std::vector<int>& layer_sizes, Rng& rng);

    const std::vector<int>& layer_sizes() const { return sizes_; }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& input) const;

    /// Forward pass that keeps activations for a following backward().
    struct Tape {
        std::vector<Eigen::MatrixXd> activations; // input + post-tanh per hidden + output
    };
    Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Tape& tape) const;

    /// Gradient of a scalar loss wrt parameters given dL/d(output).
    /// Returns dL/d(input) as well.
    struct Gradients {
        std::vector<Eigen::MatrixXd> w;
        std::vector<Eigen::VectorXd> b;
    };
    Eigen::MatrixXd backward(const Tape& tape, const Eigen::MatrixXd& output_grad,
                             Gradients& grads) const;

    Gradients zero_gradients() const;

    // Flat parameter access for optimizers and serialization.
    int parameter_count() const;
    Eigen::VectorXd flatten() const;
    void unflatten(const Eigen::VectorXd& theta);
    static Eigen::VectorXd flatten_gradients(const Gradients& g);

    nlohmann::ordered_json to_json() const;
    static Mlp from_json(const nlohmann::json& j);

private:
    std::vector<int> sizes_;
    std::vector<Eigen::MatrixXd> w_; // w_[l]: sizes_[l+1] x sizes_[l]
    std::vector<Eigen::VectorXd> b_;

    friend class Adam;
};

/// Control policy: 15 -> 64 -> 64 -> 64 -> 6 network whose raw output is
/// squashed to the actuator range with a tanh unit, so commands always lie
/// in [rps_min, rps_max].
class Policy {
public:
    Policy() = default;
    Policy(double rps_min, double rps_max, Rng& rng);

    static constexpr int kObsDim = 15;
    static constexpr int kActDim = 6;

    /// Deterministic action for an observation row vector.
    Vector6 act(const Eigen::Matrix<double, kObsDim, 1>& obs) const;

    /// Raw (pre-squash) network output, batched.
    Eigen::MatrixXd raw(const Eigen::MatrixXd& obs) const { return net_.forward(obs); }

    Vector6 squash(const Vector6& raw) const;
    /// d(squash)/d(raw), elementwise.
    Vector6 squash_jacobian_diag(const Vector6& raw) const;

    Mlp& network() { return net_; }
    const Mlp& network() const { return net_; }
    double rps_min() const { return rps_min_; }
    double rps_max() const { return rps_max_; }

    /// Shifts the output bias so the squashed zero-observation action equals
    /// the given command (e.g. a hover solution).
    void bias_output_towards(const Vector6& command);

    void save(const std::string& path) const;
    static Policy load(const std::string& path);
    nlohmann::ordered_json to_json() const;
    static Policy from_json(const nlohmann::json& j);

private:
    Mlp net_;
    double rps_min_ = 83.0;
    double rps_max_ = 400.0;
};

} // namespace aforge
