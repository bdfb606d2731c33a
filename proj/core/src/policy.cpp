#include "aforge/policy.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace aforge {

Mlp::Mlp(const std::vector<int>& layer_sizes, Rng& rng) : sizes_(layer_sizes) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least two layers");
    const int nl = static_cast<int>(sizes_.size()) - 1;
    w_.resize(nl);
    b_.resize(nl);
    for (int l = 0; l < nl; ++l) {
        const int fan_in = sizes_[l];
        const int fan_out = sizes_[l + 1];
        const double s = std::sqrt(6.0 / (fan_in + fan_out));
        w_[l].resize(fan_out, fan_in);
        for (int i = 0; i < fan_out; ++i)
            for (int j = 0; j < fan_in; ++j) w_[l](i, j) = rng.uniform(-s, s);
        b_[l] = Eigen::VectorXd::Zero(fan_out);
    }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input) const {
    Eigen::MatrixXd a = input;
    const int nl = static_cast<int>(w_.size());
    for (int l = 0; l < nl; ++l) {
        Eigen::MatrixXd z = a * w_[l].transpose();
        z.rowwise() += b_[l].transpose();
        a = (l + 1 < nl) ? z.array().tanh().matrix() : z;
    }
    return a;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Tape& tape) const {
    tape.activations.clear();
    tape.activations.push_back(input);
    Eigen::MatrixXd a = input;
    const int nl = static_cast<int>(w_.size());
    for (int l = 0; l < nl; ++l) {
        Eigen::MatrixXd z = a * w_[l].transpose();
        z.rowwise() += b_[l].transpose();
        a = (l + 1 < nl) ? z.array().tanh().matrix() : z;
        tape.activations.push_back(a);
    }
    return a;
}

Mlp::Gradients Mlp::zero_gradients() const {
    Gradients g;
    g.w.reserve(w_.size());
    g.b.reserve(b_.size());
    for (std::size_t l = 0; l < w_.size(); ++l) {
        g.w.push_back(Eigen::MatrixXd::Zero(w_[l].rows(), w_[l].cols()));
        g.b.push_back(Eigen::VectorXd::Zero(b_[l].size()));
    }
    return g;
}

Eigen::MatrixXd Mlp::backward(const Tape& tape, const Eigen::MatrixXd& output_grad,
                              Gradients& grads) const {
    const int nl = static_cast<int>(w_.size());
    Eigen::MatrixXd delta = output_grad;
    for (int l = nl - 1; l >= 0; --l) {
        grads.w[l] += delta.transpose() * tape.activations[l];
        grads.b[l] += delta.colwise().sum().transpose();
        if (l > 0) {
            const Eigen::MatrixXd& a = tape.activations[l];
            delta = ((delta * w_[l]).array() * (1.0 - a.array().square())).matrix();
        } else {
            delta = delta * w_[l];
        }
    }
    return delta;
}

int Mlp::parameter_count() const {
    int n = 0;
    for (std::size_t l = 0; l < w_.size(); ++l)
        n += static_cast<int>(w_[l].size() + b_[l].size());
    return n;
}

Eigen::VectorXd Mlp::flatten() const {
    Eigen::VectorXd theta(parameter_count());
    int k = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        theta.segment(k, w_[l].size()) = Eigen::Map<const Eigen::VectorXd>(w_[l].data(), w_[l].size());
        k += static_cast<int>(w_[l].size());
        theta.segment(k, b_[l].size()) = b_[l];
        k += static_cast<int>(b_[l].size());
    }
    return theta;
}

void Mlp::unflatten(const Eigen::VectorXd& theta) {
    int k = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        Eigen::Map<Eigen::VectorXd>(w_[l].data(), w_[l].size()) =
            theta.segment(k, w_[l].size());
        k += static_cast<int>(w_[l].size());
        b_[l] = theta.segment(k, b_[l].size());
        k += static_cast<int>(b_[l].size());
    }
}

Eigen::VectorXd Mlp::flatten_gradients(const Gradients& g) {
    int n = 0;
    for (std::size_t l = 0; l < g.w.size(); ++l)
        n += static_cast<int>(g.w[l].size() + g.b[l].size());
    Eigen::VectorXd out(n);
    int k = 0;
    for (std::size_t l = 0; l < g.w.size(); ++l) {
        out.segment(k, g.w[l].size()) =
            Eigen::Map<const Eigen::VectorXd>(g.w[l].data(), g.w[l].size());
        k += static_cast<int>(g.w[l].size());
        out.segment(k, g.b[l].size()) = g.b[l];
        k += static_cast<int>(g.b[l].size());
    }
    return out;
}

nlohmann::ordered_json Mlp::to_json() const {
    nlohmann::ordered_json j;
    j["layer_sizes"] = sizes_;
    j["activation"] = "tanh";
    nlohmann::ordered_json weights = nlohmann::ordered_json::array();
    nlohmann::ordered_json biases = nlohmann::ordered_json::array();
    for (std::size_t l = 0; l < w_.size(); ++l) {
        std::vector<double> wr;
        wr.reserve(w_[l].size());
        for (int i = 0; i < w_[l].rows(); ++i)
            for (int c = 0; c < w_[l].cols(); ++c) wr.push_back(w_[l](i, c)); // row-major
        weights.push_back(wr);
        biases.push_back(std::vector<double>(b_[l].data(), b_[l].data() + b_[l].size()));
    }
    j["weights"] = weights;
    j["biases"] = biases;
    return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
    Mlp m;
    m.sizes_ = j.at("layer_sizes").get<std::vector<int>>();
    if (j.at("activation").get<std::string>() != "tanh")
        throw std::invalid_argument("unsupported activation tag");
    const int nl = static_cast<int>(m.sizes_.size()) - 1;
    m.w_.resize(nl);
    m.b_.resize(nl);
    for (int l = 0; l < nl; ++l) {
        const auto wr = j.at("weights").at(l).get<std::vector<double>>();
        const int rows = m.sizes_[l + 1];
        const int cols = m.sizes_[l];
        if (static_cast<int>(wr.size()) != rows * cols)
            throw std::invalid_argument("weight block size mismatch");
        m.w_[l].resize(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int c = 0; c < cols; ++c) m.w_[l](i, c) = wr[i * cols + c];
        const auto br = j.at("biases").at(l).get<std::vector<double>>();
        m.b_[l] = Eigen::Map<const Eigen::VectorXd>(br.data(), br.size());
    }
    return m;
}

Policy::Policy(double rps_min, double rps_max, Rng& rng)
    : net_({kObsDim, 64, 64, 64, kActDim}, rng), rps_min_(rps_min), rps_max_(rps_max) {
    // Small final layer so initial actions sit near the output bias.
    const auto& sizes = net_.layer_sizes();
    int offset = 0;
    for (int l = 0; l + 2 < static_cast<int>(sizes.size()); ++l)
        offset += sizes[l + 1] * sizes[l] + sizes[l + 1];
    const int wlast = sizes.back() * sizes[sizes.size() - 2];
    Eigen::VectorXd theta = net_.flatten();
    theta.segment(offset, wlast) *= 0.01;
    net_.unflatten(theta);
}

Vector6 Policy::squash(const Vector6& raw) const {
    const double mid = 0.5 * (rps_min_ + rps_max_);
    const double half = 0.5 * (rps_max_ - rps_min_);
    return (mid + half * raw.array().tanh()).matrix();
}

Vector6 Policy::squash_jacobian_diag(const Vector6& raw) const {
    const double half = 0.5 * (rps_max_ - rps_min_);
    return (half * (1.0 - raw.array().tanh().square())).matrix();
}

Vector6 Policy::act(const Eigen::Matrix<double, kObsDim, 1>& obs) const {
    const Eigen::MatrixXd out = net_.forward(obs.transpose());
    return squash(Vector6(out.row(0).transpose()));
}

void Policy::bias_output_towards(const Vector6& command) {
    const double mid = 0.5 * (rps_min_ + rps_max_);
    const double half = 0.5 * (rps_max_ - rps_min_);
    Vector6 target;
    for (int i = 0; i < 6; ++i) {
        const double u = std::clamp((command[i] - mid) / half, -0.999, 0.999);
        target[i] = std::atanh(u);
    }
    Eigen::VectorXd theta = net_.flatten();
    theta.tail(kActDim) = target;
    net_.unflatten(theta);
}

nlohmann::ordered_json Policy::to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "aforge-policy";
    j["version"] = 1;
    j["rps_min"] = rps_min_;
    j["rps_max"] = rps_max_;
    j["network"] = net_.to_json();
    return j;
}

Policy Policy::from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != "aforge-policy" ||
        j.at("version").get<int>() != 1)
        throw std::invalid_argument("unrecognized policy file header");
    Policy p;
    p.rps_min_ = j.at("rps_min").get<double>();
    p.rps_max_ = j.at("rps_max").get<double>();
    p.net_ = Mlp::from_json(j.at("network"));
    return p;
}

void Policy::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write policy file: " + path);
    f << to_json().dump(2) << "\n";
}

Policy Policy::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read policy file: " + path);
    nlohmann::json j;
    f >> j;
    return from_json(j);
}

} // namespace aforge
