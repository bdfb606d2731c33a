#include "aforge/ppo.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aforge {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727; // log(sqrt(2*pi))
}

Eigen::VectorXd Adam::update(const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    return (-lr_) * (m_ / bc1).cwiseQuotient(((v_ / bc2).cwiseSqrt().array() + eps_).matrix());
}

PpoTrainer::PpoTrainer(const VehicleModel& model, const TaskSpec& task,
                       const PpoConfig& cfg, std::uint64_t seed)
    : model_(model), task_(task), cfg_(cfg), rng_(Rng(seed).derive(0x70706f)) {
    Rng net_rng = rng_.derive(1);
    policy_ = Policy(model.rotor.rps_min, model.rotor.rps_max, net_rng);
    value_ = Mlp({Policy::kObsDim, 64, 64, 64, 1}, net_rng);
    log_std_ = Vector6::Constant(cfg.init_log_std);

    const HoverResult hover = hover_feasible(model.map, model.mass_props.mass, model.rotor);
    if (hover.hover_speeds) policy_.bias_output_towards(*hover.hover_speeds);

    policy_opt_ = Adam(policy_.network().parameter_count(), cfg.learning_rate);
    value_opt_ = Adam(value_.parameter_count(), cfg.value_learning_rate);
    log_std_opt_ = Adam(6, cfg.learning_rate);

    EpisodeConfig ep;
    ep.control_dt = cfg.control_dt;
    if (hover.hover_speeds) ep.initial_rotor_speeds = *hover.hover_speeds;
    RewardWeights weights;
    weights.smoothing_weight = cfg.smoothing_weight;

    envs_.reserve(cfg.num_envs);
    obs_.resize(cfg.num_envs);
    for (int e = 0; e < cfg.num_envs; ++e) {
        envs_.emplace_back(model, task, ep, weights);
        obs_[e] = envs_[e].reset(rng_.derive(0x1000 + episode_counter_++));
    }
}

void PpoTrainer::train_epochs(int n) {
    for (int i = 0; i < n; ++i) run_epoch();
}

void PpoTrainer::run_epoch() {
    const int N = cfg_.num_envs;
    const int H = cfg_.horizon;
    const int obs_dim = Policy::kObsDim;
    const int act_dim = Policy::kActDim;

    const double c = cfg_.curriculum_fraction <= 0.0
                         ? 1.0
                         : std::min(1.0, static_cast<double>(epoch_) /
                                             (cfg_.curriculum_fraction * cfg_.epochs));
    for (auto& env : envs_) env.set_curriculum(c);

    Eigen::MatrixXd obs(H * N, obs_dim);
    Eigen::MatrixXd actions(H * N, act_dim); // pre-squash action samples
    Eigen::VectorXd logp(H * N);
    Eigen::VectorXd rewards(H * N);
    Eigen::VectorXd values(H * N);
    Eigen::VectorXd dones(H * N); // 1 if episode ended at this step

    Rng noise_rng = rng_.derive(0x6e6f697365ULL + epoch_);

    double reward_sum = 0.0;
    double episode_metric_sum = 0.0;
    int episode_count = 0;

    const Vector6 sigma = log_std_.array().exp().matrix();
    Eigen::MatrixXd cur_obs(N, obs_dim);
    for (int e = 0; e < N; ++e) cur_obs.row(e) = obs_[e].to_vector().transpose();

    for (int t = 0; t < H; ++t) {
        const Eigen::MatrixXd mu = policy_.raw(cur_obs);
        const Eigen::MatrixXd val = value_.forward(cur_obs);
        for (int e = 0; e < N; ++e) {
            const int row = t * N + e;
            obs.row(row) = cur_obs.row(e);
            Vector6 a;
            double lp = 0.0;
            for (int k = 0; k < act_dim; ++k) {
                const double eps = noise_rng.normal();
                a[k] = mu(e, k) + sigma[k] * eps;
                lp += -0.5 * eps * eps - std::log(sigma[k]) - kLogSqrt2Pi;
            }
            actions.row(row) = a.transpose();
            logp[row] = lp;
            values[row] = val(e, 0);

            const Vector6 command = policy_.squash(a);
            const Environment::StepResult sr = envs_[e].step(command);
            rewards[row] = sr.reward.total;
            reward_sum += sr.reward.total;
            dones[row] = sr.done ? 1.0 : 0.0;
            if (sr.done) {
                episode_metric_sum += envs_[e].outcome().score(task_.miss_penalty_weight);
                ++episode_count;
                obs_[e] = envs_[e].reset(rng_.derive(0x1000 + episode_counter_++));
            } else {
                obs_[e] = sr.obs;
            }
            cur_obs.row(e) = obs_[e].to_vector().transpose();
        }
    }

    // Bootstrap values for the final observations.
    const Eigen::MatrixXd last_val = value_.forward(cur_obs);

    // GAE.
    Eigen::VectorXd advantages(H * N);
    Eigen::VectorXd returns(H * N);
    for (int e = 0; e < N; ++e) {
        double gae = 0.0;
        double next_value = last_val(e, 0);
        for (int t = H - 1; t >= 0; --t) {
            const int row = t * N + e;
            const double not_done = 1.0 - dones[row];
            const double delta =
                rewards[row] + cfg_.gamma * next_value * not_done - values[row];
            gae = delta + cfg_.gamma * cfg_.gae_lambda * not_done * gae;
            advantages[row] = gae;
            returns[row] = gae + values[row];
            next_value = values[row];
        }
    }
    const double adv_mean = advantages.mean();
    const double adv_std =
        std::sqrt((advantages.array() - adv_mean).square().sum() / advantages.size()) + 1e-8;
    advantages = ((advantages.array() - adv_mean) / adv_std).matrix();

    // Minibatch updates.
    const int total = H * N;
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = rng_.derive(0x73687566ULL + epoch_);
    const int mb_size = total / cfg_.minibatches;

    for (int ue = 0; ue < cfg_.update_epochs; ++ue) {
        for (int i = total - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.uniform_int(i + 1)]);
        for (int mb = 0; mb < cfg_.minibatches; ++mb) {
            const int begin = mb * mb_size;
            const int count = (mb == cfg_.minibatches - 1) ? total - begin : mb_size;
            Eigen::MatrixXd X(count, obs_dim), A(count, act_dim);
            Eigen::VectorXd adv(count), old_lp(count), ret(count);
            for (int r = 0; r < count; ++r) {
                const int src = order[begin + r];
                X.row(r) = obs.row(src);
                A.row(r) = actions.row(src);
                adv[r] = advantages[src];
                old_lp[r] = logp[src];
                ret[r] = returns[src];
            }

            // Policy update.
            Mlp::Tape tape;
            const Eigen::MatrixXd mu = policy_.network().forward(X, tape);
            const Vector6 sig = log_std_.array().exp().matrix();
            Eigen::VectorXd new_lp = Eigen::VectorXd::Zero(count);
            for (int r = 0; r < count; ++r)
                for (int k = 0; k < act_dim; ++k) {
                    const double z = (A(r, k) - mu(r, k)) / sig[k];
                    new_lp[r] += -0.5 * z * z - log_std_[k] - kLogSqrt2Pi;
                }

            Eigen::MatrixXd mu_grad = Eigen::MatrixXd::Zero(count, act_dim);
            Vector6 log_std_grad = Vector6::Zero();
            for (int r = 0; r < count; ++r) {
                const double ratio = std::exp(new_lp[r] - old_lp[r]);
                const bool active = (adv[r] >= 0.0 && ratio < 1.0 + cfg_.clip) ||
                                    (adv[r] < 0.0 && ratio > 1.0 - cfg_.clip);
                if (!active) continue;
                const double dl_dlogp = -adv[r] * ratio / count;
                for (int k = 0; k < act_dim; ++k) {
                    const double z = (A(r, k) - mu(r, k)) / sig[k];
                    mu_grad(r, k) = dl_dlogp * (z / sig[k]);
                    log_std_grad[k] += dl_dlogp * (z * z - 1.0);
                }
            }
            // Entropy bonus: d(-beta * H)/dlogstd = -beta.
            log_std_grad.array() -= cfg_.entropy_coef;

            Mlp::Gradients pg = policy_.network().zero_gradients();
            policy_.network().backward(tape, mu_grad, pg);
            Eigen::VectorXd flat = Mlp::flatten_gradients(pg);
            const double gn = flat.norm();
            if (gn > cfg_.max_grad_norm) flat *= cfg_.max_grad_norm / gn;
            if (!flat.allFinite()) throw std::runtime_error("ppo: non-finite policy gradient");
            Eigen::VectorXd theta = policy_.network().flatten();
            theta += policy_opt_.update(flat);
            policy_.network().unflatten(theta);

            const Eigen::VectorXd ls_step = log_std_opt_.update(Eigen::VectorXd(log_std_grad));
            log_std_ += Eigen::Map<const Vector6>(ls_step.data());
            log_std_ = log_std_.cwiseMax(-4.0).cwiseMin(1.0);

            // Value update (MSE).
            Mlp::Tape vtape;
            const Eigen::MatrixXd v = value_.forward(X, vtape);
            Eigen::MatrixXd v_grad = 2.0 * (v.col(0) - ret) / count;
            Mlp::Gradients vg = value_.zero_gradients();
            value_.backward(vtape, v_grad, vg);
            Eigen::VectorXd vflat = Mlp::flatten_gradients(vg);
            const double vn = vflat.norm();
            if (vn > cfg_.max_grad_norm) vflat *= cfg_.max_grad_norm / vn;
            if (!vflat.allFinite()) throw std::runtime_error("ppo: non-finite value gradient");
            Eigen::VectorXd vtheta = value_.flatten();
            vtheta += value_opt_.update(vflat);
            value_.unflatten(vtheta);
        }
    }

    TrainingCurvePoint pt;
    pt.epoch = epoch_;
    pt.mean_reward = reward_sum / total;
    pt.mean_task_metric = episode_count > 0 ? episode_metric_sum / episode_count : 0.0;
    curve_.push_back(pt);
    ++epoch_;
}

Controller PpoTrainer::make_controller(const Policy& policy) {
    return [policy](const RigidBodyState& state, const Gate& gate) -> Vector6 {
        return policy.act(observe(state, gate).to_vector());
    };
}

TaskScore PpoTrainer::evaluate(int episodes, std::uint64_t eval_seed) const {
    EpisodeConfig ep;
    ep.control_dt = cfg_.control_dt;
    return task_performance(model_, make_controller(policy_), task_, episodes, eval_seed, ep);
}

TrainResult train(const VehicleModel& model, const TaskSpec& task, const PpoConfig& cfg,
                  std::uint64_t seed) {
    PpoTrainer trainer(model, task, cfg, seed);
    trainer.train_epochs(cfg.epochs);
    return {trainer.policy(), trainer.curve()};
}

} // namespace aforge
