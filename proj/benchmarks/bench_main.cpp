#include <benchmark/benchmark.h>

#include "aforge/collision.hpp"
#include "aforge/environment.hpp"
#include "aforge/policy.hpp"
#include "aforge/repair.hpp"

using namespace aforge;

namespace {

void bm_penetration_depth(benchmark::State& state) {
    const CollisionBody a =
        CollisionBody::cylinder({0, 0, 0}, Eigen::Vector3d::UnitZ(), 0.04, 0.15);
    const CollisionBody b = CollisionBody::cylinder(
        {0.05, 0.01, 0.02}, Eigen::Vector3d(0.2, 0.1, 1.0).normalized(), 0.04, 0.15);
    for (auto _ : state) benchmark::DoNotOptimize(penetration_depth(a, b));
}
BENCHMARK(bm_penetration_depth);

void bm_layout_max_penetration(benchmark::State& state) {
    const MotorLayout L = baseline_layout("planar", 0.12);
    const auto bodies = build_collision_set(L, BodyGeometry{});
    for (auto _ : state) benchmark::DoNotOptimize(max_penetration(bodies));
}
BENCHMARK(bm_layout_max_penetration);

void bm_dynamics_step(benchmark::State& state) {
    const VehicleModel model =
        make_vehicle_model(baseline_layout("planar", 0.17), BodyGeometry{}, RotorModel{});
    RigidBodyState s;
    s.rotor_speeds = Vector6::Constant(200.0);
    const Vector6 cmd = Vector6::Constant(210.0);
    for (auto _ : state) {
        s = step(s, cmd, 0.01, model);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_dynamics_step);

void bm_policy_forward(benchmark::State& state) {
    Rng rng(1);
    const Policy policy(83.0, 400.0, rng);
    Eigen::Matrix<double, 15, 1> obs;
    for (int i = 0; i < 15; ++i) obs[i] = 0.1 * i;
    for (auto _ : state) benchmark::DoNotOptimize(policy.act(obs));
}
BENCHMARK(bm_policy_forward);

void bm_env_episode(benchmark::State& state) {
    const VehicleModel model =
        make_vehicle_model(baseline_layout("planar", 0.17), BodyGeometry{}, RotorModel{});
    const HoverResult hover = hover_feasible(model.map, model.mass_props.mass, model.rotor);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Environment env(model, TaskSpec::task_a(), EpisodeConfig{}, RewardWeights{});
        env.reset(Rng(seed++));
        for (int k = 0; k < 500; ++k)
            if (env.step(*hover.hover_speeds).done) break;
        benchmark::DoNotOptimize(env.outcome());
    }
}
BENCHMARK(bm_env_episode);

} // namespace

BENCHMARK_MAIN();
