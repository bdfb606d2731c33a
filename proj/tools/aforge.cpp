// aforge: command-line front end for the airframe design pipeline.
//
// Exit codes: 0 success, 2 configuration error, 3 evaluation error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aforge/campaign.hpp"
#include "aforge/environment.hpp"
#include "aforge/halving.hpp"
#include "aforge/ppo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitEval = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw EvalError("cannot write " + path.string());
    out << text;
}

struct Common {
    std::string output = ".";
    std::string config_path;
    std::optional<std::uint64_t> seed_flag;
    bool dry_run = false;
    int jobs = 1;
    json config = json::object();

    void add_options(CLI::App* app) {
        app->add_option("-o,--output", output, "Output directory");
        app->add_option("--config", config_path, "JSON config file");
        app->add_option("--seed", seed_flag, "Seed (overrides config and AFORGE_SEED)");
        app->add_flag("--dry-run", dry_run, "Validate config, write manifest, exit");
        app->add_option("--jobs", jobs, "Worker pool size for optimize/train");
    }

    // Layering: config file < AFORGE_SEED < --seed.
    std::uint64_t resolve_seed(std::uint64_t fallback = 0) const {
        std::uint64_t seed = fallback;
        if (config.contains("seed")) seed = config["seed"].get<std::uint64_t>();
        if (const char* env = std::getenv("AFORGE_SEED")) seed = std::strtoull(env, nullptr, 10);
        if (seed_flag) seed = *seed_flag;
        return seed;
    }

    void load() {
        if (!config_path.empty()) config = load_json_file(config_path);
    }

    fs::path prepare_output() const {
        fs::path dir(output);
        fs::create_directories(dir);
        return dir;
    }

    void write_manifest(const fs::path& dir, const std::string& subcommand,
                        std::uint64_t seed) const {
        ordered_json m;
        m["subcommand"] = subcommand;
        m["config_hash"] = fnv1a(config.dump());
        m["seed"] = seed;
        m["version"] = kVersion;
        m["jobs"] = jobs;
        write_text(dir / (subcommand + ".manifest.json"), m.dump(2) + "\n");
    }
};

aforge::BoundTable bounds_from_config(const json& config) {
    if (config.contains("bounds")) return aforge::BoundTable::from_json(config["bounds"]);
    return aforge::BoundTable::defaults();
}

aforge::RotorModel rotor_from_config(const json& config) {
    aforge::RotorModel rotor;
    if (!config.contains("rotor")) return rotor;
    const json& r = config["rotor"];
    if (r.contains("thrust_coeff")) rotor.thrust_coeff = r["thrust_coeff"];
    if (r.contains("torque_coeff")) rotor.torque_coeff = r["torque_coeff"];
    if (r.contains("time_constant")) rotor.time_constant = r["time_constant"];
    if (r.contains("rps_min")) rotor.rps_min = r["rps_min"];
    if (r.contains("rps_max")) rotor.rps_max = r["rps_max"];
    rotor.validate();
    return rotor;
}

aforge::PpoConfig ppo_from_config(const json& config) {
    aforge::PpoConfig cfg;
    if (!config.contains("ppo")) return cfg;
    const json& p = config["ppo"];
    if (p.contains("epochs")) cfg.epochs = p["epochs"];
    if (p.contains("num_envs")) cfg.num_envs = p["num_envs"];
    if (p.contains("horizon")) cfg.horizon = p["horizon"];
    if (p.contains("minibatches")) cfg.minibatches = p["minibatches"];
    if (p.contains("update_epochs")) cfg.update_epochs = p["update_epochs"];
    if (p.contains("learning_rate")) cfg.learning_rate = p["learning_rate"];
    if (p.contains("smoothing_weight")) cfg.smoothing_weight = p["smoothing_weight"];
    if (p.contains("curriculum_fraction")) cfg.curriculum_fraction = p["curriculum_fraction"];
    return cfg;
}

aforge::DesignVector parse_xi(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    if (vals.size() != aforge::DesignVector::kDim)
        throw ConfigError("--xi needs exactly 15 comma-separated values");
    Eigen::Matrix<double, aforge::DesignVector::kDim, 1> v;
    for (int i = 0; i < aforge::DesignVector::kDim; ++i) v[i] = vals[i];
    return aforge::DesignVector(v);
}

aforge::MotorLayout load_layout(const std::string& path) {
    try {
        return aforge::layout_from_json(load_json_file(path));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string render_csv(const aforge::MotorLayout& layout) {
    char buf[512];
    std::string csv = "motor,x,y,z,axis_x,axis_y,axis_z,spin\n";
    for (int i = 0; i < 6; ++i) {
        const auto& m = layout.motors[i];
        const Eigen::Vector3d a = m.thrust_axis();
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", i,
                      m.position.x(), m.position.y(), m.position.z(), a.x(), a.y(), a.z(),
                      m.spin == aforge::Spin::CCW ? "ccw" : "cw");
        csv += buf;
    }
    return csv;
}

ordered_json task_to_json(const aforge::TaskSpec& t) {
    ordered_json j;
    j["kind"] = t.kind == aforge::TaskSpec::Kind::A   ? "A"
                : t.kind == aforge::TaskSpec::Kind::B ? "B"
                                                      : "custom";
    j["step_forward"] = t.step_forward;
    j["dy_lo"] = t.dy_lo;
    j["dy_hi"] = t.dy_hi;
    j["turn_probability"] = t.turn_probability;
    j["yjump_lo"] = t.yjump_lo;
    j["yjump_hi"] = t.yjump_hi;
    j["zjump_lo"] = t.zjump_lo;
    j["zjump_hi"] = t.zjump_hi;
    j["gate_half_width"] = t.gate_half_width;
    j["episode_duration"] = t.episode_duration;
    j["miss_penalty_weight"] = t.miss_penalty_weight;
    return j;
}

// ---------------------------------------------------------------- decode

int cmd_decode(Common& com, const std::string& xi_text, const std::string& baseline,
               double arm, const std::string& prefix) {
    com.load();
    const fs::path dir = com.prepare_output();
    const std::uint64_t seed = com.resolve_seed();
    com.write_manifest(dir, "decode", seed);
    if (com.dry_run) return 0;

    aforge::MotorLayout layout;
    if (!baseline.empty()) {
        layout = aforge::baseline_layout(baseline, arm);
    } else if (!xi_text.empty()) {
        layout = aforge::decode(parse_xi(xi_text), bounds_from_config(com.config));
    } else {
        throw ConfigError("decode needs --xi or --baseline");
    }

    write_text(dir / (prefix + ".json"), aforge::layout_to_json(layout).dump(2) + "\n");
    write_text(dir / (prefix + "_render.csv"), render_csv(layout));
    std::cout << dir / (prefix + ".json") << "\n";
    return 0;
}

// ---------------------------------------------------------------- repair

int cmd_repair(Common& com, const std::string& layout_path, const std::string& prefix) {
    com.load();
    const fs::path dir = com.prepare_output();
    const std::uint64_t seed = com.resolve_seed();
    com.write_manifest(dir, "repair", seed);
    if (com.dry_run) return 0;

    const aforge::MotorLayout layout = load_layout(layout_path);
    aforge::RepairConfig cfg;
    cfg.seed = seed;
    const aforge::RepairResult res = aforge::repair(layout, aforge::BodyGeometry{}, cfg);

    write_text(dir / (prefix + ".json"),
               aforge::layout_to_json(res.repaired_layout).dump(2) + "\n");
    ordered_json summary;
    summary["converged"] = res.converged;
    summary["total_cost"] = res.total_cost;
    summary["iterations"] = res.iterations;
    summary["max_penetration"] = res.max_penetration;
    for (const auto& t : res.translations)
        summary["translations"].push_back({t.x(), t.y(), t.z()});
    write_text(dir / (prefix + "_summary.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    if (!res.converged) throw EvalError("repair did not converge");
    return 0;
}

// ---------------------------------------------------------------- check-hover

int cmd_check_hover(Common& com, const std::string& layout_path) {
    com.load();
    const fs::path dir = com.prepare_output();
    com.write_manifest(dir, "check-hover", com.resolve_seed());
    if (com.dry_run) return 0;

    const aforge::MotorLayout layout = load_layout(layout_path);
    const aforge::RotorModel rotor = rotor_from_config(com.config);
    const aforge::MassProperties mp = aforge::mass_inertia(layout, aforge::BodyGeometry{});
    const aforge::WrenchMap map = aforge::wrench_map(layout, mp, rotor);
    const aforge::HoverResult hover = aforge::hover_feasible(map, mp.mass, rotor);

    ordered_json out;
    out["feasible"] = hover.feasible;
    if (hover.hover_speeds) {
        for (int i = 0; i < 6; ++i) out["hover_rps"].push_back((*hover.hover_speeds)[i]);
    }
    out["mass"] = mp.mass;
    write_text(dir / "hover.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- envelope

int cmd_envelope(Common& com, const std::string& layout_path, int resolution,
                 bool gravity) {
    com.load();
    const fs::path dir = com.prepare_output();
    com.write_manifest(dir, "envelope", com.resolve_seed());
    if (com.dry_run) return 0;

    const aforge::MotorLayout layout = load_layout(layout_path);
    const aforge::RotorModel rotor = rotor_from_config(com.config);
    const aforge::MassProperties mp = aforge::mass_inertia(layout, aforge::BodyGeometry{});
    const aforge::WrenchMap map = aforge::wrench_map(layout, mp, rotor);

    std::string csv = "plane,angle_deg,dir_x,dir_y,dir_z,accel\n";
    const aforge::HoverResult hover = aforge::hover_feasible(map, mp.mass, rotor);
    if (!hover.feasible) {
        csv += "warning,layout cannot hover; envelope not evaluated,,,,\n";
        std::cerr << "warning: layout cannot hover\n";
        write_text(dir / "envelope.csv", csv);
        return 0;
    }

    struct Plane {
        const char* name;
        Eigen::Vector3d u, v;
    };
    const Plane planes[] = {
        {"xy", Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY()},
        {"xz", Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ()},
        {"yz", Eigen::Vector3d::UnitY(), Eigen::Vector3d::UnitZ()},
    };
    aforge::EnvelopeOptions opts;
    opts.include_gravity = gravity;
    char buf[256];
    for (const Plane& pl : planes) {
        std::vector<Eigen::Vector3d> dirs;
        for (int k = 0; k < resolution; ++k) {
            const double ang = 2.0 * M_PI * k / resolution;
            dirs.push_back((std::cos(ang) * pl.u + std::sin(ang) * pl.v).normalized());
        }
        const std::vector<double> accel =
            aforge::accel_envelope(map, mp, rotor, dirs, opts);
        for (int k = 0; k < resolution; ++k) {
            std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", pl.name,
                          360.0 * k / resolution, dirs[k].x(), dirs[k].y(), dirs[k].z(),
                          accel[k]);
            csv += buf;
        }
    }
    write_text(dir / "envelope.csv", csv);
    std::cout << dir / "envelope.csv" << "\n";
    return 0;
}

// ---------------------------------------------------------------- perturb-task

int cmd_perturb_task(Common& com, const std::string& task_name, double pr_scale,
                     double dy_scale, double dz_scale) {
    com.load();
    const fs::path dir = com.prepare_output();
    com.write_manifest(dir, "perturb-task", com.resolve_seed());
    if (com.dry_run) return 0;

    const aforge::TaskSpec base = aforge::TaskSpec::by_name(task_name);
    const aforge::TaskSpec out = aforge::perturb_task(base, pr_scale, dy_scale, dz_scale);
    const ordered_json j = task_to_json(out);
    write_text(dir / "task.json", j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- train

int cmd_train(Common& com, const std::string& design_path, const std::string& task_name,
              const std::string& halving_text, int eval_episodes) {
    com.load();
    const fs::path dir = com.prepare_output();
    const std::uint64_t seed = com.resolve_seed(1);
    com.write_manifest(dir, "train", seed);
    const aforge::HalvingSchedule schedule = aforge::HalvingSchedule::parse(halving_text);
    if (com.dry_run) return 0;

    const aforge::MotorLayout layout = load_layout(design_path);
    const aforge::RotorModel rotor = rotor_from_config(com.config);
    const aforge::VehicleModel model =
        aforge::make_vehicle_model(layout, aforge::BodyGeometry{}, rotor);
    const aforge::TaskSpec task = aforge::TaskSpec::by_name(task_name);

    aforge::PpoConfig ppo = ppo_from_config(com.config);
    ppo.epochs = schedule.total_epochs() / schedule.stages.front().survivors;

    aforge::PpoHalvingBackend backend(model, task, ppo, eval_episodes, seed ^ 0x5eedULL);
    const aforge::HalvingResult res = aforge::sequential_halving(backend, schedule, seed);

    std::string audit = "arm,seed,stage,epochs_this_stage,total_epochs,score,survived\n";
    char buf[256];
    for (const auto& e : res.audit) {
        std::snprintf(buf, sizeof(buf), "%d,%llu,%d,%d,%d,%.17g,%d\n", e.arm,
                      static_cast<unsigned long long>(e.seed), e.stage,
                      e.epochs_this_stage, e.total_epochs, e.score, e.survived ? 1 : 0);
        audit += buf;
    }
    write_text(dir / "halving_audit.csv", audit);

    auto& run = static_cast<aforge::PpoHalvingBackend::PpoRun&>(*res.best_run);
    run.trainer.policy().save((dir / "policy.json").string());

    std::string curve = "epoch,mean_reward,mean_task_metric\n";
    for (const auto& pt : run.trainer.curve()) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", pt.epoch, pt.mean_reward,
                      pt.mean_task_metric);
        curve += buf;
    }
    write_text(dir / "training_curve.csv", curve);

    ordered_json summary;
    summary["best_arm"] = res.best_arm;
    summary["best_score"] = res.best_score;
    summary["total_epochs"] = res.total_epochs_consumed;
    write_text(dir / "train_summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- eval

int cmd_eval(Common& com, const std::string& policy_path, const std::string& design_path,
             const std::string& task_name, int episodes) {
    com.load();
    const fs::path dir = com.prepare_output();
    const std::uint64_t seed = com.resolve_seed(1);
    com.write_manifest(dir, "eval", seed);
    if (com.dry_run) return 0;

    const aforge::Policy policy = aforge::Policy::load(policy_path);
    const aforge::MotorLayout layout = load_layout(design_path);
    const aforge::RotorModel rotor = rotor_from_config(com.config);
    const aforge::VehicleModel model =
        aforge::make_vehicle_model(layout, aforge::BodyGeometry{}, rotor);
    const aforge::TaskSpec task = aforge::TaskSpec::by_name(task_name);

    const aforge::TaskScore score = aforge::task_performance(
        model, aforge::PpoTrainer::make_controller(policy), task, episodes, seed);

    ordered_json out;
    out["mean"] = score.mean;
    out["stderr"] = score.stderr_;
    out["crossed_rate"] = score.crossed_rate;
    out["missed_rate"] = score.missed_rate;
    out["episodes"] = score.episodes;
    write_text(dir / "eval.json", out.dump(2) + "\n");
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------- optimize / resume

int cmd_optimize(Common& com, const std::string& objective, int bo_budget,
                 int cmaes_budget, bool resume) {
    com.load();
    const fs::path dir = com.prepare_output();
    const std::uint64_t seed = com.resolve_seed();
    com.write_manifest(dir, resume ? "resume" : "optimize", seed);

    aforge::CampaignConfig cfg;
    cfg.bounds = bounds_from_config(com.config);
    cfg.rotor = rotor_from_config(com.config);
    cfg.seed = seed;
    cfg.repair.seed = seed ^ 0x7e9a17ULL;
    if (com.config.contains("budget")) {
        const json& b = com.config["budget"];
        if (b.contains("bo_max")) cfg.budget.bo_max = b["bo_max"];
        if (b.contains("cmaes_max")) cfg.budget.cmaes_max = b["cmaes_max"];
        if (b.contains("patience")) cfg.budget.patience = b["patience"];
    }
    if (bo_budget >= 0) cfg.budget.bo_max = bo_budget;
    if (cmaes_budget >= 0) cfg.budget.cmaes_max = cmaes_budget;
    cfg.record_log = (dir / "records.ndjson").string();
    cfg.convergence_csv = (dir / "convergence.csv").string();

    if (resume && !fs::exists(cfg.record_log))
        throw ConfigError("resume: no record log at " + cfg.record_log);
    if (com.dry_run) return 0;

    aforge::DesignScorer scorer;
    if (objective == "proxy-envelope") {
        scorer = aforge::make_proxy_scorer(cfg.rotor);
    } else if (objective == "train") {
        const aforge::TaskSpec task = aforge::TaskSpec::by_name(
            com.config.value("task", std::string("A")));
        const aforge::HalvingSchedule schedule = aforge::HalvingSchedule::parse(
            com.config.value("halving", std::string("8x800,6x800,4x3200")));
        aforge::PpoConfig ppo = ppo_from_config(com.config);
        ppo.epochs = schedule.total_epochs() / schedule.stages.front().survivors;
        const int eval_episodes = com.config.value("eval_episodes", 64);
        scorer = [=](const aforge::MotorLayout& layout, const aforge::MassProperties&,
                     std::uint64_t design_seed) -> aforge::ObjectiveValue {
            const aforge::VehicleModel model =
                aforge::make_vehicle_model(layout, aforge::BodyGeometry{}, cfg.rotor);
            aforge::PpoHalvingBackend backend(model, task, ppo, eval_episodes,
                                              design_seed ^ 0x5eedULL);
            aforge::HalvingResult res =
                aforge::sequential_halving(backend, schedule, design_seed);
            auto& run = static_cast<aforge::PpoHalvingBackend::PpoRun&>(*res.best_run);
            const aforge::TaskScore score =
                run.trainer.evaluate(eval_episodes, design_seed ^ 0xf1a1ULL);
            return {score.mean, score.stderr_};
        };
    } else {
        throw ConfigError("unknown objective: " + objective);
    }

    const aforge::CampaignResult result = aforge::run_campaign(cfg, scorer);

    ordered_json summary;
    summary["evaluations"] = result.records.size();
    summary["replayed"] = result.replayed;
    summary["bo_evaluations"] = result.bo_evaluations;
    summary["cmaes_evaluations"] = result.cmaes_evaluations;
    summary["best_score"] = result.best_score;
    if (result.best_xi) {
        for (int i = 0; i < aforge::DesignVector::kDim; ++i)
            summary["best_xi"].push_back((*result.best_xi)[i]);
        const aforge::PrescreenResult pre = aforge::prescreen(*result.best_xi, cfg);
        if (pre.pass)
            write_text(dir / "best_design.json",
                       aforge::layout_to_json(*pre.repaired).dump(2) + "\n");
    }
    write_text(dir / "optimize_summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Airframe design, repair, simulation and optimization toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common com;

    auto* decode = app.add_subcommand("decode", "Decode a design vector into a layout");
    std::string xi_text, baseline_name, prefix = "design";
    double arm = 0.17;
    decode->add_option("--xi", xi_text, "15 comma-separated values in [0,1]");
    decode->add_option("--baseline", baseline_name, "planar, franchi, shen or rajappa");
    decode->add_option("--arm", arm, "Baseline arm length, meters");
    decode->add_option("--prefix", prefix, "Output file prefix");
    com.add_options(decode);

    auto* repair = app.add_subcommand("repair", "Minimal-translation collision repair");
    std::string layout_path;
    std::string repair_prefix = "repaired";
    repair->add_option("--layout", layout_path, "Layout JSON")->required();
    repair->add_option("--prefix", repair_prefix, "Output file prefix");
    com.add_options(repair);

    auto* hover = app.add_subcommand("check-hover", "Hover feasibility of a layout");
    std::string hover_layout;
    hover->add_option("--layout", hover_layout, "Layout JSON")->required();
    com.add_options(hover);

    auto* envelope = app.add_subcommand("envelope", "Acceleration envelope CSV");
    std::string env_layout;
    int resolution = 64;
    bool gravity = false;
    envelope->add_option("--layout", env_layout, "Layout JSON")->required();
    envelope->add_option("--resolution", resolution, "Directions per plane fan");
    envelope->add_flag("--gravity", gravity, "Subtract gravity from the envelope");
    com.add_options(envelope);

    auto* baseline = app.add_subcommand("baseline", "Emit a named baseline layout");
    std::string base_name = "planar";
    double base_arm = 0.17;
    std::string base_prefix = "baseline";
    baseline->add_option("--name", base_name, "planar, franchi, shen or rajappa");
    baseline->add_option("--arm", base_arm, "Arm length, meters");
    baseline->add_option("--prefix", base_prefix, "Output file prefix");
    com.add_options(baseline);

    auto* perturb = app.add_subcommand("perturb-task", "Scale task distribution parameters");
    std::string task_name = "A";
    double pr_scale = 1.0, dy_scale = 1.0, dz_scale = 1.0;
    perturb->add_option("--task", task_name, "A or B");
    perturb->add_option("--pr-scale", pr_scale, "Turn probability scale");
    perturb->add_option("--dy-scale", dy_scale, "Lateral increment scale");
    perturb->add_option("--dz-scale", dz_scale, "Vertical increment scale");
    com.add_options(perturb);

    auto* train = app.add_subcommand("train", "Sequential-halving policy training");
    std::string design_path, train_task = "A", halving_text = "8x800,6x800,4x3200";
    int eval_episodes = 64;
    train->add_option("--design", design_path, "Layout JSON")->required();
    train->add_option("--task", train_task, "A or B");
    train->add_option("--halving", halving_text, "Schedule, e.g. 8x800,6x800,4x3200");
    train->add_option("--eval-episodes", eval_episodes, "Episodes per interim score");
    com.add_options(train);

    auto* eval = app.add_subcommand("eval", "Task performance of a saved policy");
    std::string policy_path, eval_design, eval_task = "A";
    int episodes = 256;
    eval->add_option("--policy", policy_path, "Policy JSON")->required();
    eval->add_option("--design", eval_design, "Layout JSON")->required();
    eval->add_option("--task", eval_task, "A or B");
    eval->add_option("--episodes", episodes, "Evaluation episodes");
    com.add_options(eval);

    auto* optimize = app.add_subcommand("optimize", "Design-space search campaign");
    std::string objective = "proxy-envelope";
    int bo_budget = -1, cmaes_budget = -1;
    optimize->add_option("--objective", objective, "proxy-envelope or train");
    optimize->add_option("--budget", bo_budget, "Global-phase evaluation budget");
    optimize->add_option("--cmaes-budget", cmaes_budget, "Refinement-phase budget");
    com.add_options(optimize);

    auto* resume = app.add_subcommand("resume", "Resume a campaign from its record log");
    std::string r_objective = "proxy-envelope";
    int r_bo_budget = -1, r_cmaes_budget = -1;
    resume->add_option("--objective", r_objective, "proxy-envelope or train");
    resume->add_option("--budget", r_bo_budget, "Global-phase evaluation budget");
    resume->add_option("--cmaes-budget", r_cmaes_budget, "Refinement-phase budget");
    com.add_options(resume);

    CLI11_PARSE(app, argc, argv);

    try {
        if (decode->parsed()) return cmd_decode(com, xi_text, baseline_name, arm, prefix);
        if (repair->parsed()) return cmd_repair(com, layout_path, repair_prefix);
        if (hover->parsed()) return cmd_check_hover(com, hover_layout);
        if (envelope->parsed()) return cmd_envelope(com, env_layout, resolution, gravity);
        if (baseline->parsed()) {
            return cmd_decode(com, "", base_name, base_arm, base_prefix);
        }
        if (perturb->parsed())
            return cmd_perturb_task(com, task_name, pr_scale, dy_scale, dz_scale);
        if (train->parsed())
            return cmd_train(com, design_path, train_task, halving_text, eval_episodes);
        if (eval->parsed())
            return cmd_eval(com, policy_path, eval_design, eval_task, episodes);
        if (optimize->parsed())
            return cmd_optimize(com, objective, bo_budget, cmaes_budget, false);
        if (resume->parsed())
            return cmd_optimize(com, r_objective, r_bo_budget, r_cmaes_budget, true);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEval;
    }
    return 0;
}
