#include "aforge/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <stdexcept>

namespace aforge {

PrescreenResult prescreen(const DesignVector& xi, const CampaignConfig& cfg) {
    PrescreenResult out;
    MotorLayout layout;
    try {
        layout = decode(xi, cfg.bounds, cfg.geometry.propeller_radius);
    } catch (const std::exception& e) {
        out.reason = std::string("decode failed: ") + e.what();
        return out;
    }

    const RepairResult rep = repair(layout, cfg.geometry, cfg.repair);
    if (!rep.converged) {
        out.reason = "repair did not converge";
        return out;
    }

    MassProperties mp;
    try {
        mp = mass_inertia(rep.repaired_layout, cfg.geometry);
    } catch (const std::exception& e) {
        out.reason = std::string("mass properties: ") + e.what();
        return out;
    }

    const WrenchMap map = wrench_map(rep.repaired_layout, mp, cfg.rotor);
    const HoverResult hover = hover_feasible(map, mp.mass, cfg.rotor);
    if (!hover.feasible) {
        out.reason = "hover infeasible";
        return out;
    }

    out.pass = true;
    out.repaired = rep.repaired_layout;
    out.mass_props = mp;
    return out;
}

double proxy_envelope_score(const MotorLayout& layout, const MassProperties& mass_props,
                            const RotorModel& rotor) {
    const WrenchMap map = wrench_map(layout, mass_props, rotor);
    std::vector<Eigen::Vector3d> dirs;
    for (int x = -1; x <= 1; ++x)
        for (int y = -1; y <= 1; ++y)
            for (int z = -1; z <= 1; ++z) {
                if (x == 0 && y == 0 && z == 0) continue;
                dirs.push_back(Eigen::Vector3d(x, y, z).normalized());
            }
    EnvelopeOptions opts;
    opts.include_gravity = true;
    const std::vector<double> accel = accel_envelope(map, mass_props, rotor, dirs, opts);
    double worst = std::numeric_limits<double>::infinity();
    for (double a : accel) worst = std::min(worst, a);
    return std::isfinite(worst) ? worst : 0.0;
}

DesignScorer make_proxy_scorer(const RotorModel& rotor) {
    return [rotor](const MotorLayout& layout, const MassProperties& mp,
                   std::uint64_t) -> ObjectiveValue {
        return {proxy_envelope_score(layout, mp, rotor), 0.0};
    };
}

nlohmann::ordered_json CampaignRecord::to_json() const {
    nlohmann::ordered_json j;
    j["design_id"] = design_id;
    j["phase"] = phase;
    j["xi"] = std::vector<double>(xi.data(), xi.data() + xi.size());
    j["prescreen"] = {{"pass", prescreen_pass}, {"reason", prescreen_reason}};
    if (repaired_layout) j["layout"] = *repaired_layout;
    j["score"] = score;
    j["stderr"] = stderr_;
    j["seed"] = eval_seed;
    if (!error.empty()) j["error"] = error;
    return j;
}

CampaignRecord CampaignRecord::from_json(const nlohmann::json& j) {
    CampaignRecord rec;
    rec.design_id = j.at("design_id").get<int>();
    rec.phase = j.at("phase").get<std::string>();
    const auto xs = j.at("xi").get<std::vector<double>>();
    if (xs.size() != DesignVector::kDim)
        throw std::invalid_argument("campaign record: bad xi length");
    for (int i = 0; i < DesignVector::kDim; ++i) rec.xi[i] = xs[i];
    rec.prescreen_pass = j.at("prescreen").at("pass").get<bool>();
    rec.prescreen_reason = j.at("prescreen").at("reason").get<std::string>();
    if (j.contains("layout")) rec.repaired_layout = j.at("layout");
    rec.score = j.at("score").get<double>();
    rec.stderr_ = j.at("stderr").get<double>();
    rec.eval_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("error")) rec.error = j.at("error").get<std::string>();
    return rec;
}

namespace {

std::vector<CampaignRecord> read_record_log(const std::string& path) {
    std::vector<CampaignRecord> records;
    std::ifstream in(path);
    if (!in) return records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(CampaignRecord::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("record log line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
    }
    return records;
}

} // namespace

CampaignResult run_campaign(const CampaignConfig& cfg, const DesignScorer& scorer) {
    CampaignResult result;

    std::vector<CampaignRecord> replay;
    if (!cfg.record_log.empty()) replay = read_record_log(cfg.record_log);

    std::ofstream log;
    if (!cfg.record_log.empty()) {
        log.open(cfg.record_log, std::ios::app);
        if (!log) throw std::runtime_error("cannot open record log: " + cfg.record_log);
    }

    const Rng seed_root(cfg.seed);
    int next_id = 0;
    std::string forced_phase; // set to "cmaes" once the BO phase is done
    const int init_count = std::min(cfg.bo.init_points, cfg.budget.bo_max);

    auto objective = [&](const Eigen::VectorXd& x) -> ObjectiveValue {
        const int id = next_id++;
        if (id < static_cast<int>(replay.size())) {
            const CampaignRecord& rec = replay[id];
            // The campaign is deterministic given its seed, so a divergence
            // here means the log belongs to a different configuration.
            if ((rec.xi - x).cwiseAbs().maxCoeff() > 1e-9)
                throw std::runtime_error(
                    "record log does not match this campaign configuration");
            result.records.push_back(rec);
            ++result.replayed;
            return {rec.score, rec.stderr_};
        }

        CampaignRecord rec;
        rec.design_id = id;
        rec.phase = !forced_phase.empty() ? forced_phase
                    : (id < init_count ? "sobol-init" : "bo");
        rec.xi = x;
        rec.eval_seed = Rng(seed_root).derive(0xe7a1 + id).at(0);

        const DesignVector xi(rec.xi);
        const PrescreenResult pre = prescreen(xi, cfg);
        rec.prescreen_pass = pre.pass;
        rec.prescreen_reason = pre.reason;
        if (pre.pass) {
            rec.repaired_layout = layout_to_json(*pre.repaired);
            try {
                const ObjectiveValue val = scorer(*pre.repaired, *pre.mass_props,
                                                  rec.eval_seed);
                rec.score = val.score;
                rec.stderr_ = val.stderr_;
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.score = 0.0;
                rec.stderr_ = 0.0;
            }
        }

        if (log.is_open()) {
            log << rec.to_json().dump() << '\n';
            log.flush();
        }
        result.records.push_back(rec);
        return {rec.score, rec.stderr_};
    };

    BoOptions bo_opts = cfg.bo;
    bo_opts.patience = cfg.budget.patience;
    const BoResult bo = bo_phase(objective, DesignVector::kDim, cfg.budget.bo_max,
                                 Rng(seed_root).derive(1), bo_opts);
    result.bo_evaluations = static_cast<int>(bo.history.size());

    Eigen::VectorXd start = Eigen::VectorXd::Constant(DesignVector::kDim, 0.5);
    if (bo.best_xi) start = *bo.best_xi;

    forced_phase = "cmaes";
    CmaEsOptions cma_opts = cfg.cmaes;
    cma_opts.patience = cfg.budget.patience;
    const CmaEsResult cma = cmaes_phase(objective, start, cfg.budget.cmaes_max,
                                        Rng(seed_root).derive(2), cma_opts);
    result.cmaes_evaluations = static_cast<int>(cma.history.size());

    for (const CampaignRecord& rec : result.records) {
        if (!result.best_xi || rec.score > result.best_score) {
            result.best_score = rec.score;
            result.best_xi = DesignVector(rec.xi);
        }
    }

    if (!cfg.convergence_csv.empty())
        write_convergence_csv(result.records, cfg.convergence_csv);
    return result;
}

void write_convergence_csv(const std::vector<CampaignRecord>& records,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open convergence csv: " + path);
    out << "eval_index,phase,score,best_so_far\n";
    double best = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < records.size(); ++i) {
        best = std::max(best, records[i].score);
        out << i << ',' << records[i].phase << ',' << records[i].score << ','
            << best << '\n';
    }
}

} // namespace aforge
