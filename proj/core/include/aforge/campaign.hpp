#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aforge/bo.hpp"
#include "aforge/cmaes.hpp"
#include "aforge/dynamics.hpp"
#include "aforge/repair.hpp"
#include "aforge/tasks.hpp"

namespace aforge {

struct EvaluationBudget {
    int bo_max = 750;
    int cmaes_max = 250;
    int patience = 100; // non-improving evaluations before early stop
};

struct PrescreenResult {
    bool pass = false;
    std::string reason; // empty on pass
    std::optional<MotorLayout> repaired;
    std::optional<MassProperties> mass_props;
};

struct CampaignConfig {
    BoundTable bounds = BoundTable::defaults();
    BodyGeometry geometry{};
    RotorModel rotor{};
    RepairConfig repair{};
    EvaluationBudget budget{};
    std::uint64_t seed = 0;
    std::string record_log;       // NDJSON path; empty disables persistence
    std::string convergence_csv;  // optional eval_index,phase,score,best_so_far
    BoOptions bo{};
    CmaEsOptions cmaes{};
};

/// Decode, repair, and hover-check a candidate. A failed prescreen costs no
/// training budget; the design scores exactly 0.
PrescreenResult prescreen(const DesignVector& xi, const CampaignConfig& cfg);

/// Scores a design that passed prescreen. Injected so campaigns can run the
/// full training pipeline or a cheap proxy interchangeably.
using DesignScorer = std::function<ObjectiveValue(
    const MotorLayout& layout, const MassProperties& mass_props, std::uint64_t seed)>;

/// Acceleration-envelope proxy: worst-case achievable acceleration over a
/// direction fan, gravity included. Fast stand-in for trained task scores.
double proxy_envelope_score(const MotorLayout& layout, const MassProperties& mass_props,
                            const RotorModel& rotor);
DesignScorer make_proxy_scorer(const RotorModel& rotor);

struct CampaignRecord {
    int design_id = 0;
    std::string phase; // "sobol-init", "bo", or "cmaes"
    Eigen::Matrix<double, DesignVector::kDim, 1> xi;
    bool prescreen_pass = false;
    std::string prescreen_reason;
    std::optional<nlohmann::ordered_json> repaired_layout;
    double score = 0.0;
    double stderr_ = 0.0;
    std::uint64_t eval_seed = 0;
    std::string error; // scorer exception text; score forced to 0

    nlohmann::ordered_json to_json() const;
    static CampaignRecord from_json(const nlohmann::json& j);
};

struct CampaignResult {
    std::vector<CampaignRecord> records;
    std::optional<DesignVector> best_xi;
    double best_score = 0.0;
    int bo_evaluations = 0;
    int cmaes_evaluations = 0;
    int replayed = 0; // records reused from an existing log on resume
};

/// BO phase then CMA-ES refinement from BO's best. Every evaluation is
/// appended to the record log before the next proposal; rerunning with the
/// same config resumes by replaying the log instead of re-evaluating.
CampaignResult run_campaign(const CampaignConfig& cfg, const DesignScorer& scorer);

void write_convergence_csv(const std::vector<CampaignRecord>& records,
                           const std::string& path);

} // namespace aforge
