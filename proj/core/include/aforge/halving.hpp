#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aforge/ppo.hpp"

namespace aforge {

struct HalvingStage {
    int survivors = 0; // arms trained in this stage
    int epochs = 0;    // additional epochs each arm receives
};

struct HalvingSchedule {
    std::vector<HalvingStage> stages{{8, 800}, {6, 800}, {4, 3200}};

    void validate() const; // survivor counts strictly decreasing, all positive
    int total_epochs() const;

    /// Parses "8x800,6x800,4x3200".
    static HalvingSchedule parse(const std::string& text);
    std::string to_string() const;
};

/// Training backend for sequential halving; allows stubbing in tests and
/// alternative trainers.
class HalvingBackend {
public:
    struct Run {
        virtual ~Run() = default;
    };

    virtual ~HalvingBackend() = default;
    virtual std::unique_ptr<Run> start(std::uint64_t seed) = 0;
    virtual void train(Run& run, int epochs) = 0;
    virtual double score(Run& run) = 0; // interim task performance
};

struct HalvingAuditEntry {
    int arm = 0;
    std::uint64_t seed = 0;
    int stage = 0;
    int epochs_this_stage = 0;
    int total_epochs = 0;
    double score = 0.0;
    bool survived = false;
};

struct HalvingResult {
    std::unique_ptr<HalvingBackend::Run> best_run;
    int best_arm = -1;
    double best_score = 0.0;
    std::vector<HalvingAuditEntry> audit;
    int total_epochs_consumed = 0;
};

/// Trains stages[0].survivors arms from independent seeds, ranks by interim
/// score after each stage and keeps only the next stage's survivor count;
/// returns the single best run after the final stage.
HalvingResult sequential_halving(HalvingBackend& backend, const HalvingSchedule& schedule,
                                 std::uint64_t seed);

/// PPO-backed backend; scoring evaluates the deterministic policy.
class PpoHalvingBackend : public HalvingBackend {
public:
    PpoHalvingBackend(VehicleModel model, TaskSpec task, PpoConfig cfg,
                      int eval_episodes = 64, std::uint64_t eval_seed = 9001);

    std::unique_ptr<Run> start(std::uint64_t seed) override;
    void train(Run& run, int epochs) override;
    double score(Run& run) override;

    struct PpoRun : Run {
        explicit PpoRun(PpoTrainer t) : trainer(std::move(t)) {}
        PpoTrainer trainer;
    };

private:
    VehicleModel model_;
    TaskSpec task_;
    PpoConfig cfg_;
    int eval_episodes_;
    std::uint64_t eval_seed_;
};

} // namespace aforge
