#include "aforge/halving.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "aforge/rng.hpp"

namespace aforge {

void HalvingSchedule::validate() const {
    if (stages.empty()) throw std::invalid_argument("halving: empty schedule");
    for (size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].survivors <= 0 || stages[i].epochs <= 0)
            throw std::invalid_argument("halving: stage counts must be positive");
        if (i > 0 && stages[i].survivors >= stages[i - 1].survivors)
            throw std::invalid_argument("halving: survivor counts must strictly decrease");
    }
}

int HalvingSchedule::total_epochs() const {
    int total = 0;
    for (const auto& st : stages) total += st.survivors * st.epochs;
    return total;
}

HalvingSchedule HalvingSchedule::parse(const std::string& text) {
    HalvingSchedule sched;
    sched.stages.clear();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto x = item.find('x');
        if (x == std::string::npos)
            throw std::invalid_argument("halving: expected N x EPOCHS, got '" + item + "'");
        HalvingStage st;
        st.survivors = std::stoi(item.substr(0, x));
        st.epochs = std::stoi(item.substr(x + 1));
        sched.stages.push_back(st);
    }
    sched.validate();
    return sched;
}

std::string HalvingSchedule::to_string() const {
    std::string out;
    for (size_t i = 0; i < stages.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(stages[i].survivors) + "x" + std::to_string(stages[i].epochs);
    }
    return out;
}

HalvingResult sequential_halving(HalvingBackend& backend, const HalvingSchedule& schedule,
                                 std::uint64_t seed) {
    schedule.validate();

    struct Arm {
        int id = 0;
        std::uint64_t seed = 0;
        std::unique_ptr<HalvingBackend::Run> run;
        int total_epochs = 0;
        double score = 0.0;
    };

    Rng seeder(seed);
    std::vector<Arm> arms;
    arms.reserve(schedule.stages.front().survivors);
    for (int i = 0; i < schedule.stages.front().survivors; ++i) {
        Arm arm;
        arm.id = i;
        arm.seed = seeder.derive(i).at(0);
        arm.run = backend.start(arm.seed);
        arms.push_back(std::move(arm));
    }

    HalvingResult result;
    for (size_t s = 0; s < schedule.stages.size(); ++s) {
        const HalvingStage& stage = schedule.stages[s];
        // Stage 0 starts with exactly stage.survivors arms; later stages were
        // pruned to the right size at the end of the previous iteration.
        for (auto& arm : arms) {
            backend.train(*arm.run, stage.epochs);
            arm.total_epochs += stage.epochs;
            arm.score = backend.score(*arm.run);
            result.total_epochs_consumed += stage.epochs;
        }

        const int keep = (s + 1 < schedule.stages.size())
                             ? schedule.stages[s + 1].survivors
                             : 1;
        std::stable_sort(arms.begin(), arms.end(),
                         [](const Arm& a, const Arm& b) { return a.score > b.score; });

        for (size_t i = 0; i < arms.size(); ++i) {
            HalvingAuditEntry entry;
            entry.arm = arms[i].id;
            entry.seed = arms[i].seed;
            entry.stage = static_cast<int>(s);
            entry.epochs_this_stage = stage.epochs;
            entry.total_epochs = arms[i].total_epochs;
            entry.score = arms[i].score;
            entry.survived = static_cast<int>(i) < keep;
            result.audit.push_back(entry);
        }
        arms.resize(std::min<size_t>(arms.size(), keep));
    }

    result.best_arm = arms.front().id;
    result.best_score = arms.front().score;
    result.best_run = std::move(arms.front().run);
    return result;
}

PpoHalvingBackend::PpoHalvingBackend(VehicleModel model, TaskSpec task, PpoConfig cfg,
                                     int eval_episodes, std::uint64_t eval_seed)
    : model_(std::move(model)), task_(std::move(task)), cfg_(std::move(cfg)),
      eval_episodes_(eval_episodes), eval_seed_(eval_seed) {}

std::unique_ptr<HalvingBackend::Run> PpoHalvingBackend::start(std::uint64_t seed) {
    return std::make_unique<PpoRun>(PpoTrainer(model_, task_, cfg_, seed));
}

void PpoHalvingBackend::train(Run& run, int epochs) {
    static_cast<PpoRun&>(run).trainer.train_epochs(epochs);
}

double PpoHalvingBackend::score(Run& run) {
    return static_cast<PpoRun&>(run).trainer.evaluate(eval_episodes_, eval_seed_).mean;
}

} // namespace aforge
