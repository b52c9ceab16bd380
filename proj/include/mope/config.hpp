#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mope/simulator.hpp"
#include "mope/solver.hpp"

namespace mope {

// One experiment cell template: how the buyer decides.
struct MethodSpec {
    enum class Kind { Mope, SingleExpert, VMaxv, VQmdp };

    Kind kind = Kind::Mope;
    Aggregator aggregator = Aggregator::Majority;
    Hierarchy hierarchy = Hierarchy::H3;
    BeliefMode belief_mode = BeliefMode::FF;
    int spa = 4;
    int aps = 5;
    int sellers_per_sp = 1;

    // e.g. "mope-majority-H3-S4-A5-ff", "single_expert(5)", "v_maxv", "v_qmdp"
    std::string label() const;
};

struct ExperimentConfig {
    std::vector<int> W;
    std::vector<MethodSpec> methods;
    ObservationParams obs;
    RewardParams rew;
    PopulationConfig population;
    int episodes = 500;
    int max_steps = 100;
    uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";
    std::string cache_dir = "mope_cache";
    SolverOptions solver;

    void validate() const;
};

MethodSpec method_from_json(const nlohmann::json& j);
nlohmann::json method_to_json(const MethodSpec& m);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

ExperimentConfig load_config_file(const std::string& path);

Aggregator parse_aggregator(const std::string& s);
Hierarchy parse_hierarchy(const std::string& s);
BeliefMode parse_belief_mode(const std::string& s);

}  // namespace mope
