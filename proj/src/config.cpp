#include "mope/config.hpp"

#include <fstream>
#include <stdexcept>

namespace mope {

std::string MethodSpec::label() const {
    switch (kind) {
        case Kind::SingleExpert: return "single_expert(" + std::to_string(aps) + ")";
        case Kind::VMaxv: return "v_maxv";
        case Kind::VQmdp: return "v_qmdp";
        case Kind::Mope:
            return std::string("mope-") + aggregator_name(aggregator) +
                   (aggregator == Aggregator::Majority ? std::string("-") + hierarchy_name(hierarchy) : std::string()) +
                   "-S" + std::to_string(spa) + "-A" + std::to_string(aps) + "-" + belief_mode_name(belief_mode);
    }
    return "?";
}

Aggregator parse_aggregator(const std::string& s) {
    if (s == "majority") return Aggregator::Majority;
    if (s == "maxq") return Aggregator::MaxQ;
    if (s == "pmq" || s == "parallel_maxq") return Aggregator::ParallelMaxQ;
    throw std::invalid_argument("unknown aggregator: " + s);
}

Hierarchy parse_hierarchy(const std::string& s) {
    if (s == "H1" || s == "h1") return Hierarchy::H1;
    if (s == "H2" || s == "h2") return Hierarchy::H2;
    if (s == "H3" || s == "h3") return Hierarchy::H3;
    throw std::invalid_argument("unknown hierarchy: " + s);
}

BeliefMode parse_belief_mode(const std::string& s) {
    if (s == "exact") return BeliefMode::Exact;
    if (s == "ff") return BeliefMode::FF;
    if (s == "parallel") return BeliefMode::Parallel;
    throw std::invalid_argument("unknown belief mode: " + s);
}

MethodSpec method_from_json(const nlohmann::json& j) {
    MethodSpec m;
    const std::string kind = j.value("kind", "mope");
    if (kind == "mope") m.kind = MethodSpec::Kind::Mope;
    else if (kind == "single_expert") m.kind = MethodSpec::Kind::SingleExpert;
    else if (kind == "v_maxv") m.kind = MethodSpec::Kind::VMaxv;
    else if (kind == "v_qmdp") m.kind = MethodSpec::Kind::VQmdp;
    else throw std::invalid_argument("unknown method kind: " + kind);
    if (j.contains("aggregator")) m.aggregator = parse_aggregator(j.at("aggregator").get<std::string>());
    if (j.contains("hierarchy")) m.hierarchy = parse_hierarchy(j.at("hierarchy").get<std::string>());
    if (j.contains("belief_mode")) m.belief_mode = parse_belief_mode(j.at("belief_mode").get<std::string>());
    m.spa = j.value("spa", m.spa);
    m.aps = j.value("aps", m.aps);
    m.sellers_per_sp = j.value("sellers_per_sp", m.sellers_per_sp);
    return m;
}

nlohmann::json method_to_json(const MethodSpec& m) {
    nlohmann::json j;
    switch (m.kind) {
        case MethodSpec::Kind::Mope: j["kind"] = "mope"; break;
        case MethodSpec::Kind::SingleExpert: j["kind"] = "single_expert"; break;
        case MethodSpec::Kind::VMaxv: j["kind"] = "v_maxv"; break;
        case MethodSpec::Kind::VQmdp: j["kind"] = "v_qmdp"; break;
    }
    j["aggregator"] = aggregator_name(m.aggregator);
    j["hierarchy"] = hierarchy_name(m.hierarchy);
    j["belief_mode"] = belief_mode_name(m.belief_mode);
    j["spa"] = m.spa;
    j["aps"] = m.aps;
    j["sellers_per_sp"] = m.sellers_per_sp;
    return j;
}

void ExperimentConfig::validate() const {
    if (W.empty()) throw std::invalid_argument("config needs at least one W");
    for (int w : W)
        if (w < 2) throw std::invalid_argument("W must be >= 2");
    if (methods.empty()) throw std::invalid_argument("config needs at least one method");
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    obs.validate();
    rew.validate();
    for (const auto& m : methods) {
        if (m.kind == MethodSpec::Kind::Mope || m.kind == MethodSpec::Kind::SingleExpert) {
            DecompositionConfig d{m.spa, m.aps, m.sellers_per_sp, 0};
            d.validate();
        }
    }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.W = j.at("W").get<std::vector<int>>();
    for (const auto& jm : j.at("methods")) c.methods.push_back(method_from_json(jm));
    if (j.contains("observation")) {
        const auto& jo = j.at("observation");
        c.obs.p_true_report_trustworthy = jo.value("p_true_report_trustworthy", c.obs.p_true_report_trustworthy);
        c.obs.p_true_report_untrustworthy = jo.value("p_true_report_untrustworthy", c.obs.p_true_report_untrustworthy);
        c.obs.p_buy_obs_correct = jo.value("p_buy_obs_correct", c.obs.p_buy_obs_correct);
    }
    if (j.contains("reward")) {
        const auto& jr = j.at("reward");
        c.rew.cost_advisor_query = jr.value("cost_advisor_query", c.rew.cost_advisor_query);
        c.rew.cost_seller_query = jr.value("cost_seller_query", c.rew.cost_seller_query);
        c.rew.reward_success = jr.value("reward_success", c.rew.reward_success);
        c.rew.penalty_failure = jr.value("penalty_failure", c.rew.penalty_failure);
        c.rew.discount = jr.value("discount", c.rew.discount);
    }
    if (j.contains("population")) {
        const auto& jp = j.at("population");
        c.population.pct_sellers = jp.value("pct_sellers", c.population.pct_sellers);
        c.population.pct_untrustworthy = jp.value("pct_untrustworthy", c.population.pct_untrustworthy);
        c.population.pct_good_sellers = jp.value("pct_good_sellers", c.population.pct_good_sellers);
    }
    if (j.contains("solver")) {
        const auto& js = j.at("solver");
        c.solver.belief_samples = js.value("belief_samples", c.solver.belief_samples);
        c.solver.epsilon = js.value("epsilon", c.solver.epsilon);
        c.solver.max_iter = js.value("max_iter", c.solver.max_iter);
        c.solver.seed = js.value("seed", c.solver.seed);
    }
    c.episodes = j.value("episodes", c.episodes);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.cache_dir = j.value("cache_dir", c.cache_dir);
    return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["W"] = c.W;
    auto& ms = j["methods"] = nlohmann::json::array();
    for (const auto& m : c.methods) ms.push_back(method_to_json(m));
    j["observation"] = {{"p_true_report_trustworthy", c.obs.p_true_report_trustworthy},
                        {"p_true_report_untrustworthy", c.obs.p_true_report_untrustworthy},
                        {"p_buy_obs_correct", c.obs.p_buy_obs_correct}};
    j["reward"] = {{"cost_advisor_query", c.rew.cost_advisor_query},
                   {"cost_seller_query", c.rew.cost_seller_query},
                   {"reward_success", c.rew.reward_success},
                   {"penalty_failure", c.rew.penalty_failure},
                   {"discount", c.rew.discount}};
    j["population"] = {{"pct_sellers", c.population.pct_sellers},
                       {"pct_untrustworthy", c.population.pct_untrustworthy},
                       {"pct_good_sellers", c.population.pct_good_sellers}};
    j["solver"] = {{"belief_samples", c.solver.belief_samples},
                   {"epsilon", c.solver.epsilon},
                   {"max_iter", c.solver.max_iter},
                   {"seed", c.solver.seed}};
    j["episodes"] = c.episodes;
    j["max_steps"] = c.max_steps;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["out_dir"] = c.out_dir;
    j["cache_dir"] = c.cache_dir;
    return j;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace mope
