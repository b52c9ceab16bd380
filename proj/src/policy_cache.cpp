#include "mope/policy_cache.hpp"

#include <fstream>
#include <unistd.h>
#include <iostream>

#include <json.hpp>

namespace mope {

PolicyCache::PolicyCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

bool PolicyCache::contains(const std::string& key) const {
    return std::filesystem::exists(dir_ / (key + ".json"));
}

void PolicyCache::store(const std::filesystem::path& file, const ValueFunction& vf) {
    nlohmann::json j;
    j["iterations"] = vf.iterations;
    j["residual"] = vf.residual;
    j["converged"] = vf.converged;
    j["active_size"] = vf.active_size;
    auto& vecs = j["vectors"] = nlohmann::json::array();
    for (const auto& alpha : vf.vectors) vecs.push_back({{"action", alpha.action}, {"values", alpha.values}});
    // write-then-rename so concurrent writers of the same key cannot corrupt it
    const auto tmp = file.string() + ".tmp" + std::to_string(static_cast<unsigned long long>(::getpid()));
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write cache file " + file.string());
        out << j.dump();
    }
    std::filesystem::rename(tmp, file);
}

ValueFunction PolicyCache::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read cache file " + file.string());
    nlohmann::json j;
    in >> j;
    ValueFunction vf;
    vf.iterations = j.at("iterations").get<int>();
    vf.residual = j.at("residual").get<double>();
    vf.converged = j.at("converged").get<bool>();
    vf.active_size = j.value("active_size", 0);
    for (const auto& jv : j.at("vectors")) {
        AlphaVector alpha;
        alpha.action = jv.at("action").get<int>();
        alpha.values = jv.at("values").get<std::vector<double>>();
        vf.vectors.push_back(std::move(alpha));
    }
    if (vf.vectors.empty()) throw std::runtime_error("cache file holds no vectors: " + file.string());
    return vf;
}

std::shared_ptr<const ValueFunction> PolicyCache::load_or_solve(const std::string& key, const EnumeratedPomdp& pomdp,
                                                                const SolverOptions& opt) {
    const auto file = dir_ / (key + ".json");
    if (std::filesystem::exists(file)) {
        return std::make_shared<const ValueFunction>(load(file));
    }
    ValueFunction vf = solve_with_options(pomdp, opt);
    ++solves_;
    if (!vf.converged)
        std::cerr << "warning: solver hit max_iter for " << key << " (residual " << vf.residual << ")\n";
    store(file, vf);
    return std::make_shared<const ValueFunction>(std::move(vf));
}

}  // namespace mope
