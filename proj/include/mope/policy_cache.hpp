#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "mope/decomposition.hpp"
#include "mope/solver.hpp"

namespace mope {

// Disk-backed store of solved value functions keyed by policy_cache_key, so
// uniformly composed SPs across every W share one Perseus solve.
class PolicyCache {
  public:
    explicit PolicyCache(std::filesystem::path dir);

    const std::filesystem::path& dir() const { return dir_; }

    // Returns the cached value function for `key`, solving and storing it on a
    // miss. Emits a warning line on stderr when the solver hit max_iter.
    std::shared_ptr<const ValueFunction> load_or_solve(const std::string& key, const EnumeratedPomdp& pomdp,
                                                       const SolverOptions& opt);

    bool contains(const std::string& key) const;
    int solves_performed() const { return solves_; }

    static void store(const std::filesystem::path& file, const ValueFunction& vf);
    static ValueFunction load(const std::filesystem::path& file);

  private:
    std::filesystem::path dir_;
    int solves_ = 0;
};

}  // namespace mope
