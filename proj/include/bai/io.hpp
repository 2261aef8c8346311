#pragma once

#include <string>

#include "bai/distributions.hpp"

#include "json.hpp"

namespace bai {

// Problem files:
//   {"model": "finite",    "arms": [{"atoms": [...], "weights": [...]}, ...]}
//   {"model": "bernoulli", "arms": [0.7, 0.5, 0.3]}
//   {"model": "gaussian",  "sigma2": 1.0, "arms": [1.0, 0.0]}
//   {"model": "poisson",   "arms": [2.0, 1.0]}
BanditProblem problem_from_json(const nlohmann::json& j);
BanditProblem problem_from_file(const std::string& path);
nlohmann::json problem_to_json(const BanditProblem& problem);

nlohmann::json load_json_file(const std::string& path);

}  // namespace bai
