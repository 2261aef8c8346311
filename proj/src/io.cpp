#include "bai/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bai {

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw std::invalid_argument("problem: " + context + ": " + message);
}

double number_at(const nlohmann::json& j, const std::string& context) {
  if (!j.is_number()) fail(context, "expected a number");
  return j.get<double>();
}

}  // namespace

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return j;
}

BanditProblem problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail("root", "expected an object");
  if (!j.contains("model") || !j.at("model").is_string()) fail("model", "missing or not a string");
  if (!j.contains("arms") || !j.at("arms").is_array()) fail("arms", "missing or not an array");
  const std::string model = j.at("model").get<std::string>();
  const auto& arms_json = j.at("arms");

  std::vector<Distribution> arms;
  arms.reserve(arms_json.size());
  if (model == "finite") {
    for (std::size_t a = 0; a < arms_json.size(); ++a) {
      const std::string ctx = "arms[" + std::to_string(a) + "]";
      const auto& arm = arms_json[a];
      if (!arm.is_object() || !arm.contains("atoms") || !arm.contains("weights"))
        fail(ctx, "finite arms need atoms and weights arrays");
      std::vector<double> atoms, weights;
      for (const auto& v : arm.at("atoms")) atoms.push_back(number_at(v, ctx + ".atoms"));
      for (const auto& v : arm.at("weights")) weights.push_back(number_at(v, ctx + ".weights"));
      arms.push_back(Distribution::finite(std::move(atoms), std::move(weights)));
    }
  } else if (model == "bernoulli" || model == "gaussian" || model == "poisson") {
    double sigma2 = 1.0;
    if (model == "gaussian") {
      if (!j.contains("sigma2")) fail("sigma2", "required for the gaussian model");
      sigma2 = number_at(j.at("sigma2"), "sigma2");
    }
    for (std::size_t a = 0; a < arms_json.size(); ++a) {
      const std::string ctx = "arms[" + std::to_string(a) + "]";
      const double mean = number_at(arms_json[a], ctx);
      if (model == "bernoulli")
        arms.push_back(Distribution::bernoulli(mean));
      else if (model == "gaussian")
        arms.push_back(Distribution::gaussian(mean, sigma2));
      else
        arms.push_back(Distribution::poisson(mean));
    }
  } else {
    fail("model", "unknown model '" + model + "' (expected finite, bernoulli, gaussian, or poisson)");
  }
  return analyze_problem(std::move(arms));
}

BanditProblem problem_from_file(const std::string& path) { return problem_from_json(load_json_file(path)); }

nlohmann::json problem_to_json(const BanditProblem& problem) {
  nlohmann::json j;
  nlohmann::json arms = nlohmann::json::array();
  if (problem.arms[0].is_finite_support()) {
    j["model"] = "finite";
    for (const auto& d : problem.arms) {
      const auto& fs = d.finite_support();
      arms.push_back({{"atoms", fs.atoms()}, {"weights", fs.weights()}});
    }
  } else {
    const auto& ef = problem.arms[0].exp_family();
    switch (ef.family) {
      case Family::bernoulli: j["model"] = "bernoulli"; break;
      case Family::gaussian_fixed_variance:
        j["model"] = "gaussian";
        j["sigma2"] = ef.sigma2;
        break;
      case Family::poisson: j["model"] = "poisson"; break;
    }
    for (const auto& d : problem.arms) arms.push_back(d.exp_family().mean);
  }
  j["arms"] = arms;
  return j;
}

}  // namespace bai
