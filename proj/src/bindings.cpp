#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bai/bounds.hpp"
#include "bai/distributions.hpp"
#include "bai/info_geometry.hpp"
#include "bai/io.hpp"
#include "bai/sim.hpp"
#include "bai/strategies.hpp"
#include "bai/verify.hpp"

namespace py = pybind11;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default: return py::none();
  }
}

bai::Side side_from_string(const std::string& side) {
  if (side == "below") return bai::Side::below;
  if (side == "above") return bai::Side::above;
  throw std::invalid_argument("side must be 'below' or 'above'");
}

}  // namespace

PYBIND11_MODULE(pybai, m) {
  m.doc() = "Fixed-budget best-arm identification: information-theoretic rates, "
            "successive-rejects strategies, bounds, and Monte Carlo simulation";

  py::class_<bai::Distribution>(m, "Distribution")
      .def_static("finite", &bai::Distribution::finite, py::arg("atoms"), py::arg("weights"))
      .def_static("bernoulli", &bai::Distribution::bernoulli, py::arg("mean"))
      .def_static("gaussian", &bai::Distribution::gaussian, py::arg("mean"), py::arg("sigma2"))
      .def_static("poisson", &bai::Distribution::poisson, py::arg("mean"))
      .def_property_readonly("mean", &bai::Distribution::mean)
      .def_property_readonly("is_finite_support", &bai::Distribution::is_finite_support)
      .def("support", [](const bai::Distribution& d) {
        const bai::SupportInfo s = bai::support(d);
        return py::make_tuple(s.lower, s.upper, s.mass_at_lower, s.mass_at_upper);
      })
      .def("__repr__", &bai::Distribution::describe);

  py::class_<bai::RateValue>(m, "RateValue")
      .def_readonly("value", &bai::RateValue::value)
      .def_readonly("attained_at", &bai::RateValue::attained_at)
      .def_property_readonly("method", [](const bai::RateValue& r) { return std::string(bai::to_string(r.method)); })
      .def("__float__", [](const bai::RateValue& r) { return r.value; })
      .def("__repr__", [](const bai::RateValue& r) {
        return "RateValue(" + std::to_string(r.value) + ", " + bai::to_string(r.method) + ")";
      });

  py::class_<bai::BanditProblem>(m, "BanditProblem")
      .def_property_readonly("means", [](const bai::BanditProblem& p) { return p.means; })
      .def_property_readonly("gaps", [](const bai::BanditProblem& p) { return p.gaps; })
      .def_property_readonly("best_arm", [](const bai::BanditProblem& p) { return p.best_arm; })
      .def_property_readonly("worst_arm", [](const bai::BanditProblem& p) { return p.worst_arm; })
      .def_property_readonly("by_rank", [](const bai::BanditProblem& p) { return p.by_rank; })
      .def_property_readonly("generic", [](const bai::BanditProblem& p) { return p.generic; })
      .def("__len__", &bai::BanditProblem::size)
      .def("__repr__", &bai::BanditProblem::digest);

  m.def("analyze_problem", &bai::analyze_problem, py::arg("arms"));
  m.def("problem_from_json", [](const std::string& text) {
    return bai::problem_from_json(nlohmann::json::parse(text));
  });

  m.def("kl_divergence", &bai::kl_divergence, py::arg("p"), py::arg("q"));
  m.def("log_mgf", &bai::log_mgf, py::arg("d"), py::arg("lam"));
  m.def("fenchel_dual", &bai::fenchel_dual, py::arg("d"), py::arg("x"));
  m.def(
      "linf",
      [](const bai::Distribution& d, double x, const std::string& side, bool strict) {
        return bai::linf(d, x, side_from_string(side), strict);
      },
      py::arg("d"), py::arg("x"), py::arg("side") = "below", py::arg("strict") = false);
  m.def("tilt", &bai::tilt, py::arg("d"), py::arg("lam"));
  m.def("pair_rate", &bai::pair_rate, py::arg("worse"), py::arg("better"));
  m.def("chernoff_d", &bai::chernoff_d, py::arg("worse"), py::arg("better"));
  m.def(
      "gap_lower_bounds",
      [](const bai::Distribution& worse, const bai::Distribution& better) {
        const bai::GapBounds g = bai::gap_lower_bounds(worse, better);
        return py::make_tuple(g.pinsker, g.hoeffding_phi);
      },
      py::arg("worse"), py::arg("better"));
  m.def(
      "sample_batch",
      [](const bai::Distribution& d, std::size_t n, std::uint64_t seed) {
        bai::RngStream stream(seed);
        return bai::sample_batch(d, n, stream);
      },
      py::arg("d"), py::arg("n"), py::arg("seed"));

  py::class_<bai::PhaseSchedule>(m, "PhaseSchedule")
      .def_readonly("num_arms", &bai::PhaseSchedule::num_arms)
      .def_readonly("budget", &bai::PhaseSchedule::budget)
      .def_readonly("overline_ln_k", &bai::PhaseSchedule::overline_ln_k)
      .def_readonly("phase_lengths", &bai::PhaseSchedule::phase_lengths)
      .def_readonly("pulls_per_arm", &bai::PhaseSchedule::pulls_per_arm)
      .def_readonly("cumulative", &bai::PhaseSchedule::cumulative)
      .def_readonly("gamma", &bai::PhaseSchedule::gamma);
  m.def("sr_schedule", &bai::sr_schedule, py::arg("num_arms"), py::arg("budget"));

  py::class_<bai::StrategyTrace>(m, "StrategyTrace")
      .def_readonly("pulls", &bai::StrategyTrace::pulls)
      .def_readonly("rejection_order", &bai::StrategyTrace::rejection_order)
      .def_readonly("recommendation", &bai::StrategyTrace::recommendation)
      .def_readonly("rewards_consumed", &bai::StrategyTrace::rewards_consumed);
  m.def(
      "run_strategy",
      [](const std::string& kind, const bai::BanditProblem& problem, std::uint64_t budget, std::uint64_t seed) {
        return bai::run_strategy(bai::strategy_from_string(kind), problem, budget, bai::RngStream(seed));
      },
      py::arg("kind"), py::arg("problem"), py::arg("budget"), py::arg("seed"));

  m.def(
      "evaluate_bounds",
      [](const bai::BanditProblem& problem, std::optional<std::uint64_t> budget, std::optional<double> c_model) {
        bai::BoundOptions options;
        options.budget = budget;
        options.c_model = c_model;
        return json_to_py(bai::to_json(bai::evaluate_bounds(problem, options)));
      },
      py::arg("problem"), py::arg("budget") = std::nullopt, py::arg("c_model") = std::nullopt);

  m.def(
      "estimate_misid_prob",
      [](const bai::BanditProblem& problem, const std::string& kind, std::uint64_t budget,
         std::uint64_t replications, std::uint64_t seed, unsigned workers) {
        const bai::ErrorEstimate e = bai::estimate_misid_prob(problem, bai::strategy_from_string(kind), budget,
                                                              replications, seed, workers);
        return py::make_tuple(e.p_hat, e.stderr_);
      },
      py::arg("problem"), py::arg("kind"), py::arg("budget"), py::arg("replications"), py::arg("seed"),
      py::arg("workers") = 1);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const bai::SimConfig cfg = bai::config_from_json(nlohmann::json::parse(config_json));
        return json_to_py(bai::to_json(bai::run_experiment(cfg)));
      },
      py::arg("config_json"));

  m.def(
      "verify",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& r : bai::run_property_suite(seed))
          out.append(py::make_tuple(r.name, r.pass, r.informational, r.detail));
        return out;
      },
      py::arg("seed") = 0);
}
