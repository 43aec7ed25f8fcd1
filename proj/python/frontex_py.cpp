#include "frontex/exploration.hpp"
#include "frontex/morton.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace frontex;

namespace {

std::tuple<double, double, double> to_tuple(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

std::string metrics_csv(const MetricsLog& log) {
  std::ostringstream out;
  write_metrics(log, out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_frontex, m) {
  m.doc() = "Frontier-driven exploration in octree occupancy maps";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  m.def("morton_encode", &morton_encode, py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "morton_decode",
      [](MortonCode code) {
        const auto c = morton_decode(code);
        return std::make_tuple(c.x, c.y, c.z);
      },
      py::arg("code"));
  m.def("voxel_entropy", &voxel_entropy, py::arg("p"));
  m.def("utility", &utility, py::arg("gain"), py::arg("time"));
  m.def("window_columns", &window_columns, py::arg("fov_h"), py::arg("columns"));
  m.def(
      "optimal_yaw",
      [](const std::vector<std::vector<double>>& rows, double fov_h) {
        EntropyImage img;
        img.rows = static_cast<int>(rows.size());
        img.columns = rows.empty() ? 0 : static_cast<int>(rows.front().size());
        for (const auto& r : rows) {
          if (static_cast<int>(r.size()) != img.columns) {
            throw std::invalid_argument("rows must have equal length");
          }
          img.values.insert(img.values.end(), r.begin(), r.end());
        }
        const auto choice = optimal_yaw(img, fov_h);
        return std::make_tuple(choice.yaw, choice.gain, choice.column);
      },
      py::arg("rows"), py::arg("fov_h"),
      "Best yaw for an entropy image given as rows of per-column values. Returns (yaw, gain, "
      "column).");

  py::class_<ExplorationConfig>(m, "ExplorationConfig")
      .def(py::init<>())
      .def_readwrite("resolution", &ExplorationConfig::resolution)
      .def_readwrite("n_candidates", &ExplorationConfig::n_candidates)
      .def_readwrite("seed", &ExplorationConfig::seed)
      .def_readwrite("min_frontier_voxels", &ExplorationConfig::min_frontier_voxels)
      .def_readwrite("max_sim_time", &ExplorationConfig::max_sim_time)
      .def_property_readonly("safety_radius", [](const ExplorationConfig& c) {
        return c.mav.safety_radius;
      })
      .def("set", [](ExplorationConfig& c, const std::string& key,
                     const std::string& value) { set_config_value(c, key, value); })
      .def("apply_preset", [](ExplorationConfig& c, const std::string& name) {
        apply_preset(c, name);
      })
      .def("validate", &ExplorationConfig::validate);
  m.def("config_keys", &config_keys);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("config", &Scenario::config)
      .def_property_readonly("bounds", [](const Scenario& s) {
        return std::make_tuple(to_tuple(s.world.bounds.min), to_tuple(s.world.bounds.max));
      })
      .def_property_readonly("obstacle_count",
                             [](const Scenario& s) { return s.world.obstacles.size(); })
      .def_property_readonly("start", [](const Scenario& s) {
        return std::make_tuple(to_tuple(s.start.position), s.start.yaw);
      })
      .def("observable_volume", [](const Scenario& s) {
        return observable_volume(s.world, s.start.position, s.config.resolution).total_m3();
      });
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario_string, py::arg("text"));

  py::enum_<RunStatus>(m, "RunStatus")
      .value("COMPLETE", RunStatus::kComplete)
      .value("TIMEOUT", RunStatus::kTimeout)
      .value("SIM_TIME_LIMIT", RunStatus::kSimTimeLimit);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("status", &RunResult::status)
      .def_readonly("iterations", &RunResult::iterations)
      .def_readonly("sim_time", &RunResult::sim_time)
      .def_readonly("retry_guard_fired", &RunResult::retry_guard_fired)
      .def_readonly("safety_violations", &RunResult::safety_violations)
      .def_property_readonly("metrics_csv", [](const RunResult& r) { return metrics_csv(r.metrics); })
      .def_property_readonly("explored_volume", [](const RunResult& r) {
        std::vector<double> out;
        for (const auto& s : r.metrics.samples) out.push_back(s.explored_volume_m3);
        return out;
      })
      .def_property_readonly("plan_time_summary", [](const RunResult& r) {
        return format_plan_time_summary(plan_time_stats(r.metrics));
      });

  py::class_<Explorer>(m, "Explorer")
      .def(py::init<Scenario>(), py::arg("scenario"))
      .def(
          "run",
          [](Explorer& e, double wall_timeout_s) {
            RunOptions options;
            options.wall_timeout_s = wall_timeout_s;
            py::gil_scoped_release release;
            return e.run(options);
          },
          py::arg("wall_timeout_s") = 0.0)
      .def_property_readonly("sim_time", &Explorer::sim_time)
      .def_property_readonly("frontier_blocks", [](const Explorer& e) { return e.frontiers().size(); })
      .def_property_readonly("explored_volume",
                             [](const Explorer& e) { return explored_volume(e.map()); })
      .def_property_readonly("position",
                             [](const Explorer& e) { return to_tuple(e.state().position); })
      .def("map_text", [](const Explorer& e) {
        std::ostringstream out;
        write_map(e.map(), out);
        return out.str();
      });
}
