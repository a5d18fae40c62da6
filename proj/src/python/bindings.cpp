#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "plnav/error.hpp"
#include "plnav/frames.hpp"
#include "plnav/imu_preintegration.hpp"
#include "plnav/io.hpp"
#include "plnav/metrics.hpp"
#include "plnav/pipeline.hpp"
#include "plnav/pseudorange.hpp"
#include "plnav/sim.hpp"

namespace py = pybind11;
using namespace plnav;

namespace {

// Positions of a state list as an (N, 3) array, plus their epochs.
Eigen::MatrixX3d positions_of(const std::vector<NavState>& states) {
  Eigen::MatrixX3d out(static_cast<Eigen::Index>(states.size()), 3);
  for (std::size_t i = 0; i < states.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = states[i].position;
  return out;
}

std::vector<double> epochs_of(const std::vector<NavState>& states) {
  std::vector<double> out;
  for (const auto& s : states) out.push_back(s.epoch);
  return out;
}

}  // namespace

PYBIND11_MODULE(_plnav, m) {
  m.doc() = "Pseudolite-aided GNSS/IMU navigation: simulation, LS and factor-graph solvers";

  static py::handle nav_error = py::exception<NavError>(m, "NavError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NavError& e) {
      py::gil_scoped_acquire gil;
      py::object inst = nav_error(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(nav_error.ptr(), inst.ptr());
    }
  });

  py::class_<GeodeticCoord>(m, "GeodeticCoord")
      .def(py::init([](double lat, double lon, double h) { return GeodeticCoord{lat, lon, h}; }), py::arg("latitude"),
           py::arg("longitude"), py::arg("height") = 0.0)
      .def_readwrite("latitude", &GeodeticCoord::latitude)
      .def_readwrite("longitude", &GeodeticCoord::longitude)
      .def_readwrite("height", &GeodeticCoord::height)
      .def("__repr__", [](const GeodeticCoord& g) {
        return "GeodeticCoord(" + std::to_string(g.latitude) + ", " + std::to_string(g.longitude) + ", " +
               std::to_string(g.height) + ")";
      });

  m.def("geodetic_to_ecef", &geodetic_to_ecef);
  m.def("ecef_to_geodetic", &ecef_to_geodetic);
  m.def("enu_rotation", &enu_rotation, "Rotation taking ECEF vectors to the local ENU frame");
  m.def("normal_gravity", &normal_gravity, py::arg("latitude"), py::arg("height"));
  m.def("gravity_ecef", &gravity_ecef);
  m.def("so3_exp", &so3_exp);
  m.def("so3_log", &so3_log);

  py::class_<DopValues>(m, "DopValues")
      .def_readonly("pdop", &DopValues::pdop)
      .def_readonly("hdop", &DopValues::hdop)
      .def_readonly("vdop", &DopValues::vdop)
      .def_readonly("gdop", &DopValues::gdop);

  py::enum_<TransmitterKind>(m, "TransmitterKind")
      .value("GNSS_SATELLITE", TransmitterKind::kGnssSatellite)
      .value("PSEUDOLITE", TransmitterKind::kPseudolite);

  py::class_<TransmitterState>(m, "TransmitterState")
      .def(py::init([](std::string id, TransmitterKind kind, const Vec3& position, double clock_offset) {
             return TransmitterState{std::move(id), kind, position, clock_offset};
           }),
           py::arg("id"), py::arg("kind"), py::arg("position"), py::arg("clock_offset") = 0.0)
      .def_readwrite("id", &TransmitterState::id)
      .def_readwrite("kind", &TransmitterState::kind)
      .def_readwrite("position", &TransmitterState::position)
      .def_readwrite("clock_offset", &TransmitterState::clock_offset);

  m.def("predict_pseudorange", &predict_pseudorange, py::arg("tx"), py::arg("rx_position"), py::arg("rx_clock"));
  m.def(
      "compute_dop", [](const std::vector<TransmitterState>& txs, const Vec3& p) { return compute_dop(txs, p); },
      py::arg("transmitters"), py::arg("position"));

  py::class_<LsSolution>(m, "LsSolution")
      .def_readonly("epoch", &LsSolution::epoch)
      .def_readonly("position", &LsSolution::position)
      .def_readonly("clock", &LsSolution::clock)
      .def_readonly("covariance", &LsSolution::covariance)
      .def_readonly("dop", &LsSolution::dop)
      .def_readonly("iterations", &LsSolution::iterations)
      .def_readonly("converged", &LsSolution::converged)
      .def_readonly("num_observations", &LsSolution::num_observations);

  py::class_<ImuSample>(m, "ImuSample")
      .def(py::init([](double t, const Vec3& gyro, const Vec3& accel) { return ImuSample{t, gyro, accel}; }),
           py::arg("t"), py::arg("gyro"), py::arg("accel"))
      .def_readwrite("t", &ImuSample::t)
      .def_readwrite("gyro", &ImuSample::gyro)
      .def_readwrite("accel", &ImuSample::accel);

  py::class_<ImuNoiseParams>(m, "ImuNoiseParams")
      .def(py::init<>())
      .def_readwrite("gyro_noise_density", &ImuNoiseParams::gyro_noise_density)
      .def_readwrite("accel_noise_density", &ImuNoiseParams::accel_noise_density)
      .def_readwrite("gyro_bias_walk", &ImuNoiseParams::gyro_bias_walk)
      .def_readwrite("accel_bias_walk", &ImuNoiseParams::accel_bias_walk)
      .def_readwrite("sample_rate", &ImuNoiseParams::sample_rate);

  py::class_<PreintegratedImu>(m, "PreintegratedImu")
      .def_readonly("delta_R", &PreintegratedImu::delta_R)
      .def_readonly("delta_v", &PreintegratedImu::delta_v)
      .def_readonly("delta_p", &PreintegratedImu::delta_p)
      .def_readonly("covariance", &PreintegratedImu::covariance)
      .def_readonly("dt_total", &PreintegratedImu::dt_total)
      .def_readonly("num_samples", &PreintegratedImu::num_samples);

  m.def(
      "preintegrate",
      [](const std::vector<ImuSample>& samples, double t_start, double t_end, const ImuNoiseParams& noise) {
        return preintegrate(samples, t_start, t_end, ImuBias{}, noise);
      },
      py::arg("samples"), py::arg("t_start"), py::arg("t_end"), py::arg("noise") = ImuNoiseParams{},
      "Preintegrates samples in (t_start, t_end] about a zero bias");

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &ScenarioConfig::name)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("duration", &ScenarioConfig::duration)
      .def_readwrite("gnss_epoch_rate", &ScenarioConfig::gnss_epoch_rate)
      .def_readwrite("imu_rate", &ScenarioConfig::imu_rate)
      .def_readwrite("origin", &ScenarioConfig::origin)
      .def_readwrite("pr_sigma", &ScenarioConfig::pr_sigma)
      .def_readwrite("pr_bias_sigma", &ScenarioConfig::pr_bias_sigma)
      .def_readwrite("pr_bias_tau", &ScenarioConfig::pr_bias_tau)
      .def_readwrite("inject_noise", &ScenarioConfig::inject_noise)
      .def_readwrite("lever_arm", &ScenarioConfig::lever_arm)
      .def_property_readonly("num_pseudolites", [](const ScenarioConfig& c) { return c.pseudolites.size(); })
      .def_property_readonly("num_satellites", [](const ScenarioConfig& c) { return c.satellites.size(); })
      .def("validate", &ScenarioConfig::validate)
      .def("to_yaml", [](const ScenarioConfig& c) { return io::emit_config(c); })
      .def_static("from_yaml", [](const std::string& text) { return io::parse_config(text); })
      .def_static("load", [](const std::filesystem::path& p) { return io::read_config(p); });

  m.def("default_scenarios", &default_paper_scenarios, py::arg("seed") = 1,
        "The four signal sets GPS, GPS+2PL, GPS+PL01 and GPS+PL02");

  py::class_<SimulatedDataset>(m, "SimulatedDataset")
      .def_readonly("config", &SimulatedDataset::config)
      .def_readonly("imu", &SimulatedDataset::imu)
      .def_readonly("base_position", &SimulatedDataset::base_position)
      .def_readonly("notices", &SimulatedDataset::notices)
      .def_property_readonly("num_epochs", [](const SimulatedDataset& d) { return d.epochs.size(); })
      .def_property_readonly("truth_positions", [](const SimulatedDataset& d) { return positions_of(d.truth.samples()); })
      .def_property_readonly("truth_times", [](const SimulatedDataset& d) { return epochs_of(d.truth.samples()); })
      .def("save", [](const SimulatedDataset& d, const std::filesystem::path& dir) { return io::write_dataset(dir, d); });

  m.def("simulate", &simulate, py::arg("config"));
  m.def(
      "run_ls", [](const SimulatedDataset& d) { return run_ls(d.epochs, d.base_position); }, py::arg("dataset"),
      "Epoch-wise single-differenced least squares");

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("label", &ErrorReport::label)
      .def_readonly("algorithm", &ErrorReport::algorithm)
      .def_readonly("epochs", &ErrorReport::epochs)
      .def_readonly("e2d", &ErrorReport::e2d)
      .def_readonly("e3d", &ErrorReport::e3d)
      .def_readonly("mae_2d", &ErrorReport::mae_2d)
      .def_readonly("max_2d", &ErrorReport::max_2d)
      .def_readonly("mae_3d", &ErrorReport::mae_3d)
      .def_readonly("max_3d", &ErrorReport::max_3d)
      .def_readonly("mean_pdop", &ErrorReport::mean_pdop)
      .def_readonly("mean_hdop", &ErrorReport::mean_hdop)
      .def_readonly("mean_vdop", &ErrorReport::mean_vdop);

  py::class_<ScenarioRun>(m, "ScenarioRun")
      .def_readonly("label", &ScenarioRun::label)
      .def_readonly("seed", &ScenarioRun::seed)
      .def_readonly("ls", &ScenarioRun::ls)
      .def_readonly("ls_report", &ScenarioRun::ls_report)
      .def_readonly("fgo_report", &ScenarioRun::fgo_report)
      .def_property_readonly("fgo_positions", [](const ScenarioRun& r) { return positions_of(r.fgo.result.states); })
      .def_property_readonly("fgo_times", [](const ScenarioRun& r) { return epochs_of(r.fgo.result.states); })
      .def_property_readonly("accepted_costs", [](const ScenarioRun& r) { return r.fgo.result.accepted_costs(); })
      .def_property_readonly("converged", [](const ScenarioRun& r) { return r.fgo.result.converged; })
      .def_property_readonly("iterations", [](const ScenarioRun& r) { return r.fgo.result.iterations; });

  m.def(
      "run_scenario", [](const ScenarioConfig& cfg) { return run_scenario(cfg); }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>(), "Simulate, solve LS and FGO, and evaluate both against truth");

  py::class_<ScenarioSummary>(m, "ScenarioSummary")
      .def_readonly("label", &ScenarioSummary::label)
      .def_readonly("runs", &ScenarioSummary::runs)
      .def_readonly("fgo_better_3d", &ScenarioSummary::fgo_better_3d)
      .def_readonly("mean_improvement_3d", &ScenarioSummary::mean_improvement_3d)
      .def_readonly("mean_improvement_2d", &ScenarioSummary::mean_improvement_2d)
      .def_readonly("ls", &ScenarioSummary::ls)
      .def_readonly("fgo", &ScenarioSummary::fgo)
      .def_readonly("lm_violations", &ScenarioSummary::lm_violations);

  m.def(
      "monte_carlo",
      [](const std::vector<ScenarioConfig>& configs, int runs, std::uint64_t seed0) {
        return monte_carlo(configs, runs, seed0);
      },
      py::arg("configs"), py::arg("runs"), py::arg("seed0") = 1, py::call_guard<py::gil_scoped_release>());
  m.def(
      "table_rows", [](const std::vector<ScenarioSummary>& s) { return table_rows(s); }, py::arg("summaries"));
  m.def(
      "render_table", [](const std::vector<ErrorReport>& r) { return render_table(r); }, py::arg("reports"));
  m.def("improvement", &improvement, py::arg("fgo"), py::arg("ls"), "Percentage reduction of fgo relative to ls");
}
