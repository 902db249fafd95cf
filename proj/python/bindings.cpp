#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "intfsim/experiment.hpp"
#include "intfsim/scenario_io.hpp"

namespace py = pybind11;
using namespace intfsim;

namespace {

void bind_profile(py::module_& m) {
  py::class_<Resources>(m, "Resources")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("l2"), py::arg("dram"), py::arg("sm"))
      .def_readwrite("l2", &Resources::l2)
      .def_readwrite("dram", &Resources::dram)
      .def_readwrite("sm", &Resources::sm)
      .def(py::self + py::self)
      .def(py::self == py::self)
      .def("__repr__", [](const Resources& r) {
        return "Resources(l2=" + std::to_string(r.l2) + ", dram=" + std::to_string(r.dram) +
               ", sm=" + std::to_string(r.sm) + ")";
      });

  py::class_<ModelProfile>(m, "ModelProfile")
      .def(py::init<>())
      .def_readwrite("model_id", &ModelProfile::model_id)
      .def_readwrite("batch_size", &ModelProfile::batch_size)
      .def_readwrite("solo_duration_ms", &ModelProfile::solo_duration_ms)
      .def_readwrite("throughput", &ModelProfile::throughput);

  py::class_<ProfileTable>(m, "ProfileTable")
      .def(py::init<int>(), py::arg("max_batch_size") = 8)
      .def("add", &ProfileTable::add)
      .def("validate", &ProfileTable::validate)
      .def("at", &ProfileTable::at, py::return_value_policy::copy)
      .def("has_model", &ProfileTable::has_model)
      .def("models", &ProfileTable::models)
      .def("entries", &ProfileTable::entries)
      .def_property_readonly("max_batch_size", &ProfileTable::max_batch_size)
      .def("__len__", &ProfileTable::size);

  m.def("load_profiles", &load_profiles, py::arg("path"), py::arg("max_batch_size") = 8);
  m.def("save_profiles", &save_profiles, py::arg("table"), py::arg("path"));
  m.def(
      "gen_synthetic_profiles",
      [](std::uint64_t seed) { return gen_synthetic_profiles(default_synthesis_spec(), seed); },
      py::arg("seed") = kDefaultProfileSeed,
      "Synthetic profile table for the six default archetypes.");
  m.def("throughput_curve", &throughput_curve, py::arg("table"), py::arg("model_id"));
}

void bind_colocation(py::module_& m) {
  py::class_<ColocationMode>(m, "ColocationMode")
      .def_static("static_snapshot", &ColocationMode::static_snapshot)
      .def_static("ewma", &ColocationMode::ewma, py::arg("alpha"))
      .def_property_readonly("name", &ColocationMode::name)
      .def_readonly("alpha", &ColocationMode::alpha);

  py::class_<CoLocationEstimate>(m, "CoLocationEstimate")
      .def_readonly("batch_id", &CoLocationEstimate::batch_id)
      .def_readonly("r_hat", &CoLocationEstimate::r_hat)
      .def_readonly("n_observations", &CoLocationEstimate::n_observations);

  m.def("init_estimate", &init_estimate, py::arg("batch_id"), py::arg("mode"), py::arg("colo_now"));
  m.def(
      "observe",
      [](CoLocationEstimate est, const Resources& x) {
        observe(est, x);
        return est;
      },
      py::arg("estimate"), py::arg("x_t"), "Returns the updated estimate.");
  m.def("finalize_features", &finalize_features, py::arg("own"), py::arg("estimate"));

  py::class_<Sample>(m, "Sample")
      .def(py::init<>())
      .def(py::init([](FeatureVector x, double y) {
             Sample s;
             s.x = x;
             s.y = y;
             return s;
           }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Sample::x)
      .def_readwrite("y", &Sample::y)
      .def_readwrite("batch_id", &Sample::batch_id)
      .def_readwrite("scenario", &Sample::scenario);
}

void bind_sim(py::module_& m) {
  py::class_<InterferenceOracle>(m, "InterferenceOracle")
      .def(py::init<>())
      .def_readwrite("beta_l2", &InterferenceOracle::beta_l2)
      .def_readwrite("beta_dram", &InterferenceOracle::beta_dram)
      .def_readwrite("beta_sm", &InterferenceOracle::beta_sm)
      .def_readwrite("noise_sigma", &InterferenceOracle::noise_sigma)
      .def_readwrite("seed", &InterferenceOracle::seed);
  m.def("oracle_slowdown", &oracle_slowdown, py::arg("own"), py::arg("colo_sum"),
        py::arg("oracle"), py::arg("noise_draw") = 1.0);

  py::class_<DeployedModel>(m, "DeployedModel")
      .def(py::init<>())
      .def(py::init([](std::string id, double rate) {
             DeployedModel d;
             d.model_id = std::move(id);
             d.arrival_rate_rps = rate;
             return d;
           }),
           py::arg("model_id"), py::arg("arrival_rate_rps"))
      .def_readwrite("model_id", &DeployedModel::model_id)
      .def_readwrite("arrival_rate_rps", &DeployedModel::arrival_rate_rps)
      .def_readwrite("slo_ms", &DeployedModel::slo_ms)
      .def_readwrite("batching_window_ms", &DeployedModel::batching_window_ms)
      .def_readwrite("profile", &DeployedModel::profile);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("name", &ScenarioSpec::name)
      .def_readwrite("deployed", &ScenarioSpec::deployed)
      .def_readwrite("duration_s", &ScenarioSpec::duration_s)
      .def_readwrite("batching_window_ms", &ScenarioSpec::batching_window_ms)
      .def_readwrite("max_batch_size", &ScenarioSpec::max_batch_size)
      .def_readwrite("concurrency_cap", &ScenarioSpec::concurrency_cap)
      .def_readwrite("seed", &ScenarioSpec::seed)
      .def_readwrite("colocation_mode", &ScenarioSpec::colocation_mode)
      .def_readwrite("oracle", &ScenarioSpec::oracle)
      .def("to_json", &scenario_to_json);

  m.def("parse_scenario", &parse_scenario, py::arg("json_text"), py::arg("table"));
  m.def("load_scenario", &load_scenario, py::arg("path"), py::arg("table"));
  m.def("resolve_defaults", &resolve_defaults, py::arg("spec"), py::arg("table"));
  m.def("apply_utilization", [](ScenarioSpec spec, const ProfileTable& t, double rho) {
    apply_utilization(spec, t, rho);
    return spec;
  });

  py::class_<RequestEvent>(m, "RequestEvent")
      .def_readonly("request_id", &RequestEvent::request_id)
      .def_readonly("model_id", &RequestEvent::model_id)
      .def_readonly("arrival_time_ms", &RequestEvent::arrival_time_ms)
      .def_readonly("deadline_ms", &RequestEvent::deadline_ms);
  m.def("generate_arrivals", &generate_arrivals, py::arg("spec"));

  py::class_<DriftScenarios>(m, "DriftScenarios")
      .def_readonly("training", &DriftScenarios::training)
      .def_readonly("test1", &DriftScenarios::test1)
      .def_readonly("test2", &DriftScenarios::test2)
      .def_readonly("test3", &DriftScenarios::test3);
  m.def("drift_scenarios", &drift_scenarios, py::arg("base"));

  py::class_<Segment>(m, "Segment")
      .def_readonly("t_begin_ms", &Segment::t_begin_ms)
      .def_readonly("t_end_ms", &Segment::t_end_ms)
      .def_readonly("slowdown", &Segment::slowdown)
      .def_readonly("work_ms", &Segment::work_ms)
      .def_readonly("colo", &Segment::colo)
      .def_readonly("n_peers", &Segment::n_peers);

  py::class_<BatchOutcome>(m, "BatchOutcome")
      .def_readonly("batch_id", &BatchOutcome::batch_id)
      .def_readonly("model_id", &BatchOutcome::model_id)
      .def_readonly("batch_size", &BatchOutcome::batch_size)
      .def_readonly("start_ms", &BatchOutcome::start_ms)
      .def_readonly("completion_time_ms", &BatchOutcome::completion_time_ms)
      .def_readonly("profiled_ms", &BatchOutcome::profiled_ms)
      .def_readonly("measured_duration_ms", &BatchOutcome::measured_duration_ms)
      .def_readonly("interference_ratio", &BatchOutcome::interference_ratio)
      .def_readonly("segments", &BatchOutcome::segments);

  py::class_<RequestRecord>(m, "RequestRecord")
      .def_readonly("request_id", &RequestRecord::request_id)
      .def_readonly("model_id", &RequestRecord::model_id)
      .def_readonly("batch_id", &RequestRecord::batch_id)
      .def_readonly("arrival_ms", &RequestRecord::arrival_ms)
      .def_readonly("dispatch_ms", &RequestRecord::dispatch_ms)
      .def_readonly("completion_ms", &RequestRecord::completion_ms)
      .def_readonly("latency_ms", &RequestRecord::latency_ms)
      .def_readonly("queueing_ms", &RequestRecord::queueing_ms)
      .def_readonly("slo_met", &RequestRecord::slo_met);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("outcomes", &RunResult::outcomes)
      .def_readonly("requests", &RunResult::requests)
      .def_readonly("samples", &RunResult::samples)
      .def_readonly("n_arrivals", &RunResult::n_arrivals)
      .def_readonly("peak_running", &RunResult::peak_running);

  m.def("run_scenario", &run_scenario, py::arg("spec"), py::arg("table"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "samples_for_mode",
      [](const RunResult& r, const ColocationMode& mode, const std::string& tag) {
        return samples_for_mode(r.outcomes, mode, tag);
      },
      py::arg("result"), py::arg("mode"), py::arg("scenario") = "");
}

void bind_predict(py::module_& m) {
  py::class_<LinearModel>(m, "LinearModel")
      .def(py::init<>())
      .def(py::init([](FeatureVector w, double b) { return LinearModel{w, b}; }), py::arg("w"),
           py::arg("b"))
      .def_readwrite("w", &LinearModel::w)
      .def_readwrite("b", &LinearModel::b);
  m.def("predict", &predict, py::arg("model"), py::arg("x"));
  m.def(
      "fit_ols", [](const std::vector<Sample>& s) { return fit_ols(s); }, py::arg("samples"));

  py::class_<SgdState>(m, "SgdState")
      .def(py::init([](LinearModel model, double eta) { return SgdState{model, eta}; }),
           py::arg("model"), py::arg("eta") = 0.01)
      .def_readwrite("model", &SgdState::model)
      .def_readwrite("eta", &SgdState::eta);
  m.def("sgd_update", &sgd_update, py::arg("state"), py::arg("sample"));

  py::class_<RlsState>(m, "RlsState")
      .def(py::init<>())
      .def_readwrite("model", &RlsState::model)
      .def_readwrite("P", &RlsState::P)
      .def_readwrite("lambda_", &RlsState::lambda)
      .def_readonly("resets", &RlsState::resets);
  m.def("rls_update", &rls_update, py::arg("state"), py::arg("sample"));
  m.def(
      "rls_warm_start",
      [](const std::vector<Sample>& s, double lambda) {
        return rls_warm_start(fit_ols_detailed(s), lambda);
      },
      py::arg("samples"), py::arg("lambda_") = 0.99);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("mse", &EvalReport::mse)
      .def_readonly("rel_p25", &EvalReport::rel_p25)
      .def_readonly("rel_p50", &EvalReport::rel_p50)
      .def_readonly("rel_p75", &EvalReport::rel_p75)
      .def_readonly("rel_p95", &EvalReport::rel_p95)
      .def_readonly("n_samples", &EvalReport::n_samples);

  // Python callers get the report plus the predictor state after the pass.
  m.def(
      "evaluate",
      [](Predictor p, const std::vector<Sample>& s, bool online) {
        auto r = evaluate(p, s, online);
        return py::make_tuple(r, p);
      },
      py::arg("predictor"), py::arg("samples"), py::arg("online") = false);

  m.def("percentile", [](const std::vector<double>& v, double p) { return percentile(v, p); },
        py::arg("values"), py::arg("p"));

  py::class_<SloSummary>(m, "SloSummary")
      .def_readonly("model_id", &SloSummary::model_id)
      .def_readonly("n_requests", &SloSummary::n_requests)
      .def_readonly("satisfaction", &SloSummary::satisfaction)
      .def_readonly("p50_ms", &SloSummary::p50_ms)
      .def_readonly("p95_ms", &SloSummary::p95_ms)
      .def_readonly("p99_ms", &SloSummary::p99_ms);
  m.def(
      "slo_report",
      [](const std::vector<RequestRecord>& r, double warmup) {
        return slo_report(r, {warmup});
      },
      py::arg("records"), py::arg("warmup_fraction") = 0.0);
}

void bind_experiments(py::module_& m) {
  m.def("high_churn_suite", &high_churn_suite, py::arg("table"), py::arg("seed"));
  m.def("drift_base_scenario", &drift_base_scenario, py::arg("table"), py::arg("seed"));
  m.def("calibration_scenario", &calibration_scenario, py::arg("table"), py::arg("seed"));
  m.def("concurrency_stress_scenario", &concurrency_stress_scenario, py::arg("table"),
        py::arg("n_tasks"), py::arg("cap"), py::arg("utilization"), py::arg("seed"));

  py::class_<EwmaModeRow>(m, "EwmaModeRow")
      .def_readonly("mode", &EwmaModeRow::mode)
      .def_readonly("report", &EwmaModeRow::report);
  py::class_<EwmaExperimentResult>(m, "EwmaExperimentResult")
      .def_readonly("rows", &EwmaExperimentResult::rows)
      .def_readonly("n_train", &EwmaExperimentResult::n_train)
      .def_readonly("n_test", &EwmaExperimentResult::n_test);
  m.def(
      "run_ewma_experiment",
      [](const std::vector<ScenarioSpec>& suite, const ProfileTable& table, double split) {
        const auto modes = reproduction_modes();
        return run_ewma_experiment(suite, table, modes, {split, false, 0});
      },
      py::arg("suite"), py::arg("table"), py::arg("split") = 0.75,
      py::call_guard<py::gil_scoped_release>());

  py::class_<DriftRow>(m, "DriftRow")
      .def_readonly("dataset", &DriftRow::dataset)
      .def_readonly("offline", &DriftRow::offline)
      .def_readonly("sgd", &DriftRow::sgd)
      .def_readonly("rls", &DriftRow::rls)
      .def_readonly("n_samples", &DriftRow::n_samples);
  m.def(
      "run_drift_experiment",
      [](const ScenarioSpec& base, const ProfileTable& table, double eta, double lambda) {
        return run_drift_experiment(base, table, {eta, lambda, 100.0}).rows;
      },
      py::arg("base"), py::arg("table"), py::arg("eta") = 0.01, py::arg("lambda_") = 0.99,
      py::call_guard<py::gil_scoped_release>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inference-serving interference simulator and online interference predictors";
  py::register_exception<Error>(m, "IntfsimError", PyExc_ValueError);
  bind_profile(m);
  bind_colocation(m);
  bind_sim(m);
  bind_predict(m);
  bind_experiments(m);
  m.attr("__version__") = INTFSIM_VERSION;
}
