#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddfc/collection.hpp"
#include "ddfc/config.hpp"
#include "ddfc/dispatch.hpp"
#include "ddfc/estimation.hpp"
#include "ddfc/report.hpp"
#include "ddfc/scenario.hpp"
#include "ddfc/trajectory_kernel.hpp"

namespace py = pybind11;
using namespace ddfc;

namespace {

ScenarioConfig config_from(const py::object& source) {
    if (py::isinstance<py::str>(source)) {
        const std::string s = source.cast<std::string>();
        if (!s.empty() && s.front() == '{') return parse_config(nlohmann::json::parse(s));
        return load_config(s);
    }
    if (py::hasattr(source, "__fspath__")) return load_config(py::str(source.attr("__fspath__")()).cast<std::string>());
    const std::string text = py::module_::import("json").attr("dumps")(source).cast<std::string>();
    return parse_config(nlohmann::json::parse(text));
}

py::object to_python(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

TrajectoryDataset make_dataset(const Matrix& u, const Matrix& d, const Matrix& y, double period_s,
                               const std::string& label) {
    return TrajectoryDataset(Signal(u, period_s), Signal(d, period_s), Signal(y, period_s), label);
}

py::dict traces_dict(const Traces& tr) {
    py::dict out;
    for (std::size_t i = 0; i < tr.column_count(); ++i) out[py::str(tr.names()[i])] = tr.column(i);
    return out;
}

std::optional<Regularization> regularization(std::optional<Index> rank) {
    if (!rank) return std::nullopt;
    return Regularization{RankMode{*rank}};
}

}  // namespace

PYBIND11_MODULE(_ddfc, m) {
    m.doc() = "Data-driven load estimation and frequency control";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());
    py::register_exception<PoisonedStateError>(m, "PoisonedStateError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("version", &library_version);

    py::class_<TrajectoryDataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("u"), py::arg("d"), py::arg("y"), py::arg("period_s"),
             py::arg("label") = "")
        .def_property_readonly("u", [](const TrajectoryDataset& s) { return s.u.samples(); })
        .def_property_readonly("d", [](const TrajectoryDataset& s) { return s.d.samples(); })
        .def_property_readonly("y", [](const TrajectoryDataset& s) { return s.y.samples(); })
        .def_property_readonly("period_s", &TrajectoryDataset::period_s)
        .def_property_readonly("length", &TrajectoryDataset::length)
        .def_readonly("label", &TrajectoryDataset::label)
        .def("save", [](const TrajectoryDataset& s, const std::filesystem::path& p) { write_dataset(s, p); })
        .def_static("load", [](const std::filesystem::path& p) { return read_dataset(p); });

    m.def("hankel", &hankel_matrix, py::arg("samples"), py::arg("depth"),
          "Block Hankel matrix of a channels x length array.");

    m.def(
        "persistency_of_excitation",
        [](const Matrix& samples, Index order) {
            const PeReport r = is_persistently_exciting(Signal(samples, 1.0), order);
            py::dict out;
            out["exciting"] = r.exciting;
            out["rank"] = r.rank;
            out["required_rank"] = r.required_rank;
            out["reason"] = r.reason;
            return out;
        },
        py::arg("samples"), py::arg("order"));

    m.def(
        "pinv",
        [](const Matrix& a, std::optional<Index> rank) {
            const PinvResult r = rank ? truncated_pinv(a, RankMode{*rank}) : truncated_pinv(a);
            return py::make_tuple(r.pinv, r.retained_rank);
        },
        py::arg("matrix"), py::arg("rank") = py::none());

    m.def(
        "data_driven_response",
        [](const TrajectoryDataset& data, const Matrix& u_ini, const Matrix& d_ini, const Matrix& y_ini,
           const Matrix& u_future, const Matrix& d_future, std::optional<Index> order_bound, bool drop_d) {
            PredictionOptions o;
            o.t_ini = u_ini.cols();
            o.horizon = u_future.cols();
            o.order_bound = order_bound;
            o.drop_d_channel = drop_d;
            return data_driven_response(data, {u_ini, d_ini, y_ini}, u_future, d_future, o).y;
        },
        py::arg("data"), py::arg("u_ini"), py::arg("d_ini"), py::arg("y_ini"), py::arg("u_future"),
        py::arg("d_future"), py::arg("order_bound") = py::none(), py::arg("drop_d") = false);

    m.def(
        "predictor_matrix",
        [](const TrajectoryDataset& data, Index t_ini, bool drop_d, std::optional<Index> rank) {
            return predictor_matrix(data, t_ini, drop_d, regularization(rank)).matrix;
        },
        py::arg("data"), py::arg("t_ini"), py::arg("drop_d") = false, py::arg("rank") = py::none());

    m.def(
        "dc_gain_data",
        [](const TrajectoryDataset& data, Index depth, bool drop_d) { return dc_gain_data(data, depth, drop_d); },
        py::arg("data"), py::arg("depth"), py::arg("drop_d") = false);

    m.def(
        "dc_gain_model",
        [](const Matrix& A, const Matrix& Bd, const Matrix& C) {
            const Matrix B = Matrix::Zero(A.rows(), 1);
            const Matrix D = Matrix::Zero(C.rows(), 1);
            return dc_gain_model(LtiModel(A, B, Bd, C, D, 1.0)).G;
        },
        py::arg("A"), py::arg("Bd"), py::arg("C"));

    m.def(
        "simulate_lti",
        [](const Matrix& A, const Matrix& B, const Matrix& Bd, const Matrix& C, const Matrix& D, const Vector& x0,
           const Matrix& u, const Matrix& d) {
            return simulate_lti(LtiModel(A, B, Bd, C, D, 1.0), x0, Signal(u, 1.0), Signal(d, 1.0)).samples();
        },
        py::arg("A"), py::arg("B"), py::arg("Bd"), py::arg("C"), py::arg("D"), py::arg("x0"), py::arg("u"),
        py::arg("d"));

    m.def(
        "allocate",
        [](double total, const std::vector<py::dict>& fleet) {
            std::vector<IbrDevice> devices;
            for (const auto& f : fleet) {
                IbrDevice d;
                d.id = f.contains("id") ? f["id"].cast<std::string>() : "ibr" + std::to_string(devices.size());
                d.p_max_MW = f["p_max_MW"].cast<double>();
                d.rating_MVA = f.contains("rating_MVA") ? f["rating_MVA"].cast<double>() : d.p_max_MW;
                d.dispatch_MW = f.contains("dispatch_MW") ? f["dispatch_MW"].cast<double>() : 0.0;
                d.p_min_MW = f.contains("p_min_MW") ? f["p_min_MW"].cast<double>() : 0.0;
                d.participation = f.contains("participation") ? f["participation"].cast<double>() : 1.0;
                devices.push_back(d);
            }
            const Allocation a = allocate(total, devices);
            return py::make_tuple(a.changes_MW, a.remainder_MW);
        },
        py::arg("total_MW"), py::arg("fleet"));

    m.def(
        "load_config", [](const py::object& source) { return to_python(to_json(config_from(source))); },
        py::arg("config"), "Parse and validate a scenario; returns the fully resolved configuration.");

    m.def(
        "collect",
        [](const py::object& source) {
            CollectionResult col = run_collection(config_from(source), true);
            py::dict out;
            for (auto& a : col.areas) out[py::str(a.area_id)] = std::move(a.dataset);
            return out;
        },
        py::arg("config"));

    m.def(
        "simulate",
        [](const py::object& source, std::optional<std::map<std::string, TrajectoryDataset>> datasets,
           std::optional<std::filesystem::path> out_dir) {
            const ScenarioConfig cfg = config_from(source);
            DatasetMap data;
            if (datasets) {
                data = *datasets;
            } else {
                for (auto& a : run_collection(cfg, true).areas) data.emplace(a.area_id, std::move(a.dataset));
            }
            const RunResult r = run_scenario(cfg, data);
            if (out_dir) export_result(r, *out_dir, ExportFormats{});
            py::dict out;
            out["metrics"] = to_python(to_json(r.metrics));
            out["traces"] = traces_dict(r.traces);
            out["warnings"] = r.warnings;
            out["conservation_violations"] = r.conservation_violations;
            out["support_activated"] = r.support_activated;
            return out;
        },
        py::arg("config"), py::arg("datasets") = py::none(), py::arg("out_dir") = py::none());
}
