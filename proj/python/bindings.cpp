#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ppf/dataset.hpp"
#include "ppf/incidence.hpp"
#include "ppf/linear_model.hpp"
#include "ppf/loss.hpp"
#include "ppf/matpower.hpp"
#include "ppf/metrics.hpp"
#include "ppf/mlp.hpp"
#include "ppf/pf.hpp"
#include "ppf/pipeline.hpp"
#include "ppf/ybus.hpp"

namespace py = pybind11;
using namespace ppf;

PYBIND11_MODULE(_ppf_lab, m) {
    m.doc() = "Data-driven probabilistic power flow: solver, samplers, "
              "estimators and metrics";

    py::register_exception<Error>(m, "PpfError");

    py::class_<NetworkCase>(m, "NetworkCase")
        .def_property_readonly("n_buses", &NetworkCase::n_buses)
        .def_property_readonly("n_lines", &NetworkCase::n_lines)
        .def_property_readonly("base_mva", &NetworkCase::base_mva)
        .def_property_readonly("slack", &NetworkCase::slack)
        .def_property_readonly("pv_buses", &NetworkCase::pv_buses)
        .def_property_readonly("pq_buses", &NetworkCase::pq_buses)
        .def("bus_index", &NetworkCase::bus_index)
        .def("__repr__", [](const NetworkCase& c) {
            return "<NetworkCase buses=" + std::to_string(c.n_buses()) +
                   " lines=" + std::to_string(c.n_lines()) + ">";
        });

    py::class_<AdmittanceMatrix>(m, "AdmittanceMatrix")
        .def_readonly("g", &AdmittanceMatrix::g)
        .def_readonly("b", &AdmittanceMatrix::b);

    py::class_<PfState>(m, "PfState")
        .def_readonly("v_mag", &PfState::v_mag)
        .def_readonly("v_ang", &PfState::v_ang);

    py::class_<PfSolution>(m, "PfSolution")
        .def_readonly("state", &PfSolution::state)
        .def_readonly("iterations", &PfSolution::iterations)
        .def_readonly("max_mismatch", &PfSolution::max_mismatch)
        .def_readonly("converged", &PfSolution::converged);

    py::class_<BranchFlows>(m, "BranchFlows")
        .def_readonly("p_from", &BranchFlows::p_from)
        .def_readonly("q_from", &BranchFlows::q_from)
        .def_readonly("p_to", &BranchFlows::p_to)
        .def_readonly("q_to", &BranchFlows::q_to);

    m.def("parse_case", &parse_case, py::arg("text"));
    m.def("load_case", &load_case, py::arg("path"));
    m.def("build_ybus", &build_ybus);
    m.def("flat_start", &flat_start);
    m.def("case_injections", &case_injections);
    m.def(
        "mismatch",
        [](const NetworkCase& c, const AdmittanceMatrix& y, const PfState& s,
           const Vec& x) { return mismatch(c, y, s, x); },
        py::arg("case"), py::arg("ybus"), py::arg("state"), py::arg("x"));
    m.def(
        "solve_pf",
        [](const NetworkCase& c, const AdmittanceMatrix& y, const Vec& x, double tol,
           int max_iter) {
            return solve_pf(c, y, x, PfOptions{tol, max_iter});
        },
        py::arg("case"), py::arg("ybus"), py::arg("x"), py::arg("tol") = 1e-8,
        py::arg("max_iter") = 20);
    m.def("branch_flows", &branch_flows, py::arg("case"), py::arg("state"));
    m.def("build_reduced_incidence", &build_reduced_incidence);

    py::class_<LinearModel>(m, "LinearModel")
        .def_readonly("h", &LinearModel::h)
        .def("predict", &LinearModel::predict);
    m.def("fit_ols", &fit_ols, py::arg("inputs"), py::arg("targets"));

    m.def(
        "multitask_loss",
        [](const Mat& pred, const Mat& truth, const Mat& a, double alpha) {
            LossGrad lg = multitask_loss(pred, truth, a, alpha);
            return py::make_tuple(lg.value, lg.grad);
        },
        py::arg("pred"), py::arg("truth"), py::arg("incidence"), py::arg("alpha"));

    m.def("average_rmse", &average_rmse);
    m.def("wasserstein1", &wasserstein1);
    m.def("moment_maes", &moment_maes);
    m.def("awd", [](const Mat& est, const Mat& truth) {
        AwdResult r = awd(est, truth);
        return py::make_tuple(r.average, r.per_response);
    });

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("inputs", &Dataset::inputs)
        .def_readonly("angles", &Dataset::angles)
        .def_readonly("magnitudes", &Dataset::magnitudes)
        .def_readonly("rejected_count", &Dataset::rejected_count)
        .def_property_readonly("split", [](const Dataset& d) {
            return py::make_tuple(d.split[0], d.split[1], d.split[2]);
        });
    m.def(
        "build_dataset",
        [](const NetworkCase& c, std::vector<int> pv_buses, double load_std_fraction,
           double corr_p, double corr_q, std::uint64_t seed, int sample_count,
           std::vector<int> split, int threads) {
            SamplingConfig cfg;
            cfg.pv_buses = std::move(pv_buses);
            cfg.load_std_fraction = load_std_fraction;
            cfg.corr_p = corr_p;
            cfg.corr_q = corr_q;
            cfg.seed = seed;
            cfg.sample_count = sample_count;
            if (split.size() != 3) throw ConfigError("split must have three sizes");
            cfg.split = {split[0], split[1], split[2]};
            return build_dataset(c, cfg, PfOptions{}, threads);
        },
        py::arg("case"), py::arg("pv_buses") = std::vector<int>{},
        py::arg("load_std_fraction") = 0.01, py::arg("corr_p") = 0.2,
        py::arg("corr_q") = 0.8, py::arg("seed") = 0, py::arg("sample_count") = 0,
        py::arg("split") = std::vector<int>{0, 0, 0}, py::arg("threads") = 1);

    py::class_<BusSplit>(m, "BusSplit")
        .def_readonly("small_std", &BusSplit::small_std)
        .def_readonly("big_std", &BusSplit::big_std)
        .def_readonly("gamma", &BusSplit::gamma)
        .def_readonly("per_bus_std", &BusSplit::per_bus_std);
    m.def("split_buses", &split_buses, py::arg("train_magnitudes"), py::arg("gamma"));
}
