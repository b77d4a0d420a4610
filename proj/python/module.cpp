#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lowswitch/criteria.hpp"
#include "lowswitch/envs.hpp"
#include "lowswitch/hashing.hpp"
#include "lowswitch/linalg.hpp"
#include "lowswitch/metrics.hpp"
#include "lowswitch/runner.hpp"

namespace py = pybind11;
using namespace lowswitch;

namespace {

py::dict run_dict(const core::RunRecord& record, long total_steps) {
    py::dict d;
    d["switching_cost"] = record.switching_cost;
    d["final_version"] = record.final_version;
    d["final_reward"] = metrics::final_reward(record, total_steps);
    d["episode_returns"] = record.episode_returns;
    d["episode_end_steps"] = record.episode_end_steps;
    d["switch_steps"] = record.switch_steps;
    return d;
}

}  // namespace

PYBIND11_MODULE(_lowswitch, m) {
    m.doc() = "low-switching-cost RL core";

    m.def(
        "rsi",
        [](double baseline_reward, double baseline_cost, double reward, double cost,
           double sigma, bool log_variant) {
            metrics::RsiInput input{baseline_reward, baseline_cost, reward, cost, sigma};
            return metrics::rsi(input, log_variant);
        },
        py::arg("baseline_reward"), py::arg("baseline_cost"), py::arg("reward"),
        py::arg("cost"), py::arg("sigma") = 0.2, py::arg("log_variant") = true);

    m.def(
        "welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = metrics::welch_t_test(a, b);
            return py::make_tuple(r.t, r.df, r.p);
        },
        py::arg("a"), py::arg("b"), "returns (t, df, p)");

    m.def("student_t_two_sided_p", &metrics::student_t_two_sided_p, py::arg("t"),
          py::arg("df"));

    m.def(
        "theorem1_check",
        [](int k, double alpha) {
            const auto r = criteria::theorem1_check(k, alpha);
            return py::make_tuple(r.similarity, r.prediction_error);
        },
        py::arg("k"), py::arg("alpha"), "returns (similarity, prediction_error)");

    m.def("smallest_eigenvalue", &linalg::smallest_eigenvalue, py::arg("matrix"),
          py::arg("n"), "smallest eigenvalue of a row-major symmetric n x n matrix");

    m.def("feature_similarity",
          [](const std::vector<std::vector<double>>& dep,
             const std::vector<std::vector<double>>& onl) {
              return criteria::feature_similarity(dep, onl).mean;
          });

    m.def(
        "gaussian_kl",
        [](const std::vector<double>& mean_p, const std::vector<double>& log_std_p,
           const std::vector<double>& mean_q, const std::vector<double>& log_std_q) {
            return criteria::gaussian_kl(mean_p, log_std_p, mean_q, log_std_q);
        },
        py::arg("mean_p"), py::arg("log_std_p"), py::arg("mean_q"), py::arg("log_std_q"));

    m.def("environment_ids", [] { return envs::environment_ids(); });
    m.def("agent_ids", [] { return agents::agent_ids(); });
    m.def("criterion_ids", [] { return criteria::criterion_ids(); });

    py::class_<hashing::RandomProjection>(m, "RandomProjection")
        .def(py::init<int, int, std::uint64_t>(), py::arg("proj_dim"),
             py::arg("input_dim"), py::arg("seed"))
        .def("project",
             [](const hashing::RandomProjection& p, const std::vector<double>& state) {
                 return p.project(state);
             })
        .def("signs", [](const hashing::RandomProjection& p,
                         const std::vector<double>& state) { return p.signs(state); });

    py::class_<hashing::HashedCounter>(m, "HashedCounter")
        .def(py::init([](int proj_dim, int input_dim, std::uint64_t seed) {
                 return hashing::HashedCounter(
                     hashing::RandomProjection(proj_dim, input_dim, seed));
             }),
             py::arg("proj_dim"), py::arg("input_dim"), py::arg("seed"))
        .def("observe",
             [](hashing::HashedCounter& c, const std::vector<double>& state) {
                 return c.observe(state);
             })
        .def("count",
             [](const hashing::HashedCounter& c, const std::vector<double>& state) {
                 return c.count(state);
             })
        .def("total", &hashing::HashedCounter::total);

    m.def(
        "run",
        [](const std::string& env_id, const std::string& agent_id,
           const std::string& criterion, long steps, long warmup, std::uint64_t seed,
           long update_period, std::size_t batch_size) {
            core::RunConfig config;
            config.env_id = env_id;
            config.agent_id = agent_id;
            config.criterion = cli::parse_criterion(criterion);
            config.total_steps = steps;
            config.warmup_steps = warmup;
            config.seed = seed;
            config.update_period = update_period;
            config.batch_size = batch_size;
            return run_dict(cli::run_cell(config), steps);
        },
        py::arg("env_id"), py::arg("agent_id"), py::arg("criterion") = "none",
        py::arg("steps") = 5000, py::arg("warmup") = 1000, py::arg("seed") = 0,
        py::arg("update_period") = 1, py::arg("batch_size") = 32,
        "train one (environment, agent, criterion) cell; returns a summary dict");
}
