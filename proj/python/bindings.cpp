#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tmcc/detection.hpp"
#include "tmcc/protocol.hpp"
#include "tmcc/session.hpp"
#include "tmcc/transcript_io.hpp"

namespace py = pybind11;
using namespace tmcc;

namespace {

std::vector<double> as_vector(const PhotonDistribution& dist) {
  return {dist.probabilities().begin(), dist.probabilities().end()};
}

TruncationPolicy policy_for(std::optional<std::size_t> n_max) {
  TruncationPolicy policy;
  policy.fixed_n_max = n_max;
  return policy;
}

py::dict report_dict(const DetectionReport& r) {
  py::list bins;
  for (const auto& b : r.bins) {
    py::dict bin;
    bin["low"] = b.low;
    bin["high"] = b.high;
    bin["observed"] = b.observed;
    bin["expected"] = b.expected;
    bins.append(bin);
  }
  py::dict d;
  d["statistic"] = r.statistic;
  d["degrees_of_freedom"] = r.degrees_of_freedom;
  d["p_value"] = r.p_value;
  d["significance"] = r.significance;
  d["passed"] = r.passed;
  d["bins"] = bins;
  return d;
}

py::object to_python(const Cell& cell) {
  return std::visit([](const auto& v) -> py::object {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
      return py::none();
    } else {
      return py::cast(v);
    }
  }, cell);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the tmcc package";

  py::register_exception<TruncationError>(m, "TruncationError", PyExc_ArithmeticError);
  py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_ValueError);

  m.def("tmcc_pmf", [](double lambda, std::optional<std::size_t> n_max) {
        return as_vector(tmcc_pmf(Amplitude(lambda), policy_for(n_max)));
      }, py::arg("lambda_"), py::arg("n_max") = py::none());
  m.def("poisson_pmf", [](double mean, std::optional<std::size_t> n_max) {
        return as_vector(poisson_pmf(mean, policy_for(n_max)));
      }, py::arg("mean"), py::arg("n_max") = py::none());
  m.def("mean_photons", [](double lambda) { return mean_photons(Amplitude(lambda)); });
  m.def("mean_square_photons", [](double lambda) { return mean_square_photons(Amplitude(lambda)); });
  m.def("variance", [](double lambda) { return variance(Amplitude(lambda)); });
  m.def("amplitude_for_mean", [](double mean) { return amplitude_for_mean(mean).magnitude(); });

  m.def("decision_threshold", [](double lambda) { return decision_threshold(Amplitude(lambda)); });
  m.def("prob_zero", [](double lambda) { return prob_zero(Amplitude(lambda)); });
  m.def("error_factor", [](double lambda) { return error_factor(Amplitude(lambda)); });
  m.def("error_probability", [](double lambda, double eps) { return error_probability(Amplitude(lambda), eps); });
  m.def("mismatch_rate", [](double lambda, double eps) { return mismatch_rate(Amplitude(lambda), eps); });

  m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("dof"));
  m.def("fit_test", [](const std::vector<std::uint32_t>& counts, double lambda, double significance) {
        return report_dict(fit_test(counts, tmcc_pmf(Amplitude(lambda)), significance));
      }, py::arg("counts"), py::arg("lambda_"), py::arg("significance") = kDefaultSignificance);

  m.def("run_session", [](double lambda, double epsilon, std::size_t key_bits, std::uint64_t seed,
                          const std::string& attack, double significance) {
        SessionConfig config;
        config.lambda = Amplitude(lambda);
        config.epsilon = epsilon;
        config.key_bits = key_bits;
        config.seed = seed;
        config.attack = AttackModel::parse(attack);
        config.detection_significance = significance;
        config.validate();
        SessionTranscript t;
        {
          py::gil_scoped_release release;
          t = run_session(config);
        }
        py::dict summary;
        for (const auto& [field, value] : transcript_summary(t)) summary[py::str(field)] = to_python(value);
        return summary;
      }, py::arg("lambda_") = 2.0, py::arg("epsilon") = 0.0, py::arg("key_bits") = 1024,
      py::arg("seed") = 1, py::arg("attack") = "none", py::arg("significance") = kDefaultSignificance);
}
