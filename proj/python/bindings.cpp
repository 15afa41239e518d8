#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcd/analysis.hpp"

namespace py = pybind11;
using namespace qcd;

namespace {

py::array_t<double> grid_points(const QuadratureGrid<double>& g) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(g.size()), g.dim});
  std::copy(g.coords.begin(), g.coords.end(), out.mutable_data());
  return out;
}

MixtureWeightLaw make_law(std::vector<double> pi, double sigma, const std::string& mode) {
  MixtureWeightLaw law;
  law.pi = std::move(pi);
  law.sigma = sigma;
  if (mode == "sigmoid") {
    law.mode = WeightMode::sigmoid;
  } else if (mode == "softmax") {
    law.mode = WeightMode::softmax;
  } else {
    throw UnsupportedError("mode must be 'sigmoid' or 'softmax'");
  }
  return law;
}

VectorDiffeomixture make_vdm(std::vector<double> pi, double sigma, int n, const std::string& scheme,
                             const std::vector<std::vector<double>>& locs,
                             std::vector<double> scales) {
  if (locs.empty()) throw DomainError("need component locations");
  const auto d = static_cast<long>(locs.front().size());
  if (scales.empty()) scales.assign(locs.size(), 1.0);
  if (scales.size() != locs.size()) throw DomainError("one scale per component");
  std::vector<LocationScale> comps;
  for (std::size_t m = 0; m < locs.size(); ++m) {
    if (static_cast<long>(locs[m].size()) != d) throw DomainError("inconsistent dimensions");
    comps.push_back({Eigen::Map<const Eigen::VectorXd>(locs[m].data(), d),
                     scales[m] * Eigen::MatrixXd::Identity(d, d)});
  }
  const auto law = make_law(std::move(pi), sigma, pi.size() == 1 ? "sigmoid" : "softmax");
  return VectorDiffeomixture(mixture_weight_grid(law, n, parse_scheme(scheme)), std::move(comps),
                             standard_normal_base(static_cast<int>(d)));
}

}  // namespace

PYBIND11_MODULE(_qcd, m) {
  m.doc() = "Quadrature-compound distributions";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);

  m.def("std_normal_cdf", py::vectorize([](double x) { return std_normal_cdf(x); }));
  m.def("std_normal_quantile", py::vectorize([](double p) { return std_normal_quantile(p); }));

  m.def(
      "hermite_rule",
      [](int n) {
        const auto r = hermite_rule(n);
        return py::make_tuple(py::array_t<double>(r.nodes.size(), r.nodes.data()),
                              py::array_t<double>(r.weights.size(), r.weights.data()));
      },
      py::arg("n"), "Probabilists' Gauss-Hermite nodes and weights (weights sum to 1).");

  m.def(
      "mixture_weight_grid",
      [](std::vector<double> pi, double sigma, int n, const std::string& scheme,
         const std::string& mode) {
        const auto g = mixture_weight_grid(make_law(std::move(pi), sigma, mode), n, parse_scheme(scheme));
        return py::make_tuple(grid_points(g),
                              py::array_t<double>(g.weights.size(), g.weights.data()),
                              g.reparameterizable);
      },
      py::arg("pi"), py::arg("sigma"), py::arg("n"), py::arg("scheme") = "quant-midpoint",
      py::arg("mode") = "sigmoid",
      "Grid over the mixture weights: (points, weights, reparameterizable).");

  m.def(
      "prob_component_larger",
      [](std::vector<double> pi, int i, int j) {
        return prob_component_larger(make_law(std::move(pi), 1.0, "softmax"), i, j);
      },
      py::arg("pi"), py::arg("i"), py::arg("j"));

  py::class_<PoissonLogNormalQC<double>>(m, "PoissonLogNormal")
      .def(py::init<double, double, int>(), py::arg("mu"), py::arg("sigma"), py::arg("n"))
      .def("pmf",
           [](const PoissonLogNormalQC<double>& d, py::array_t<long> x) {
             return py::vectorize([&d](long v) { return d.pmf(v); })(std::move(x));
           })
      .def("log_pmf", &PoissonLogNormalQC<double>::log_pmf)
      .def("total_mass", &PoissonLogNormalQC<double>::total_mass, py::arg("tail") = 1e-12)
      .def("grad",
           [](const PoissonLogNormalQC<double>& d, long x) {
             return plqc_grad(d.mu(), d.sigma(), d.n(), x);
           })
      .def_property_readonly("rates",
                             [](const PoissonLogNormalQC<double>& d) { return d.grid().coords; })
      .def("sample", [](const PoissonLogNormalQC<double>& d, long k, std::uint64_t seed) {
        Rng rng = make_stream(seed, "py-pln-sample");
        const auto qc = d.compound();
        py::array_t<long> out(k);
        auto* p = out.mutable_data();
        for (long i = 0; i < k; ++i) p[i] = qc_sample(qc, rng);
        return out;
      });

  m.def(
      "vdm_density",
      [](std::vector<double> pi, double sigma, int n, const std::string& scheme,
         const std::vector<std::vector<double>>& locs, std::vector<double> scales,
         py::array_t<double, py::array::c_style | py::array::forcecast> x) {
        const auto v = make_vdm(std::move(pi), sigma, n, scheme, locs, std::move(scales));
        const auto buf = x.request();
        const long d = v.dim();
        const py::ssize_t rows = d == 1 ? buf.size : (buf.ndim == 2 ? buf.shape[0] : -1);
        if (rows < 0 || (d > 1 && buf.shape[1] != d)) throw DomainError("x must have shape (k, d)");
        py::array_t<double> out(rows);
        const auto* in = static_cast<const double*>(buf.ptr);
        for (py::ssize_t i = 0; i < rows; ++i) {
          out.mutable_data()[i] = v.density(Eigen::Map<const Eigen::VectorXd>(in + i * d, d));
        }
        return out;
      },
      py::arg("pi"), py::arg("sigma"), py::arg("n"), py::arg("scheme"), py::arg("locs"),
      py::arg("scales") = std::vector<double>{}, py::arg("x"));

  m.def(
      "vdm_sample",
      [](std::vector<double> pi, double sigma, int n, const std::string& scheme,
         const std::vector<std::vector<double>>& locs, std::vector<double> scales, long k,
         std::uint64_t seed) {
        const auto v = make_vdm(std::move(pi), sigma, n, scheme, locs, std::move(scales));
        Rng rng = make_stream(seed, "vdm-sample");
        py::array_t<double> out(std::vector<py::ssize_t>{k, v.dim()});
        auto* p = out.mutable_data();
        for (long i = 0; i < k; ++i) {
          const auto x = v.sample(rng);
          std::copy(x.data(), x.data() + v.dim(), p + i * v.dim());
        }
        return out;
      },
      py::arg("pi"), py::arg("sigma"), py::arg("n"), py::arg("scheme"), py::arg("locs"),
      py::arg("scales") = std::vector<double>{}, py::arg("k") = 1000, py::arg("seed") = 0);

  m.def(
      "run_sweep",
      [](std::optional<std::vector<double>> pis, std::optional<std::vector<double>> sigmas,
         std::optional<std::vector<int>> ns, std::optional<std::vector<double>> mus,
         std::optional<std::vector<std::string>> schemes) {
        SweepConfig cfg = SweepConfig::standard();
        if (pis) cfg.pis = *pis;
        if (sigmas) cfg.sigmas = *sigmas;
        if (ns) cfg.ns = *ns;
        if (mus) cfg.mus = *mus;
        if (schemes) {
          cfg.schemes.clear();
          for (const auto& s : *schemes) cfg.schemes.push_back(parse_scheme(s));
        }
        const auto res = run_sweep(cfg, false);
        py::list rows;
        for (const auto& r : res.rows) {
          py::dict d;
          d["pi"] = r.pi;
          d["sigma"] = r.sigma;
          d["n"] = r.n;
          d["mu"] = r.mu;
          d["scheme"] = std::string(scheme_name(r.scheme));
          d["kl_q_p"] = r.kl_q_p;
          d["kl_p_q"] = r.kl_p_q;
          d["tv"] = r.tv;
          d["error"] = r.error ? py::cast(*r.error) : py::none();
          rows.append(d);
        }
        return rows;
      },
      py::arg("pis") = py::none(), py::arg("sigmas") = py::none(), py::arg("ns") = py::none(),
      py::arg("mus") = py::none(), py::arg("schemes") = py::none(),
      "Scheme sweep rows; unspecified sets default to the standard comparison.");

  m.def(
      "gradcheck",
      [](const std::string& name, long k, std::uint64_t seed, std::optional<double> lambda) {
        const auto gc = gradcheck_case(name, k, seed, lambda);
        py::dict d;
        d["case"] = gc.name;
        d["lambda"] = gc.lambda;
        d["value_mean"] = gc.estimate.value_mean;
        d["grad_mean"] = gc.estimate.grad_mean;
        d["true_grad"] = gc.true_grad;
        d["stderr_grad"] = gc.estimate.stderr_grad;
        d["pass"] = gc.pass;
        d["known_biased"] = gc.known_biased;
        return d;
      },
      py::arg("case"), py::arg("k") = 100000, py::arg("seed") = 0, py::arg("lam") = py::none());
}
