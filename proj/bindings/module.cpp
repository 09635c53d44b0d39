#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "latentstab/anisotropy.hpp"
#include "latentstab/assignment.hpp"
#include "latentstab/autoencoder.hpp"
#include "latentstab/dataset.hpp"
#include "latentstab/hull.hpp"
#include "latentstab/report.hpp"
#include "latentstab/stress.hpp"

namespace py = pybind11;
using namespace latentstab;

PYBIND11_MODULE(_latentstab, m) {
  m.doc() = "Stability metrics for ensembles of 2-D latent feature spaces";

  // dataspace
  py::class_<StandardizationParams>(m, "StandardizationParams")
      .def_readonly("means", &StandardizationParams::means)
      .def_readonly("stddevs", &StandardizationParams::stddevs)
      .def("apply", &StandardizationParams::apply)
      .def("invert", &StandardizationParams::invert);
  m.def("standardize", &standardize_matrix, py::arg("raw"));
  m.def(
      "generate_synthetic",
      [](int n, const Eigen::MatrixXd& corr, int classes, std::uint64_t seed) {
        SyntheticSpec spec;
        spec.sample_size = n;
        spec.dim = static_cast<int>(corr.rows());
        spec.target_correlation = corr;
        spec.class_count = classes;
        spec.seed = seed;
        const TabularDataset ds = generate_synthetic(spec);
        return py::make_tuple(ds.values,
                              ds.labels ? py::cast(*ds.labels) : py::none());
      },
      py::arg("n"), py::arg("target_correlation"), py::arg("classes") = 4,
      py::arg("seed") = 0);

  // hullmetrics
  py::class_<AnchorSet>(m, "AnchorSet")
      .def_readonly("indices", &AnchorSet::indices)
      .def_readonly("vertices", &AnchorSet::vertices)
      .def_readonly("degenerate", &AnchorSet::degenerate);
  m.def("quickhull", &quickhull, py::arg("points"));
  m.def("jaccard_dissim", &jaccard_dissim, py::arg("a"), py::arg("b"));

  // assigncluster
  py::class_<ClusterAssignment>(m, "ClusterAssignment")
      .def_readonly("labels", &ClusterAssignment::labels)
      .def_readonly("centroids", &ClusterAssignment::centroids)
      .def_readonly("inertia", &ClusterAssignment::inertia);
  m.def("kmeans", &kmeans, py::arg("points"), py::arg("g"), py::arg("seed"),
        py::arg("restarts") = 10, py::arg("max_iterations") = 300,
        py::arg("tol") = 1e-8);
  m.def(
      "solve_lsap",
      [](const Eigen::MatrixXd& cost) {
        const AlignmentMap map = solve_lsap(cost);
        return py::make_tuple(map.mapping, map.total_cost);
      },
      py::arg("cost"));
  m.def("align_labels", &align_labels, py::arg("predicted"), py::arg("truth"),
        py::arg("g"));
  m.def("eta", &eta, py::arg("aligned_predicted"), py::arg("truth"));

  // stressmetrics
  m.def("pairwise_distances", &pairwise_distances, py::arg("points"));
  m.def("adjusted_stress", &adjusted_stress, py::arg("zi"), py::arg("zj"));
  m.def(
      "summarize",
      [](const std::vector<double>& values) {
        const DistributionSummary s = summarize(values);
        return py::dict(py::arg("p10") = s.p10, py::arg("p50") = s.p50,
                        py::arg("p90") = s.p90, py::arg("mode") = s.mode,
                        py::arg("count") = s.count);
      },
      py::arg("values"));

  // anisotropy
  py::class_<Ellipse>(m, "Ellipse")
      .def_readonly("center", &Ellipse::center)
      .def_readonly("shape", &Ellipse::shape)
      .def_readonly("semi_major", &Ellipse::semi_major)
      .def_readonly("semi_minor", &Ellipse::semi_minor)
      .def_readonly("theta", &Ellipse::theta);
  m.def("mvee_khachiyan", &mvee_khachiyan, py::arg("points"),
        py::arg("tol") = 1e-4, py::arg("max_iterations") = 10000);
  m.def("beta_from_ellipse", &beta_from_ellipse, py::arg("ellipse"));
  m.def(
      "global_anisotropy",
      [](const Eigen::MatrixXd& points) {
        const GlobalAnisotropy g = global_anisotropy(points);
        return py::make_tuple(g.beta, g.theta);
      },
      py::arg("points"));
  m.def("harmonic_mean", &harmonic_mean, py::arg("betas"));
  m.def("delta_series", &delta_series, py::arg("betas"));

  // reportcli
  m.def(
      "classify_threshold",
      [](double value) { return to_string(classify_threshold(value)); },
      py::arg("value"));
  m.def(
      "classify_trace",
      [](const std::vector<double>& z1) {
        return to_string(classify_trace(z1));
      },
      py::arg("z1_values"));
  m.def("normalize_latent", &normalize_latent, py::arg("latent"));
}
