#include <memory>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnsvec/encoder.hpp"
#include "dnsvec/parser.hpp"
#include "dnsvec/reasoner.hpp"

namespace py = pybind11;
using namespace dnsvec;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Activation activation(const std::string& mode) {
  if (mode == "relu") return Activation::Relu;
  if (mode == "heaviside") return Activation::Heaviside;
  throw py::value_error("mode must be 'relu' or 'heaviside', got '" + mode + "'");
}

std::vector<std::string> names_of(const Ontology& o, const std::vector<ElementId>& ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(o.name(id));
  return out;
}

Situation to_situation(const py::object& obj) {
  if (py::isinstance<py::str>(obj)) return parse_situation(obj.cast<std::string>());
  const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return parse_situation(text);
}

/// Ontology with its encoder and every description basis.
class Model {
 public:
  explicit Model(std::shared_ptr<const Ontology> ontology)
      : ontology_(std::move(ontology)), encoder_(*ontology_), bases_(encoder_.build_all_bases()) {}

  const std::shared_ptr<const Ontology>& ontology() const { return ontology_; }
  const Encoder& encoder() const { return encoder_; }
  const BasisMap& bases() const { return bases_; }

  const Basis& basis(const std::string& name) const {
    const ElementId d = ontology_->id(name);
    if (!ontology_->is_description(d)) {
      throw Error(ErrorKind::KindMismatch, "'" + name + "' is not a description");
    }
    return bases_.at(d);
  }

  Vector deduce(const Vector& v, Activation mode) const {
    const auto values = dnsvec::deduce(*ontology_, bases_, v, mode).values;
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  }

 private:
  std::shared_ptr<const Ontology> ontology_;
  Encoder encoder_;
  BasisMap bases_;
};

void check_width(const Model& m, Eigen::Index cols) {
  if (static_cast<std::size_t>(cols) != m.ontology()->dim()) {
    throw Error(ErrorKind::DimensionMismatch, "rows have dimension " + std::to_string(cols) +
                                                  ", ontology dimension is " +
                                                  std::to_string(m.ontology()->dim()));
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Vector-space reasoning over Descriptions-and-Situations ontologies";

  py::exception<Error>(m, "DnsvecError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object cls = py::module_::import("dnsvec._core").attr("DnsvecError");
      py::object inst = cls(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      if (e.span()) {
        inst.attr("line") = e.span()->line;
        inst.attr("column") = e.span()->column;
      } else {
        inst.attr("line") = py::none();
        inst.attr("column") = py::none();
      }
      inst.attr("path") = e.path();
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  py::class_<Ontology, std::shared_ptr<Ontology>>(m, "Ontology")
      .def_static(
          "from_file", [](const std::string& path) { return std::make_shared<Ontology>(load_ontology(path)); },
          py::arg("path"))
      .def_static(
          "from_text",
          [](const std::string& text, const std::string& format) {
            OntologyFormat f;
            if (format == "dsl") {
              f = OntologyFormat::Dsl;
            } else if (format == "json") {
              f = OntologyFormat::Structured;
            } else {
              throw py::value_error("format must be 'dsl' or 'json'");
            }
            return std::make_shared<Ontology>(Ontology::build(parse_ontology(text, f)));
          },
          py::arg("text"), py::arg("format") = "dsl")
      .def_property_readonly("dim", &Ontology::dim)
      .def_property_readonly("names", [](const Ontology& o) { return names_of(o, o.elements()); })
      .def_property_readonly("roles", [](const Ontology& o) { return names_of(o, o.roles()); })
      .def_property_readonly("descriptions", [](const Ontology& o) { return names_of(o, o.descriptions()); })
      .def_property_readonly("warnings", &Ontology::warnings)
      .def("index", [](const Ontology& o, const std::string& name) { return o.id(name).index; }, py::arg("name"))
      .def(
          "components", [](const Ontology& o, const std::string& name) { return names_of(o, o.components(o.id(name))); },
          py::arg("name"))
      .def(
          "is_subsumed", [](const Ontology& o, const std::string& x, const std::string& y) { return o.is_subsumed(x, y); },
          py::arg("x"), py::arg("y"))
      .def("to_text", [](const Ontology& o) { return serialize_ontology_text(o.declarations()); })
      .def("to_json", [](const Ontology& o) { return serialize_ontology_structured(o.declarations()); })
      .def("__len__", &Ontology::dim)
      .def("__repr__", [](const Ontology& o) {
        return "<Ontology " + std::to_string(o.role_count()) + " roles, " + std::to_string(o.description_count()) +
               " descriptions>";
      });

  py::class_<Model, std::shared_ptr<Model>>(m, "Model")
      .def(py::init([](std::shared_ptr<Ontology> o) { return std::make_shared<Model>(std::move(o)); }),
           py::arg("ontology"))
      .def_static(
          "from_file",
          [](const std::string& path) {
            return std::make_shared<Model>(std::make_shared<const Ontology>(load_ontology(path)));
          },
          py::arg("path"))
      .def_property_readonly("ontology", [](const Model& self) { return std::const_pointer_cast<Ontology>(self.ontology()); })
      .def_property_readonly("dim", [](const Model& self) { return self.ontology()->dim(); })
      .def_property_readonly("descriptions",
                             [](const Model& self) { return names_of(*self.ontology(), self.ontology()->descriptions()); })
      .def(
          "vector", [](const Model& self, const std::string& name) -> Vector { return self.encoder().vector_of(self.ontology()->id(name)); },
          py::arg("name"))
      .def(
          "encode", [](const Model& self, const py::object& s) -> Vector { return self.encoder().encode_situation(to_situation(s)); },
          py::arg("situation"))
      .def(
          "basis",
          [](const Model& self, const std::string& name) {
            const Basis& b = self.basis(name);
            return py::make_tuple(RowMatrix(b.a), RowMatrix(b.a_pinv));
          },
          py::arg("description"))
      .def(
          "satisfaction",
          [](const Model& self, const std::string& name, const Vector& v, const std::string& mode) {
            const auto report = dnsvec::satisfaction(self.basis(name), v, activation(mode));
            py::dict out;
            out["coefficients"] = report.coefficients;
            out["active"] = report.active_mask;
            out["probability"] = report.probability;
            out["residual"] = report.residual_norm;
            return out;
          },
          py::arg("description"), py::arg("vector"), py::arg("mode") = "relu")
      .def(
          "deduce",
          [](const Model& self, const Vector& v, const std::string& mode) {
            const Activation a = activation(mode);
            py::gil_scoped_release release;
            return self.deduce(v, a);
          },
          py::arg("vector"), py::arg("mode") = "relu")
      .def(
          "deduce_batch",
          [](const Model& self, const RowMatrix& batch, const std::string& mode) {
            check_width(self, batch.cols());
            const Activation a = activation(mode);
            RowMatrix out(batch.rows(), static_cast<Eigen::Index>(self.ontology()->description_count()));
            py::gil_scoped_release release;
            for (Eigen::Index i = 0; i < batch.rows(); ++i) out.row(i) = self.deduce(batch.row(i).transpose(), a).transpose();
            return out;
          },
          py::arg("batch"), py::arg("mode") = "relu")
      .def(
          "jacobian",
          [](const Model& self, const Vector& v) {
            JacobianResult r;
            {
              py::gil_scoped_release release;
              r = dnsvec::jacobian(*self.ontology(), self.bases(), v);
            }
            py::list kinks;
            for (const auto& k : r.kinks) {
              kinks.append(py::make_tuple(self.ontology()->name(k.description), k.component, k.coefficient));
            }
            return py::make_tuple(RowMatrix(r.jacobian), kinks);
          },
          py::arg("vector"))
      .def(
          "jacobian_batch",
          [](const Model& self, const RowMatrix& batch) {
            check_width(self, batch.cols());
            const auto n = static_cast<py::ssize_t>(batch.rows());
            const auto nd = static_cast<py::ssize_t>(self.ontology()->description_count());
            const auto dim = static_cast<py::ssize_t>(self.ontology()->dim());
            py::array_t<double> out({n, nd, dim});
            double* data = out.mutable_data();
            py::gil_scoped_release release;
            for (py::ssize_t i = 0; i < n; ++i) {
              const Matrix j = dnsvec::jacobian(*self.ontology(), self.bases(), batch.row(i).transpose()).jacobian;
              std::copy(j.data(), j.data() + j.size(), data + i * nd * dim);
            }
            return out;
          },
          py::arg("batch"))
      .def(
          "satisfies",
          [](const Model& self, const py::object& s, const std::string& name, bool strict) {
            const auto verdict = symbolic_satisfies(*self.ontology(), to_situation(s), self.ontology()->id(name),
                                                    strict ? OracleSemantics::Strict : OracleSemantics::Flattened);
            return py::make_tuple(verdict.satisfied, verdict.nearly_satisfied);
          },
          py::arg("situation"), py::arg("description"), py::arg("strict") = false)
      .def(
          "verify",
          [](const Model& self, std::size_t max_entities, std::size_t max_depth, bool strict) {
            const auto roles = names_of(*self.ontology(), self.ontology()->roles());
            TheoremReport report;
            {
              py::gil_scoped_release release;
              const auto situations = enumerate_situations(roles, max_entities, max_depth);
              report = verify_theorems(self.encoder(), self.bases(), situations,
                                       strict ? OracleSemantics::Strict : OracleSemantics::Flattened);
            }
            py::dict out;
            out["situations"] = report.situations;
            out["checks"] = report.checks;
            out["counterexamples"] = report.counterexamples.size();
            return out;
          },
          py::arg("max_entities") = 4, py::arg("max_depth") = 2, py::arg("strict") = false)
      .def(
          "gradcheck",
          [](const Model& self, std::size_t trials, std::uint64_t seed) {
            GradcheckResult r;
            {
              py::gil_scoped_release release;
              r = dnsvec::gradcheck(self.encoder(), self.bases(), trials, seed);
            }
            py::dict out;
            out["trials"] = r.trials;
            out["rejected"] = r.rejected;
            out["max_relative_error"] = r.max_relative_error;
            return out;
          },
          py::arg("trials") = 100, py::arg("seed") = 42);
}
