#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "holo/error.hpp"
#include "holo/orbits.hpp"
#include "holo/transport.hpp"

namespace py = pybind11;
using namespace holo;

namespace {

using PyMat = Eigen::MatrixXcd;
/// (matrix, puncture index or None for a monomial, order)
using PyTerm = std::tuple<PyMat, std::optional<int>, int>;

SurfaceModel surface(const std::vector<cplx>& punctures, std::optional<cplx> basepoint) {
  return basepoint ? SurfaceModel(punctures, *basepoint) : SurfaceModel(punctures);
}

AlgebraCurrent current(const SurfaceModel& s, const std::vector<PyTerm>& terms, int n) {
  std::vector<CurrentTerm> out;
  for (const auto& [m, pole, order] : terms) {
    if (m.rows() != n || m.cols() != n) throw input_error("SizeMismatch", "term matrices must all be n x n");
    RationalFunction r = pole ? RationalFunction::pole(s.punctures().at(static_cast<size_t>(*pole)), order)
                              : RationalFunction::monomial(order);
    out.push_back({lie::AlgebraElement(Mat(m)), std::move(r)});
  }
  if (out.empty()) return AlgebraCurrent(s, n);
  return AlgebraCurrent(s, std::move(out));
}

int size_of(const std::vector<PyTerm>& terms, int n) {
  if (n > 0) return n;
  if (terms.empty()) throw input_error("SizeMismatch", "cannot infer n from an empty term list");
  return static_cast<int>(std::get<0>(terms.front()).rows());
}

std::vector<PyMat> matrices(const std::vector<lie::GroupElement>& g) {
  std::vector<PyMat> out;
  for (const auto& e : g) out.emplace_back(e.matrix());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flat connections, current algebras and coadjoint orbits on punctured spheres";

  static py::handle error = py::exception<Error>(m, "HoloError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("killing_form", [](const PyMat& x, const PyMat& y) { return lie::killing_form(Mat(x), Mat(y)); });
  m.def("matrix_exp", [](const PyMat& x) { return PyMat(lie::matrix_exp(Mat(x))); });

  m.def(
      "monodromy",
      [](const std::vector<cplx>& punctures, const std::vector<PyTerm>& form, std::optional<cplx> basepoint, double tol,
         int n) {
        const SurfaceModel s = surface(punctures, basepoint);
        const MonodromyTuple t = period_map(OneForm{current(s, form, size_of(form, n))}, tol);
        return matrices(t.entries);
      },
      py::arg("punctures"), py::arg("form"), py::arg("basepoint") = py::none(), py::arg("tol") = kTransportTol,
      py::arg("n") = 0, "Period map of sum A_i r_i(z) dz over the canonical generators.");

  m.def(
      "classify",
      [](const std::vector<cplx>& punctures, const std::vector<PyTerm>& form, cplx level, double tol, int n) {
        const SurfaceModel s = surface(punctures, std::nullopt);
        const CoadjointPoint d(level, OneForm{current(s, form, size_of(form, n))}, canonical_generators(s).at(0));
        OrbitOptions opt;
        opt.transport_tol = tol;
        const OrbitCertificate c = classify_orbit(d, opt);
        py::dict out;
        out["tuple"] = matrices(c.tuple.entries);
        out["generic"] = c.generic;
        out["char_polys"] = c.invariants.char_polys;
        return out;
      },
      py::arg("punctures"), py::arg("form"), py::arg("level"), py::arg("tol") = kTransportTol, py::arg("n") = 0);

  m.def(
      "cocycle",
      [](const std::vector<cplx>& punctures, const std::vector<PyTerm>& x, const std::vector<PyTerm>& y,
         int sigma_index) {
        const SurfaceModel s = surface(punctures, std::nullopt);
        const int n = size_of(x.empty() ? y : x, 0);
        return cocycle_omega_sigma(current(s, x, n), current(s, y, n),
                                   canonical_generators(s).at(static_cast<size_t>(sigma_index)));
      },
      py::arg("punctures"), py::arg("x"), py::arg("y"), py::arg("sigma_index") = 0);

  m.def(
      "frenkel",
      [](const std::vector<PyMat>& coeffs, cplx level, double tol) {
        std::vector<Mat> c(coeffs.begin(), coeffs.end());
        const FrenkelResult r = frenkel_monodromy(LoopCurrent(std::move(c)), level, tol);
        return std::make_pair(PyMat(r.monodromy.matrix()), r.quasi_periodicity);
      },
      py::arg("coefficients"), py::arg("level"), py::arg("tol") = kTransportTol,
      "Monodromy of z' = -(1/level) X z for X given by Fourier coefficients c_{-M..M}.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::vector<std::string> argv{"holocurrent"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out, err;
        std::istringstream in(stdin_text);
        const int code = cli::run_command(argv, out, err, in);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = std::string(), "Runs the command-line tool in-process.");
}
