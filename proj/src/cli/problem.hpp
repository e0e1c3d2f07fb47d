#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "holo/currents.hpp"
#include "holo/lie.hpp"
#include "holo/surface.hpp"

namespace holo::cli {

using json = nlohmann::json;

json encode(cplx z);
json encode(const Mat& m);
cplx decode_complex(const json& j, const std::string& where);
Mat decode_matrix(const json& j, int n, const std::string& where);

/// One term A * r(z): r = (z - p_pole)^{-order} for a puncture index, or z^order
/// for "polynomial".
struct TermSpec {
  Mat matrix;
  std::variant<int, std::string> pole;  ///< puncture index or "polynomial"
  int order = 0;
};

struct AnnulusSpec {
  cplx center;
  double inner = 0.0, outer = 0.0;
  int charts = 0;
};

struct Options {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_word_len;
  std::optional<int> quadrature_order;
};

struct ProblemDocument {
  int n = 2;
  std::vector<cplx> punctures;
  std::optional<cplx> basepoint;
  std::vector<TermSpec> form;
  std::optional<cplx> level;
  std::optional<int> sigma_index;
  /// Exponential factors of the acting current; each factor is a list of terms.
  std::vector<std::vector<TermSpec>> current;
  std::vector<TermSpec> x, y;
  std::optional<cplx> central;
  /// Fourier coefficients c_{-M..M} of a loop (frenkel).
  std::vector<Mat> loop;
  std::vector<cplx> samples;
  std::optional<AnnulusSpec> annulus;
  Options options;
};

/// Throws Input/SchemaError with a path-like location on any violation.
ProblemDocument parse_problem(const json& j);
json to_json(const ProblemDocument& d);

SurfaceModel build_surface(const ProblemDocument& d);
AlgebraCurrent build_current(const ProblemDocument& d, const SurfaceModel& s, const std::vector<TermSpec>& terms,
                             const std::string& where);
GroupCurrent build_group_current(const ProblemDocument& d, const SurfaceModel& s);

}  // namespace holo::cli
