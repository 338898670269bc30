#include "consist/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace consist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector lift(const Vector& x) {
  Vector z(x.size() + 1);
  z(0) = 1.0;
  z.tail(x.size()) = x;
  return z;
}

}  // namespace

QuadraticModel::QuadraticModel(Matrix coeff) : coeff_(std::move(coeff)) {
  if (coeff_.rows() != coeff_.cols() || coeff_.rows() < 1) {
    throw DimensionError("quadratic model coefficient matrix must be square and non-empty, got " +
                         std::to_string(coeff_.rows()) + "x" + std::to_string(coeff_.cols()));
  }
}

QuadraticModel QuadraticModel::from_parts(double constant, const Vector& linear,
                                          const Matrix& quadratic) {
  const auto n = linear.size();
  if (quadratic.rows() != n || quadratic.cols() != n) {
    throw DimensionError("quadratic block must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  Matrix c = Matrix::Zero(n + 1, n + 1);
  c(0, 0) = constant;
  c.block(0, 1, 1, n) = 0.5 * linear.transpose();
  c.block(1, 0, n, 1) = 0.5 * linear;
  c.block(1, 1, n, n) = 0.5 * (quadratic + quadratic.transpose());
  return QuadraticModel(std::move(c));
}

QuadraticModel QuadraticModel::linear(double constant, const Vector& linear) {
  return from_parts(constant, linear, Matrix::Zero(linear.size(), linear.size()));
}

bool QuadraticModel::is_affine() const {
  const auto n = dimension();
  return n == 0 || coeff_.block(1, 1, n, n).cwiseAbs().maxCoeff() == 0.0;
}

double evaluate_quadratic(const QuadraticModel& model, const Vector& x) {
  if (x.size() != model.dimension()) {
    throw DimensionError("model expects n=" + std::to_string(model.dimension()) +
                         " parameters, got " + std::to_string(x.size()));
  }
  const Vector z = lift(x);
  return z.dot(model.coeff() * z);
}

Vector gradient_quadratic(const QuadraticModel& model, const Vector& x) {
  if (x.size() != model.dimension()) {
    throw DimensionError("model expects n=" + std::to_string(model.dimension()) +
                         " parameters, got " + std::to_string(x.size()));
  }
  const Vector z = lift(x);
  return 2.0 * (model.coeff() * z).tail(x.size());
}

int Dataset::qoi_index(const std::string& qoi_name) const {
  for (int e = 0; e < N(); ++e) {
    if (qois[e].name == qoi_name) return e;
  }
  return -1;
}

int Dataset::parameter_index(const std::string& param_name) const {
  for (int i = 0; i < n(); ++i) {
    if (parameter_names[i] == param_name) return i;
  }
  return -1;
}

SchemeKind parse_scheme_kind(const std::string& text) {
  if (text == "unit") return SchemeKind::unit;
  if (text == "interval") return SchemeKind::interval;
  if (text == "bound") return SchemeKind::bound;
  if (text == "null") return SchemeKind::null;
  throw Error("unknown relaxation scheme kind '" + text + "' (expected unit|interval|bound|null)");
}

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::unit: return "unit";
    case SchemeKind::interval: return "interval";
    case SchemeKind::bound: return "bound";
    case SchemeKind::null: return "null";
  }
  return "unknown";
}

namespace {

double coefficient_for(SchemeKind kind, double bound, double width, const std::string& what) {
  if (!std::isfinite(bound)) return 0.0;
  switch (kind) {
    case SchemeKind::unit: return 1.0;
    case SchemeKind::interval: return std::isfinite(width) ? width : 0.0;
    case SchemeKind::bound:
      if (bound == 0.0) {
        throw Error("bound coefficient for " + what +
                    " is zero; it would freeze that bound. Supply an explicit override");
      }
      return std::abs(bound);
    case SchemeKind::null: return 0.0;
  }
  return 0.0;
}

}  // namespace

RelaxationScheme build_scheme(const Dataset& dataset, SchemeKind qoi_kind, SchemeKind param_kind) {
  RelaxationScheme s;
  const int N = dataset.N();
  const int n = dataset.n();
  s.qoi_lower.resize(N);
  s.qoi_upper.resize(N);
  for (int e = 0; e < N; ++e) {
    const auto& q = dataset.qois[e];
    const double w = q.upper - q.lower;
    s.qoi_lower(e) = coefficient_for(qoi_kind, q.lower, w, "lower bound of QOI '" + q.name + "'");
    s.qoi_upper(e) = coefficient_for(qoi_kind, q.upper, w, "upper bound of QOI '" + q.name + "'");
  }
  s.param_lower.resize(n);
  s.param_upper.resize(n);
  for (int i = 0; i < n; ++i) {
    const double l = dataset.box.lower(i);
    const double u = dataset.box.upper(i);
    const std::string& p = dataset.parameter_names[i];
    s.param_lower(i) = coefficient_for(param_kind, l, u - l, "lower bound of parameter '" + p + "'");
    s.param_upper(i) = coefficient_for(param_kind, u, u - l, "upper bound of parameter '" + p + "'");
  }
  s.facet = Vector::Constant(dataset.m(), param_kind == SchemeKind::null ? 0.0 : 1.0);
  return s;
}

PerturbationVector PerturbationVector::zero(const Dataset& dataset) {
  PerturbationVector p;
  p.qoi_upper = Vector::Zero(dataset.N());
  p.qoi_lower = Vector::Zero(dataset.N());
  p.param_upper = Vector::Zero(dataset.n());
  p.param_lower = Vector::Zero(dataset.n());
  p.facet = Vector::Zero(dataset.m());
  return p;
}

namespace {

void check_length(const Vector& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(expected));
  }
}

}  // namespace

void check_scheme(const Dataset& dataset, const RelaxationScheme& scheme) {
  check_length(scheme.qoi_lower, dataset.N(), "scheme.qoi_lower");
  check_length(scheme.qoi_upper, dataset.N(), "scheme.qoi_upper");
  check_length(scheme.param_lower, dataset.n(), "scheme.param_lower");
  check_length(scheme.param_upper, dataset.n(), "scheme.param_upper");
  check_length(scheme.facet, dataset.m(), "scheme.facet");
  for (const Vector* v : {&scheme.qoi_lower, &scheme.qoi_upper, &scheme.param_lower,
                          &scheme.param_upper, &scheme.facet}) {
    for (double c : *v) {
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw Error("relaxation coefficients must be finite and nonnegative");
      }
    }
  }
}

void check_perturbation(const Dataset& dataset, const PerturbationVector& rho) {
  check_length(rho.qoi_lower, dataset.N(), "rho.qoi_lower");
  check_length(rho.qoi_upper, dataset.N(), "rho.qoi_upper");
  check_length(rho.param_lower, dataset.n(), "rho.param_lower");
  check_length(rho.param_upper, dataset.n(), "rho.param_upper");
  check_length(rho.facet, dataset.m(), "rho.facet");
  for (const Vector* v :
       {&rho.qoi_lower, &rho.qoi_upper, &rho.param_lower, &rho.param_upper, &rho.facet}) {
    if (!v->allFinite()) throw Error("perturbation entries must be finite");
  }
}

Vector normalized_slack(const Dataset& dataset, const Vector& x) {
  if (x.size() != dataset.n()) {
    throw DimensionError("dataset has n=" + std::to_string(dataset.n()) + " parameters, got " +
                         std::to_string(x.size()));
  }
  Vector out(dataset.N());
  for (int e = 0; e < dataset.N(); ++e) {
    const auto& q = dataset.qois[e];
    const double m = evaluate_quadratic(q.model, x);
    out(e) = 2.0 * std::min(q.upper - m, m - q.lower) / (q.upper - q.lower);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(const std::string& code) const {
  for (const auto& f : findings) {
    if (f.code == code) return true;
  }
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    if (i) os << "; ";
    os << findings[i].code << ": " << findings[i].message;
  }
  return os.str();
}

ValidationError::ValidationError(ValidationReport report)
    : Error("invalid dataset: " + report.summary()), report_(std::move(report)) {}

ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport r;
  auto add = [&r](std::string code, std::string msg) {
    r.findings.push_back({std::move(code), std::move(msg)});
  };
  const int n = d.n();
  if (d.box.lower.size() != n || d.box.upper.size() != n) {
    add("box_dimension", "parameter box length does not match the " + std::to_string(n) +
                             " parameter names");
    return r;
  }
  std::set<std::string> pnames;
  for (int i = 0; i < n; ++i) {
    const auto& p = d.parameter_names[i];
    if (!pnames.insert(p).second) add("duplicate_parameter", "parameter name '" + p + "' repeated");
    const double l = d.box.lower(i);
    const double u = d.box.upper(i);
    if (std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf) {
      add("invalid_parameter_bound", "parameter '" + p + "' has an invalid bound");
    } else if (!(l < u)) {
      add("empty_box", "parameter '" + p + "' has lower >= upper");
    }
  }
  for (int i = 0; i < d.m(); ++i) {
    if (d.facets[i].size() != n + 1) {
      add("facet_dimension", "linear facet " + std::to_string(i) + " has length " +
                                 std::to_string(d.facets[i].size()) + ", expected " +
                                 std::to_string(n + 1));
    } else if (!d.facets[i].allFinite()) {
      add("facet_nonfinite", "linear facet " + std::to_string(i) + " has non-finite entries");
    }
  }
  std::set<std::string> qnames;
  for (const auto& q : d.qois) {
    if (!qnames.insert(q.name).second) add("duplicate_qoi", "QOI name '" + q.name + "' repeated");
    const Matrix& c = q.model.coeff();
    if (q.model.dimension() != n) {
      add("model_dimension", "QOI '" + q.name + "' model has n=" +
                                 std::to_string(q.model.dimension()) + ", dataset has n=" +
                                 std::to_string(n));
      continue;
    }
    if (!c.allFinite()) {
      add("model_nonfinite", "QOI '" + q.name + "' has non-finite coefficients");
      continue;
    }
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      add("asymmetric_model", "QOI '" + q.name + "' coefficient matrix is not symmetric");
    }
    if (!std::isfinite(q.lower) || !std::isfinite(q.upper)) {
      add("nonfinite_interval", "QOI '" + q.name + "' bounds must be finite");
    } else if (q.lower == q.upper) {
      add("degenerate_interval", "QOI '" + q.name + "' has lower == upper");
    } else if (q.lower > q.upper) {
      add("inverted_interval", "QOI '" + q.name + "' has lower > upper");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON format

namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + ": missing field \"" + key + "\"");
  return *it;
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError(path + ": expected a number");
  return v.get<double>();
}

double bound_at(const json& v, const std::string& path, double if_null) {
  if (v.is_null()) return if_null;
  return number_at(v, path);
}

std::string string_at(const json& v, const std::string& path) {
  if (!v.is_string()) throw ParseError(path + ": expected a string");
  return v.get<std::string>();
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json bound_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Dataset parse_dataset(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("JSON syntax error at " + line_context(text, e.byte) + ": " + e.what());
  }
  Dataset d;
  if (!doc.is_object()) throw ParseError("$: expected a JSON object");
  d.name = doc.contains("name") ? string_at(doc["name"], "$.name") : std::string{};

  const json& params = require(doc, "parameters", "$");
  if (!params.is_array()) throw ParseError("$.parameters: expected an array");
  const int n = static_cast<int>(params.size());
  d.box.lower.resize(n);
  d.box.upper.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::string path = "$.parameters[" + std::to_string(i) + "]";
    const json& p = params[i];
    d.parameter_names.push_back(string_at(require(p, "name", path), path + ".name"));
    d.box.lower(i) = bound_at(require(p, "lower", path), path + ".lower", -kInf);
    d.box.upper(i) = bound_at(require(p, "upper", path), path + ".upper", kInf);
  }

  if (doc.contains("linear_facets")) {
    const json& facets = doc["linear_facets"];
    if (!facets.is_array()) throw ParseError("$.linear_facets: expected an array");
    for (std::size_t k = 0; k < facets.size(); ++k) {
      const std::string path = "$.linear_facets[" + std::to_string(k) + "]";
      const json& a = facets[k];
      if (!a.is_array() || static_cast<int>(a.size()) != n + 1) {
        throw ParseError(path + ": expected an array of " + std::to_string(n + 1) + " numbers");
      }
      Vector v(n + 1);
      for (int j = 0; j <= n; ++j) v(j) = number_at(a[j], path + "[" + std::to_string(j) + "]");
      d.facets.push_back(std::move(v));
    }
  }

  const json& qois = require(doc, "qois", "$");
  if (!qois.is_array()) throw ParseError("$.qois: expected an array");
  for (std::size_t e = 0; e < qois.size(); ++e) {
    const std::string path = "$.qois[" + std::to_string(e) + "]";
    const json& q = qois[e];
    QoiConstraint c;
    c.name = string_at(require(q, "name", path), path + ".name");
    c.lower = number_at(require(q, "lower", path), path + ".lower");
    c.upper = number_at(require(q, "upper", path), path + ".upper");
    const json& coeff = require(q, "coeff", path);
    const int dim = n + 1;
    if (!coeff.is_array() || static_cast<int>(coeff.size()) != dim * dim) {
      throw ParseError(path + ".coeff: expected a row-major array of " + std::to_string(dim * dim) +
                       " numbers");
    }
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int col = 0; col < dim; ++col) {
        m(r, col) = number_at(coeff[r * dim + col],
                              path + ".coeff[" + std::to_string(r * dim + col) + "]");
      }
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      if (warnings) {
        warnings->push_back("QOI '" + c.name +
                            "': asymmetric coefficient matrix replaced by its symmetric part");
      }
    }
    // (Q + Q')/2 is an exact no-op on symmetric input.
    Matrix sym = 0.5 * (m + m.transpose());
    c.model = QuadraticModel(std::move(sym));
    d.qois.push_back(std::move(c));
  }

  auto report = validate_dataset(d);
  if (!report.ok()) throw ValidationError(std::move(report));
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str(), warnings);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_dataset(const Dataset& d) {
  json doc;
  doc["name"] = d.name;
  doc["parameters"] = json::array();
  for (int i = 0; i < d.n(); ++i) {
    doc["parameters"].push_back({{"name", d.parameter_names[i]},
                                 {"lower", bound_json(d.box.lower(i))},
                                 {"upper", bound_json(d.box.upper(i))}});
  }
  if (!d.facets.empty()) {
    doc["linear_facets"] = json::array();
    for (const auto& a : d.facets) {
      doc["linear_facets"].push_back(std::vector<double>(a.data(), a.data() + a.size()));
    }
  }
  doc["qois"] = json::array();
  for (const auto& q : d.qois) {
    const Matrix& c = q.model.coeff();
    std::vector<double> flat;
    flat.reserve(c.size());
    for (int r = 0; r < c.rows(); ++r) {
      for (int col = 0; col < c.cols(); ++col) flat.push_back(c(r, col));
    }
    doc["qois"].push_back(
        {{"name", q.name}, {"lower", q.lower}, {"upper", q.upper}, {"coeff", flat}});
  }
  return doc.dump(2) + "\n";
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write dataset file '" + path.string() + "'");
  out << serialize_dataset(dataset);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace consist
