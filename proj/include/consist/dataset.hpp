#ifndef CONSIST_DATASET_HPP
#define CONSIST_DATASET_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace consist {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. The message carries the JSON path or line of the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/**
 * Quadratic function of the parameters in the lifted basis z = [1; x]:
 *
 *     M(x) = z' * coeff * z
 *
 * coeff is a symmetric (n+1)x(n+1) matrix. Entry (0,0) is the constant term,
 * 2*coeff(0,i) the linear coefficient of x_i and the trailing block the
 * quadratic form.
 */
class QuadraticModel {
 public:
  QuadraticModel() = default;
  explicit QuadraticModel(Matrix coeff);

  /// Builds the lifted matrix for c + b'x + x'Ax (A is symmetrized).
  static QuadraticModel from_parts(double constant, const Vector& linear,
                                   const Matrix& quadratic);
  static QuadraticModel linear(double constant, const Vector& linear);

  int dimension() const { return static_cast<int>(coeff_.rows()) - 1; }
  const Matrix& coeff() const { return coeff_; }

  /// True when the quadratic block vanishes, i.e. the model is affine in x.
  bool is_affine() const;

 private:
  Matrix coeff_ = Matrix::Zero(1, 1);
};

double evaluate_quadratic(const QuadraticModel& model, const Vector& x);
Vector gradient_quadratic(const QuadraticModel& model, const Vector& x);

struct ParameterBox {
  Vector lower;  // -inf allowed: unbounded below
  Vector upper;  // +inf allowed: unbounded above
};

struct QoiConstraint {
  std::string name;
  QuadraticModel model;
  double lower = 0.0;
  double upper = 0.0;
};

/**
 * Parameter box, extra linear facets a'[1;x] <= 0 and interval-bounded QOI
 * models. The feasible set is every x in the box satisfying the facets and
 * lower <= M_e(x) <= upper for all QOIs.
 */
struct Dataset {
  std::string name;
  std::vector<std::string> parameter_names;
  ParameterBox box;
  std::vector<Vector> facets;
  std::vector<QoiConstraint> qois;

  int n() const { return static_cast<int>(parameter_names.size()); }
  int N() const { return static_cast<int>(qois.size()); }
  int m() const { return static_cast<int>(facets.size()); }

  int qoi_index(const std::string& qoi_name) const;        // -1 when absent
  int parameter_index(const std::string& param_name) const;  // -1 when absent
};

/// Per-bound relaxation coefficients. Zero marks a bound that may not move.
struct RelaxationScheme {
  Vector qoi_lower;
  Vector qoi_upper;
  Vector param_lower;
  Vector param_upper;
  Vector facet;
};

enum class SchemeKind { unit, interval, bound, null };

SchemeKind parse_scheme_kind(const std::string& text);
std::string to_string(SchemeKind kind);

/**
 * Standard coefficient configurations: unit (1), interval (U-L, u-l),
 * bound (|L|,|U|, |l|,|u|) and null (0). Infinite parameter bounds always get
 * coefficient 0. Extra facets get 1 for every kind except null.
 *
 * Throws Error for the bound kind when a bound equals zero.
 */
RelaxationScheme build_scheme(const Dataset& dataset, SchemeKind qoi_kind,
                              SchemeKind param_kind);

/// Signed perturbation of every bound; positive values relax.
struct PerturbationVector {
  Vector qoi_upper;
  Vector qoi_lower;
  Vector param_upper;
  Vector param_lower;
  Vector facet;

  static PerturbationVector zero(const Dataset& dataset);
};

void check_scheme(const Dataset& dataset, const RelaxationScheme& scheme);
void check_perturbation(const Dataset& dataset, const PerturbationVector& rho);

/// Entry e is 2*min(U_e - M_e(x), M_e(x) - L_e)/(U_e - L_e).
Vector normalized_slack(const Dataset& dataset, const Vector& x);

struct ValidationFinding {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
  bool has(const std::string& code) const;
  std::string summary() const;
};

ValidationReport validate_dataset(const Dataset& dataset);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Parses the JSON dataset format. Asymmetric coefficient matrices are
/// replaced by (Q+Q')/2 and a warning is appended to `warnings`.
Dataset parse_dataset(const std::string& text,
                      std::vector<std::string>* warnings = nullptr);
Dataset load_dataset(const std::filesystem::path& path,
                     std::vector<std::string>* warnings = nullptr);

std::string serialize_dataset(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace consist

#endif  // CONSIST_DATASET_HPP
