#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parafuzz {

/// Thrown for any invalid fuzzy-set construction or evaluation request.
class FuzzyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Trapezoidal membership function: 0 at/below a, linear rise to 1 at b,
/// plateau to c, linear fall to 0 at/after d. A degenerate left edge (a == b)
/// is a left shoulder and a degenerate right edge (c == d) a right shoulder:
/// the plateau then extends without bound on that side.
class MembershipFunction {
 public:
  MembershipFunction(double a, double b, double c, double d);

  double operator()(double x) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  bool left_shoulder() const { return a_ == b_; }
  bool right_shoulder() const { return c_ == d_; }

 private:
  double a_, b_, c_, d_;
};

inline double eval_membership(const MembershipFunction& mf, double x) { return mf(x); }

struct Universe {
  double lo = 0.0;
  double hi = 1.0;

  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

struct Term {
  std::string label;
  MembershipFunction mf;
};

/// Per-term degrees, ordered as the owning variable's terms.
using DegreeVector = std::vector<double>;

/// A named variable whose terms form a Ruspini partition of its universe.
/// Construction validates support containment, unique labels, and the
/// partition-of-unity property on a dense grid.
class LinguisticVariable {
 public:
  static constexpr double kPartitionTolerance = 1e-9;

  LinguisticVariable(std::string name, Universe universe, std::vector<Term> terms);

  const std::string& name() const { return name_; }
  const Universe& universe() const { return universe_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Index of the term with the given label; throws FuzzyError if absent.
  std::size_t index_of(std::string_view label) const;

  DegreeVector fuzzify(double x) const;

 private:
  std::string name_;
  Universe universe_;
  std::vector<Term> terms_;
};

inline DegreeVector fuzzify(const LinguisticVariable& var, double x) { return var.fuzzify(x); }

enum class TNorm { kProduct, kMin };
enum class SNorm { kProbabilisticSum, kMax };

double tnorm(TNorm kind, double u, double v);
double snorm(SNorm kind, double u, double v);
inline double complement(double u) { return 1.0 - u; }

/// Number of uniform samples used by centroid_defuzzify.
inline constexpr int kCentroidSamples = 1001;

/// Centroid of the max-aggregate of the term curves clipped at their degrees.
/// Throws FuzzyError("no activation") if every degree is zero.
double centroid_defuzzify(const LinguisticVariable& var, const DegreeVector& degrees);

// Shipped variables.
LinguisticVariable accent_variable();
LinguisticVariable speed_variable();
LinguisticVariable emphasis_variable();

/// The three variables used by the paralinguistic filter.
struct VariableSet {
  LinguisticVariable accent = accent_variable();
  LinguisticVariable speed = speed_variable();
  LinguisticVariable emphasis = emphasis_variable();
};

/// Parses variable definitions from key-value text:
///
///   speed.universe = -2 2
///   speed.term.slow = -2 -2 -0.8 -0.2
///
/// Terms keep file order. Variables absent from the text keep their shipped
/// defaults. Accent/speed/emphasis must keep the term labels the filter uses.
VariableSet parse_variables(std::string_view text);
VariableSet load_variables(const std::string& path);

}  // namespace parafuzz
