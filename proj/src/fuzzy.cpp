#include "parafuzz/fuzzy.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "parafuzz/kv.h"

namespace parafuzz {

MembershipFunction::MembershipFunction(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d)))
    throw FuzzyError("membership function parameters must be finite");
  if (!(a <= b && b <= c && c <= d))
    throw FuzzyError("membership function requires a <= b <= c <= d");
}

double MembershipFunction::operator()(double x) const {
  if (x >= b_ && x <= c_) return 1.0;
  if (x < b_) {
    if (left_shoulder()) return 1.0;
    if (x <= a_) return 0.0;
    return (x - a_) / (b_ - a_);
  }
  if (right_shoulder()) return 1.0;
  if (x >= d_) return 0.0;
  return (d_ - x) / (d_ - c_);
}

LinguisticVariable::LinguisticVariable(std::string name, Universe universe,
                                       std::vector<Term> terms)
    : name_(std::move(name)), universe_(universe), terms_(std::move(terms)) {
  if (!(universe_.lo < universe_.hi))
    throw FuzzyError(name_ + ": universe must satisfy lo < hi");
  if (terms_.empty()) throw FuzzyError(name_ + ": at least one term required");

  std::set<std::string> labels;
  for (const auto& t : terms_) {
    if (!labels.insert(t.label).second)
      throw FuzzyError(name_ + ": duplicate term label '" + t.label + "'");
    // Shoulders extend past the universe edge by construction; the finite
    // edges must still lie inside it.
    const auto& mf = t.mf;
    if (mf.a() < universe_.lo || mf.d() > universe_.hi)
      throw FuzzyError(name_ + ": term '" + t.label + "' support leaves the universe");
  }

  constexpr int kChecks = 2001;
  for (int i = 0; i < kChecks; ++i) {
    const double x = universe_.lo + (universe_.hi - universe_.lo) * i / (kChecks - 1);
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.mf(x);
    if (std::abs(sum - 1.0) > kPartitionTolerance) {
      std::ostringstream msg;
      msg << name_ << ": terms do not form a fuzzy partition at x = " << x
          << " (sum " << sum << ")";
      throw FuzzyError(msg.str());
    }
  }
}

std::size_t LinguisticVariable::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].label == label) return i;
  throw FuzzyError(name_ + ": no term '" + std::string(label) + "'");
}

DegreeVector LinguisticVariable::fuzzify(double x) const {
  const double xc = universe_.clamp(x);
  DegreeVector out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back(t.mf(xc));
  return out;
}

namespace {

void check_degrees(double u, double v) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
    throw FuzzyError("degrees must lie in [0, 1]");
}

}  // namespace

double tnorm(TNorm kind, double u, double v) {
  check_degrees(u, v);
  switch (kind) {
    case TNorm::kProduct:
      return u * v;
    case TNorm::kMin:
      return std::min(u, v);
  }
  return 0.0;
}

double snorm(SNorm kind, double u, double v) {
  check_degrees(u, v);
  switch (kind) {
    case SNorm::kProbabilisticSum:
      return u + v - u * v;
    case SNorm::kMax:
      return std::max(u, v);
  }
  return 0.0;
}

double centroid_defuzzify(const LinguisticVariable& var, const DegreeVector& degrees) {
  if (degrees.size() != var.size())
    throw FuzzyError(var.name() + ": degree vector size does not match term count");
  if (std::none_of(degrees.begin(), degrees.end(), [](double d) { return d > 0.0; }))
    throw FuzzyError("no activation");

  const auto& u = var.universe();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < kCentroidSamples; ++i) {
    const double x = u.lo + (u.hi - u.lo) * i / (kCentroidSamples - 1);
    double agg = 0.0;
    for (std::size_t k = 0; k < var.size(); ++k)
      agg = std::max(agg, std::min(degrees[k], var.terms()[k].mf(x)));
    num += x * agg;
    den += agg;
  }
  return u.clamp(num / den);
}

LinguisticVariable accent_variable() {
  return LinguisticVariable("accent", {0.0, 1.0},
                            {{"soft", {0.0, 0.0, 0.3, 0.6}},
                             {"sharp", {0.3, 0.6, 1.0, 1.0}}});
}

LinguisticVariable speed_variable() {
  return LinguisticVariable("speed", {-2.0, 2.0},
                            {{"slow", {-2.0, -2.0, -0.8, -0.2}},
                             {"normal", {-0.8, -0.2, 0.2, 0.8}},
                             {"fast", {0.2, 0.8, 2.0, 2.0}}});
}

LinguisticVariable emphasis_variable() {
  return LinguisticVariable("emphasis", {-20.0, 20.0},
                            {{"light", {-20.0, -20.0, -9.0, -3.0}},
                             {"medium", {-9.0, -3.0, 3.0, 9.0}},
                             {"heavy", {3.0, 9.0, 20.0, 20.0}}});
}

namespace {

std::vector<double> parse_numbers(const std::string& key, const std::string& value,
                                  std::size_t count) {
  std::istringstream in(value);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != count)
    throw FuzzyError(key + ": expected " + std::to_string(count) + " numbers");
  return out;
}

struct VariableDraft {
  std::optional<Universe> universe;
  std::vector<Term> terms;
};

LinguisticVariable merge(const LinguisticVariable& base, const VariableDraft& draft,
                         std::initializer_list<std::string_view> required) {
  if (!draft.universe && draft.terms.empty()) return base;
  LinguisticVariable var(base.name(), draft.universe.value_or(base.universe()),
                         draft.terms.empty() ? base.terms() : draft.terms);
  for (auto label : required) var.index_of(label);
  return var;
}

}  // namespace

VariableSet parse_variables(std::string_view text) {
  std::map<std::string, VariableDraft> drafts;
  for (const auto& [key, value] : parse_key_values(text)) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw FuzzyError("unknown variable key '" + key + "'");
    const std::string var = key.substr(0, dot);
    const std::string rest = key.substr(dot + 1);
    if (var != "accent" && var != "speed" && var != "emphasis")
      throw FuzzyError("unknown variable '" + var + "'");
    auto& draft = drafts[var];
    if (rest == "universe") {
      const auto nums = parse_numbers(key, value, 2);
      draft.universe = Universe{nums[0], nums[1]};
    } else if (rest.rfind("term.", 0) == 0) {
      const auto nums = parse_numbers(key, value, 4);
      draft.terms.push_back({rest.substr(5), {nums[0], nums[1], nums[2], nums[3]}});
    } else {
      throw FuzzyError("unknown variable key '" + key + "'");
    }
  }
  VariableSet set;
  set.accent = merge(set.accent, drafts["accent"], {"soft", "sharp"});
  set.speed = merge(set.speed, drafts["speed"], {"slow", "normal", "fast"});
  set.emphasis = merge(set.emphasis, drafts["emphasis"], {"light", "medium", "heavy"});
  return set;
}

VariableSet load_variables(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FuzzyError("cannot open variable definitions '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_variables(buf.str());
}

}  // namespace parafuzz
