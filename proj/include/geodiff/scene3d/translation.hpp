#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodiff/scene3d/expression.hpp"
#include "geodiff/scene3d/reference_object.hpp"

namespace geodiff::scene {

// One rule of the point translation logic, applied to the selected keypoints.
//   translate   : p += amount(gamma) * axis
//   scale_about : p += (factor(gamma) - 1) * ((p - anchor) . axis) * axis
//   displace    : p += offset(gamma), optionally per keypoint
struct TranslationRule {
  enum class Kind { translate, scale_about, displace };
  Kind kind = Kind::translate;
  std::vector<std::string> selector;
  Vec3 axis = Vec3::UnitX();    // unit length
  Vec3 anchor = Vec3::Zero();
  Expression amount;            // translate
  Expression factor;            // scale_about
  std::array<Expression, 3> offset;                             // displace, shared
  std::map<std::string, std::array<Expression, 3>> per_point;   // displace, per keypoint name
};

// Ordered rules plus the parameter schema (names and reference values of gamma).
//
// JSON form:
//   {"parameters": {"length": 4.0},
//    "rules": [{"select": ["front"], "translate": {"axis": "x", "amount": "length - 4"}},
//              {"select": ["roof"], "scale_about": {"anchor": [0,0,0], "axis": "z", "factor": "height / 1.5"}},
//              {"select": ["a","b"], "displace": {"offset": ["0", "0", "0.1 * (length - 4)"],
//                                                 "per_point": {"b": ["length - 4", "0", "0"]}}}]}
class TranslationRuleSet {
 public:
  TranslationRuleSet() = default;
  // Validates selectors against the keypoint names, expression variables
  // against the schema, and the identity at the reference values.
  TranslationRuleSet(std::vector<TranslationRule> rules, ParameterValues reference,
                     const std::vector<Keypoint>& keypoints);

  static TranslationRuleSet from_json(const nlohmann::json& parameters, const nlohmann::json& rules,
                                      const std::vector<Keypoint>& keypoints);

  const std::vector<TranslationRule>& rules() const { return rules_; }
  const ParameterValues& reference() const { return reference_; }

 private:
  std::vector<TranslationRule> rules_;
  ParameterValues reference_;
};

// Target keypoints G for parameter values gamma. Rules act in declared order on
// the running positions; unselected keypoints are returned unchanged.
std::vector<Vec3> translate_points(const std::vector<Keypoint>& keypoints, const TranslationRuleSet& rules,
                                   const ParameterValues& gamma);

ParameterValues parse_parameters(const nlohmann::json& j, const char* what);

}  // namespace geodiff::scene
