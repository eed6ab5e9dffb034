#include "geodiff/scene3d/translation.hpp"

#include <Eigen/Geometry>

#include "geodiff/error.hpp"

namespace geodiff::scene {
namespace {

using nlohmann::json;

Expression expression_from(const json& j, const std::string& where) {
  if (j.is_number()) return Expression::constant(j.get<double>());
  if (j.is_string()) return Expression::parse(j.get<std::string>());
  throw InputError(where + " must be a number or an expression string");
}

std::array<Expression, 3> triple_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw InputError(where + " must be a list of three expressions");
  return {expression_from(j[0], where), expression_from(j[1], where), expression_from(j[2], where)};
}

Vec3 vector_from(const json& j, const std::string& where) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "x") return Vec3::UnitX();
    if (s == "y") return Vec3::UnitY();
    if (s == "z") return Vec3::UnitZ();
    throw InputError(where + ": axis must be x, y, z or [a, b, c]");
  }
  if (!j.is_array() || j.size() != 3) throw InputError(where + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Vec3 unit_axis(const json& j, const std::string& where) {
  const Vec3 a = vector_from(j, where);
  const double n = a.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError(where + ": axis must be non-zero");
  return a / n;
}

std::vector<const Expression*> expressions_of(const TranslationRule& r) {
  std::vector<const Expression*> out;
  switch (r.kind) {
    case TranslationRule::Kind::translate:
      out.push_back(&r.amount);
      break;
    case TranslationRule::Kind::scale_about:
      out.push_back(&r.factor);
      break;
    case TranslationRule::Kind::displace:
      for (const auto& e : r.offset) out.push_back(&e);
      for (const auto& [_, triple] : r.per_point)
        for (const auto& e : triple) out.push_back(&e);
      break;
  }
  return out;
}

Vec3 displacement(const TranslationRule& r, const std::string& name, const Vec3& p, const ParameterValues& gamma) {
  switch (r.kind) {
    case TranslationRule::Kind::translate:
      return r.amount.evaluate(gamma) * r.axis;
    case TranslationRule::Kind::scale_about:
      return (r.factor.evaluate(gamma) - 1.0) * (p - r.anchor).dot(r.axis) * r.axis;
    case TranslationRule::Kind::displace: {
      const auto it = r.per_point.find(name);
      const auto& triple = it != r.per_point.end() ? it->second : r.offset;
      return {triple[0].evaluate(gamma), triple[1].evaluate(gamma), triple[2].evaluate(gamma)};
    }
  }
  return Vec3::Zero();
}

}  // namespace

ParameterValues parse_parameters(const nlohmann::json& j, const char* what) {
  if (j.is_null()) return {};
  if (!j.is_object()) throw InputError(std::string(what) + " must be an object of name -> number");
  ParameterValues out;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number()) throw InputError(std::string(what) + " '" + name + "' must be a number");
    out[name] = value.get<double>();
  }
  return out;
}

TranslationRuleSet::TranslationRuleSet(std::vector<TranslationRule> rules, ParameterValues reference,
                                       const std::vector<Keypoint>& keypoints)
    : rules_(std::move(rules)), reference_(std::move(reference)) {
  auto known = [&](const std::string& name) {
    for (const auto& k : keypoints)
      if (k.name == name) return true;
    return false;
  };
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    const std::string where = "rule " + std::to_string(i);
    if (r.selector.empty()) throw InputError(where + ": empty selector");
    for (const auto& name : r.selector)
      if (!known(name)) throw InputError(where + " selects unknown keypoint '" + name + "'");
    for (const auto& [name, _] : r.per_point)
      if (!known(name)) throw InputError(where + " displaces unknown keypoint '" + name + "'");
    for (const Expression* e : expressions_of(r))
      for (const auto& v : e->variables())
        if (!reference_.contains(v)) throw InputError(where + " uses undeclared parameter '" + v + "'");
    // identity at the reference values
    for (const auto& name : r.selector) {
      const Vec3 d = displacement(r, name, Vec3::Zero(), reference_);
      const bool identity = r.kind == TranslationRule::Kind::scale_about ? r.factor.evaluate(reference_) == 1.0
                                                                         : d.isZero(0.0);
      if (!identity) throw InputError(where + " does not reduce to the identity at the reference parameter values");
    }
  }
}

TranslationRuleSet TranslationRuleSet::from_json(const nlohmann::json& parameters, const nlohmann::json& rules,
                                                 const std::vector<Keypoint>& keypoints) {
  ParameterValues reference = parse_parameters(parameters, "parameter");
  std::vector<TranslationRule> out;
  if (!rules.is_null() && !rules.is_array()) throw InputError("rules must be an array");
  try {
    for (std::size_t i = 0; i < (rules.is_array() ? rules.size() : 0); ++i) {
      const auto& rj = rules[i];
      const std::string where = "rule " + std::to_string(i);
      if (!rj.is_object() || !rj.contains("select") || !rj["select"].is_array()) {
        throw InputError(where + " needs a 'select' list of keypoint names");
      }
      TranslationRule r;
      for (const auto& n : rj["select"]) r.selector.push_back(n.get<std::string>());
      if (rj.contains("translate")) {
        const auto& t = rj["translate"];
        r.kind = TranslationRule::Kind::translate;
        r.axis = unit_axis(t.at("axis"), where + ".translate.axis");
        r.amount = expression_from(t.at("amount"), where + ".translate.amount");
      } else if (rj.contains("scale_about")) {
        const auto& s = rj["scale_about"];
        r.kind = TranslationRule::Kind::scale_about;
        r.anchor = vector_from(s.at("anchor"), where + ".scale_about.anchor");
        r.axis = unit_axis(s.at("axis"), where + ".scale_about.axis");
        r.factor = expression_from(s.at("factor"), where + ".scale_about.factor");
      } else if (rj.contains("displace")) {
        const auto& d = rj["displace"];
        r.kind = TranslationRule::Kind::displace;
        r.offset = {Expression::constant(0), Expression::constant(0), Expression::constant(0)};
        if (d.contains("offset")) r.offset = triple_from(d["offset"], where + ".displace.offset");
        if (d.contains("per_point")) {
          for (const auto& [name, triple] : d["per_point"].items())
            r.per_point.emplace(name, triple_from(triple, where + ".displace.per_point." + name));
        }
      } else {
        throw InputError(where + " needs one of translate, scale_about, displace");
      }
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("rules: ") + e.what());
  }
  return TranslationRuleSet(std::move(out), std::move(reference), keypoints);
}

std::vector<Vec3> translate_points(const std::vector<Keypoint>& keypoints, const TranslationRuleSet& rules,
                                   const ParameterValues& gamma) {
  for (const auto& [name, _] : rules.reference())
    if (!gamma.contains(name)) throw InputError("missing value for parameter '" + name + "'");
  for (const auto& [name, _] : gamma)
    if (!rules.reference().contains(name)) throw InputError("unknown parameter '" + name + "'");

  std::vector<Vec3> g;
  g.reserve(keypoints.size());
  for (const auto& k : keypoints) g.push_back(k.position);
  for (const auto& rule : rules.rules()) {
    for (const auto& name : rule.selector) {
      std::size_t idx = keypoints.size();
      for (std::size_t i = 0; i < keypoints.size(); ++i)
        if (keypoints[i].name == name) idx = i;
      if (idx == keypoints.size()) throw InputError("rule selects unknown keypoint '" + name + "'");
      g[idx] += displacement(rule, name, g[idx], gamma);
    }
  }
  return g;
}

}  // namespace geodiff::scene
