#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>

namespace geodiff::scene {

using ParameterValues = std::map<std::string, double>;

// Arithmetic over named parameters and literals: + - * /, unary minus,
// parentheses. No functions or conditionals.
class Expression {
 public:
  Expression();  // constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double evaluate(const ParameterValues& params) const;
  const std::set<std::string>& variables() const { return variables_; }
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string text);

  std::shared_ptr<const Node> root_;
  std::set<std::string> variables_;
  std::string text_;
};

}  // namespace geodiff::scene
