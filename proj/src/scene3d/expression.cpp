#include "geodiff/scene3d/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "geodiff/error.hpp"

namespace geodiff::scene {

struct Expression::Node {
  enum class Op { number, variable, neg, add, sub, mul, div };
  Op op = Op::number;
  double value = 0.0;
  std::string name;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := '-' unary | '+' unary | atom
// atom   := number | identifier | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& text, std::set<std::string>& vars) : s_(text), vars_(vars) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  static NodePtr binary(Node::Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (eat('+'))
        n = binary(Node::Op::add, n, term());
      else if (eat('-'))
        n = binary(Node::Op::sub, n, term());
      else
        return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (eat('*'))
        n = binary(Node::Op::mul, n, unary());
      else if (eat('/'))
        n = binary(Node::Op::div, n, unary());
      else
        return n;
    }
  }
  NodePtr unary() {
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::neg;
      n->lhs = unary();
      return n;
    }
    if (eat('+')) return unary();
    return atom();
  }
  NodePtr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      NodePtr n = expr();
      if (!eat(')')) fail("missing ')'");
      return n;
    }
    const char c = s_[pos_];
    auto n = std::make_shared<Node>();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.data() + pos_;
      auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), n->value);
      if (ec != std::errc()) fail("bad number");
      pos_ += static_cast<std::size_t>(ptr - begin);
      n->op = Node::Op::number;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      n->op = Node::Op::variable;
      n->name = s_.substr(start, pos_ - start);
      vars_.insert(n->name);
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::set<std::string>& vars_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const ParameterValues& p, const std::string& text) {
  switch (n.op) {
    case Node::Op::number:
      return n.value;
    case Node::Op::variable: {
      const auto it = p.find(n.name);
      if (it == p.end()) throw InputError("expression '" + text + "': missing parameter '" + n.name + "'");
      return it->second;
    }
    case Node::Op::neg:
      return -eval(*n.lhs, p, text);
    case Node::Op::add:
      return eval(*n.lhs, p, text) + eval(*n.rhs, p, text);
    case Node::Op::sub:
      return eval(*n.lhs, p, text) - eval(*n.rhs, p, text);
    case Node::Op::mul:
      return eval(*n.lhs, p, text) * eval(*n.rhs, p, text);
    case Node::Op::div: {
      const double d = eval(*n.rhs, p, text);
      if (d == 0.0) throw NumericError("expression '" + text + "': division by zero");
      return eval(*n.lhs, p, text) / d;
    }
  }
  return 0.0;
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression::Expression() : Expression(constant(0.0)) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->value = value;
  std::ostringstream s;
  s << value;
  return Expression(std::move(n), s.str());
}

Expression Expression::parse(const std::string& text) {
  std::set<std::string> vars;
  Expression e(Parser(text, vars).parse(), text);
  e.variables_ = std::move(vars);
  return e;
}

double Expression::evaluate(const ParameterValues& params) const {
  const double v = eval(*root_, params, text_);
  if (!std::isfinite(v)) throw NumericError("expression '" + text_ + "' evaluated to a non-finite value");
  return v;
}

}  // namespace geodiff::scene
