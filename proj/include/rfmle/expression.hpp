#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace rfmle::expr {

enum class Var { s, t };

struct Node;

/// Immutable expression tree over the variables s and t.
///
/// Grammar: numbers, s, t, + - * / ^ (right associative), unary minus,
/// parentheses and the functions exp, log, sqrt, sin, cos.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  double operator()(double s, double t) const;
  std::string str() const;
  const std::shared_ptr<const Node>& handle() const { return node_; }
  bool empty() const { return !node_; }

 private:
  std::shared_ptr<const Node> node_;
};

/// Throws rfmle::Error(parse_error) with the offending position.
Expr parse(std::string_view text);

/// Symbolic partial derivative with light constant folding.
Expr derivative(const Expr& e, Var v);

}  // namespace rfmle::expr
