#include "rfmle/expression.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "rfmle/error.hpp"

namespace rfmle::expr {

enum class Op { constant, var_s, var_t, add, sub, mul, div, pow, neg, exp, log, sqrt, sin, cos };

struct Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(lhs), std::move(rhs)});
}

NodePtr constant(double v) { return std::make_shared<const Node>(Node{Op::constant, v, nullptr, nullptr}); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::constant; }

double eval(const Node& n, double s, double t) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::var_s: return s;
    case Op::var_t: return t;
    case Op::add: return eval(*n.lhs, s, t) + eval(*n.rhs, s, t);
    case Op::sub: return eval(*n.lhs, s, t) - eval(*n.rhs, s, t);
    case Op::mul: return eval(*n.lhs, s, t) * eval(*n.rhs, s, t);
    case Op::div: return eval(*n.lhs, s, t) / eval(*n.rhs, s, t);
    case Op::pow: {
      const Node& e = *n.rhs;
      const double base = eval(*n.lhs, s, t);
      if (e.op == Op::constant && e.value == std::round(e.value) && std::abs(e.value) <= 16) {
        const int k = static_cast<int>(e.value);
        double acc = 1.0;
        for (int i = 0; i < std::abs(k); ++i) acc *= base;
        return k < 0 ? 1.0 / acc : acc;
      }
      return std::pow(base, eval(e, s, t));
    }
    case Op::neg: return -eval(*n.lhs, s, t);
    case Op::exp: return std::exp(eval(*n.lhs, s, t));
    case Op::log: return std::log(eval(*n.lhs, s, t));
    case Op::sqrt: return std::sqrt(eval(*n.lhs, s, t));
    case Op::sin: return std::sin(eval(*n.lhs, s, t));
    case Op::cos: return std::cos(eval(*n.lhs, s, t));
  }
  return 0.0;
}

// Constructors with constant folding and the trivial identities.
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make(Op::add, std::move(a), std::move(b));
}
NodePtr neg(NodePtr a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == Op::neg) return a->lhs;
  return make(Op::neg, std::move(a));
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make(Op::sub, std::move(a), std::move(b));
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make(Op::mul, std::move(a), std::move(b));
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(a->value / b->value);
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::div, std::move(a), std::move(b));
}
NodePtr pow(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return constant(std::pow(a->value, b->value));
  if (is_const(b, 0.0)) return constant(1.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::pow, std::move(a), std::move(b));
}

NodePtr diff(const NodePtr& n, Var v) {
  switch (n->op) {
    case Op::constant: return constant(0.0);
    case Op::var_s: return constant(v == Var::s ? 1.0 : 0.0);
    case Op::var_t: return constant(v == Var::t ? 1.0 : 0.0);
    case Op::add: return add(diff(n->lhs, v), diff(n->rhs, v));
    case Op::sub: return sub(diff(n->lhs, v), diff(n->rhs, v));
    case Op::mul:
      return add(mul(diff(n->lhs, v), n->rhs), mul(n->lhs, diff(n->rhs, v)));
    case Op::div:
      return div(sub(mul(diff(n->lhs, v), n->rhs), mul(n->lhs, diff(n->rhs, v))),
                 mul(n->rhs, n->rhs));
    case Op::pow: {
      const NodePtr& base = n->lhs;
      const NodePtr& ex = n->rhs;
      NodePtr dbase = diff(base, v);
      if (is_const(ex)) {
        return mul(mul(ex, pow(base, constant(ex->value - 1.0))), dbase);
      }
      // d(b^e) = b^e (e' log b + e b' / b)
      return mul(n, add(mul(diff(ex, v), make(Op::log, base)), div(mul(ex, dbase), base)));
    }
    case Op::neg: return neg(diff(n->lhs, v));
    case Op::exp: return mul(n, diff(n->lhs, v));
    case Op::log: return div(diff(n->lhs, v), n->lhs);
    case Op::sqrt: return div(diff(n->lhs, v), mul(constant(2.0), n));
    case Op::sin: return mul(make(Op::cos, n->lhs), diff(n->lhs, v));
    case Op::cos: return neg(mul(make(Op::sin, n->lhs), diff(n->lhs, v)));
  }
  return constant(0.0);
}

void print(const Node& n, std::ostream& os) {
  auto bin = [&](const char* op) {
    os << '(';
    print(*n.lhs, os);
    os << op;
    print(*n.rhs, os);
    os << ')';
  };
  auto fn = [&](const char* name) {
    os << name << '(';
    print(*n.lhs, os);
    os << ')';
  };
  switch (n.op) {
    case Op::constant: os << n.value; break;
    case Op::var_s: os << 's'; break;
    case Op::var_t: os << 't'; break;
    case Op::add: bin("+"); break;
    case Op::sub: bin("-"); break;
    case Op::mul: bin("*"); break;
    case Op::div: bin("/"); break;
    case Op::pow: bin("^"); break;
    case Op::neg: os << "(-"; print(*n.lhs, os); os << ')'; break;
    case Op::exp: fn("exp"); break;
    case Op::log: fn("log"); break;
    case Op::sqrt: fn("sqrt"); break;
    case Op::sin: fn("sin"); break;
    case Op::cos: fn("cos"); break;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr n = expression();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const char* what) const {
    std::ostringstream os;
    os << what << " at position " << pos_ << " in \"" << text_ << '"';
    throw Error(Errc::parse_error, os.str());
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = add(n, term());
      else if (accept('-')) n = sub(n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = factor();
    for (;;) {
      if (accept('*')) n = mul(n, factor());
      else if (accept('/')) n = div(n, factor());
      else return n;
    }
  }

  NodePtr factor() {
    if (accept('-')) return neg(factor());
    if (accept('+')) return factor();
    NodePtr base = primary();
    if (accept('^')) return pow(base, factor());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      NodePtr n = expression();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "s") return make(Op::var_s);
      if (name == "t") return make(Op::var_t);
      Op op;
      if (name == "exp") op = Op::exp;
      else if (name == "log") op = Op::log;
      else if (name == "sqrt") op = Op::sqrt;
      else if (name == "sin") op = Op::sin;
      else if (name == "cos") op = Op::cos;
      else {
        pos_ = start;
        fail("unknown identifier");
      }
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = expression();
      if (!accept(')')) fail("expected ')'");
      return make(op, arg);
    }
    fail("unexpected character");
  }

  NodePtr number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return constant(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

double Expr::operator()(double s, double t) const { return eval(*node_, s, t); }

std::string Expr::str() const {
  std::ostringstream os;
  os.precision(17);
  print(*node_, os);
  return os.str();
}

Expr parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr derivative(const Expr& e, Var v) { return Expr(diff(e.handle(), v)); }

}  // namespace rfmle::expr
