#include "hessgeo/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "hessgeo/errors.hpp"

namespace hessgeo {

enum class Op { kConst, kVar, kNeg, kAdd, kSub, kMul, kDiv, kPow, kFunc };
enum class Fn { kSqrt, kExp, kLog, kSin, kCos, kTan, kSinh, kCosh, kTanh, kAbs };

struct Expression::Node {
  Op op = Op::kConst;
  double value = 0.0;
  int var = 0;
  Fn fn = Fn::kSqrt;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct FnName {
  const char* name;
  Fn fn;
};
constexpr FnName kFunctions[] = {
    {"sqrt", Fn::kSqrt}, {"exp", Fn::kExp},   {"log", Fn::kLog},   {"sin", Fn::kSin},
    {"cos", Fn::kCos},   {"tan", Fn::kTan},   {"sinh", Fn::kSinh}, {"cosh", Fn::kCosh},
    {"tanh", Fn::kTanh}, {"abs", Fn::kAbs},
};

const char* fn_name(Fn fn) {
  for (const auto& f : kFunctions) {
    if (f.fn == fn) return f.name;
  }
  return "?";
}

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr cnst(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

NodePtr var(int i) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::kVar;
  n->var = i;
  return n;
}

NodePtr func(Fn fn, NodePtr a) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::kFunc;
  n->fn = fn;
  n->a = std::move(a);
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::kConst && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::kConst; }

double apply(Fn fn, double x) {
  switch (fn) {
    case Fn::kSqrt: return std::sqrt(x);
    case Fn::kExp: return std::exp(x);
    case Fn::kLog: return std::log(x);
    case Fn::kSin: return std::sin(x);
    case Fn::kCos: return std::cos(x);
    case Fn::kTan: return std::tan(x);
    case Fn::kSinh: return std::sinh(x);
    case Fn::kCosh: return std::cosh(x);
    case Fn::kTanh: return std::tanh(x);
    case Fn::kAbs: return std::abs(x);
  }
  return 0.0;
}

// Simplifying constructors keep derivative trees small.
NodePtr neg(NodePtr a) {
  if (is_const(a)) return cnst(-a->value);
  if (a->op == Op::kNeg) return a->a;
  return make(Op::kNeg, std::move(a));
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return cnst(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make(Op::kAdd, std::move(a), std::move(b));
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return cnst(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return make(Op::kSub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return cnst(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return cnst(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return neg(std::move(b));
  if (is_const(b, -1.0)) return neg(std::move(a));
  return make(Op::kMul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return cnst(a->value / b->value);
  if (is_const(a, 0.0)) return cnst(0.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::kDiv, std::move(a), std::move(b));
}

NodePtr pow(NodePtr a, NodePtr b) {
  if (is_const(a) && is_const(b)) return cnst(std::pow(a->value, b->value));
  if (is_const(b, 0.0)) return cnst(1.0);
  if (is_const(b, 1.0)) return a;
  return make(Op::kPow, std::move(a), std::move(b));
}

double eval(const Expression::Node& n, std::span<const double> x) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar:
      if (n.var >= static_cast<int>(x.size())) {
        throw DomainError("expression uses x" + std::to_string(n.var + 1) + " but only " +
                          std::to_string(x.size()) + " coordinates given");
      }
      return x[n.var];
    case Op::kNeg: return -eval(*n.a, x);
    case Op::kAdd: return eval(*n.a, x) + eval(*n.b, x);
    case Op::kSub: return eval(*n.a, x) - eval(*n.b, x);
    case Op::kMul: return eval(*n.a, x) * eval(*n.b, x);
    case Op::kDiv: return eval(*n.a, x) / eval(*n.b, x);
    case Op::kPow: {
      const double base = eval(*n.a, x);
      if (n.b->op == Op::kConst && n.b->value == 2.0) return base * base;
      return std::pow(base, eval(*n.b, x));
    }
    case Op::kFunc: return apply(n.fn, eval(*n.a, x));
  }
  return 0.0;
}

NodePtr diff(const NodePtr& n, int v) {
  switch (n->op) {
    case Op::kConst: return cnst(0.0);
    case Op::kVar: return cnst(n->var == v ? 1.0 : 0.0);
    case Op::kNeg: return neg(diff(n->a, v));
    case Op::kAdd: return add(diff(n->a, v), diff(n->b, v));
    case Op::kSub: return sub(diff(n->a, v), diff(n->b, v));
    case Op::kMul: return add(mul(diff(n->a, v), n->b), mul(n->a, diff(n->b, v)));
    case Op::kDiv:
      return div(sub(mul(diff(n->a, v), n->b), mul(n->a, diff(n->b, v))), mul(n->b, n->b));
    case Op::kPow: {
      const NodePtr da = diff(n->a, v);
      if (is_const(n->b)) {
        return mul(mul(n->b, pow(n->a, cnst(n->b->value - 1.0))), da);
      }
      const NodePtr db = diff(n->b, v);
      // d(a^b) = a^b (b' log a + b a'/a)
      return mul(n, add(mul(db, func(Fn::kLog, n->a)), div(mul(n->b, da), n->a)));
    }
    case Op::kFunc: {
      const NodePtr& a = n->a;
      const NodePtr da = diff(a, v);
      if (is_const(da, 0.0)) return cnst(0.0);
      NodePtr outer;
      switch (n->fn) {
        case Fn::kSqrt: outer = div(cnst(0.5), n); break;
        case Fn::kExp: outer = n; break;
        case Fn::kLog: outer = div(cnst(1.0), a); break;
        case Fn::kSin: outer = func(Fn::kCos, a); break;
        case Fn::kCos: outer = neg(func(Fn::kSin, a)); break;
        case Fn::kTan: outer = add(cnst(1.0), mul(n, n)); break;
        case Fn::kSinh: outer = func(Fn::kCosh, a); break;
        case Fn::kCosh: outer = func(Fn::kSinh, a); break;
        case Fn::kTanh: outer = sub(cnst(1.0), mul(n, n)); break;
        case Fn::kAbs: outer = div(a, n); break;
      }
      return mul(outer, da);
    }
  }
  return cnst(0.0);
}

int max_var(const Expression::Node& n) {
  int m = n.op == Op::kVar ? n.var : -1;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

void print(const Expression::Node& n, std::ostringstream& os) {
  switch (n.op) {
    case Op::kConst: os << n.value; return;
    case Op::kVar: os << 'x' << n.var + 1; return;
    case Op::kNeg: os << "(-"; print(*n.a, os); os << ')'; return;
    case Op::kFunc: os << fn_name(n.fn) << '('; print(*n.a, os); os << ')'; return;
    default: break;
  }
  const char sym = n.op == Op::kAdd ? '+' : n.op == Op::kSub ? '-' : n.op == Op::kMul ? '*'
                 : n.op == Op::kDiv ? '/' : '^';
  os << '(';
  print(*n.a, os);
  os << ' ' << sym << ' ';
  print(*n.b, os);
  os << ')';
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + what +
                     " in \"" + std::string(s_) + "\"");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+')) lhs = add(lhs, term());
      else if (eat('-')) lhs = sub(lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*')) lhs = mul(lhs, unary());
      else if (eat('/')) lhs = div(lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return neg(unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return pow(base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("bad number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return cnst(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));

    if (id == "pi") return cnst(std::numbers::pi);
    if (id == "e") return cnst(std::numbers::e);
    if (id == "x") return var(0);
    if (id == "y") return var(1);
    if (id == "z") return var(2);
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::stoi(id.substr(1));
      if (k < 1) fail("variable indices start at x1");
      return var(k - 1);
    }
    if (id == "pow") {
      if (!eat('(')) fail("expected '(' after pow");
      NodePtr a = expr();
      if (!eat(',')) fail("pow takes two arguments");
      NodePtr b = expr();
      if (!eat(')')) fail("expected ')'");
      return pow(a, b);
    }
    for (const auto& f : kFunctions) {
      if (id == f.name) {
        if (!eat('(')) fail("expected '(' after " + id);
        NodePtr a = expr();
        if (!eat(')')) fail("expected ')'");
        if (is_const(a)) return cnst(apply(f.fn, a->value));
        return func(f.fn, a);
      }
    }
    pos_ = start;
    fail("unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : node_(cnst(0.0)) {}
Expression Expression::constant(double v) { return Expression(cnst(v)); }
Expression Expression::variable(int index) {
  if (index < 0) throw DomainError("negative variable index");
  return Expression(var(index));
}
Expression Expression::parse(std::string_view text) { return Expression(Parser(text).run()); }

double Expression::eval(std::span<const double> x) const { return hessgeo::eval(*node_, x); }
Expression Expression::derivative(int v) const { return Expression(diff(node_, v)); }
int Expression::max_variable() const { return max_var(*node_); }

std::string Expression::str() const {
  std::ostringstream os;
  os.precision(17);
  print(*node_, os);
  return os.str();
}

Expression operator+(const Expression& a, const Expression& b) { return Expression(add(a.node_, b.node_)); }
Expression operator-(const Expression& a, const Expression& b) { return Expression(sub(a.node_, b.node_)); }
Expression operator*(const Expression& a, const Expression& b) { return Expression(mul(a.node_, b.node_)); }
Expression operator/(const Expression& a, const Expression& b) { return Expression(div(a.node_, b.node_)); }
Expression operator-(const Expression& a) { return Expression(neg(a.node_)); }

}  // namespace hessgeo
