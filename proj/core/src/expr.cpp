#include "riemkit/expr.hpp"

#include "riemkit/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace riemkit {

namespace {

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::number;
  n->value = v;
  return n;
}

NodePtr make_variable(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->var = index;
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = {std::move(a), std::move(b)};
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, int max_vars) : text_(text), max_vars_(max_vars) {}

  NodePtr run() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  int max_vars_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError, what, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      NodePtr rhs = parse_term();
      lhs = make_binary(c == '+' ? NodeKind::add : NodeKind::sub, lhs, rhs);
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      NodePtr rhs = parse_factor();
      lhs = make_binary(c == '*' ? NodeKind::mul : NodeKind::div, lhs, rhs);
    }
  }

  NodePtr parse_factor() {
    if (peek() == '-') {
      ++pos_;
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::neg;
      n->args = {parse_factor()};
      return n;
    }
    NodePtr base = parse_atom();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      bool negative = false;
      if (pos_ < text_.size() && text_[pos_] == '-') {
        negative = true;
        ++pos_;
      }
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("integer exponent expected");
      long value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + (text_[pos_] - '0');
        if (value > 1000) {
          pos_ = start;
          fail("exponent too large");
        }
        ++pos_;
      }
      auto n = std::make_shared<Node>();
      n->kind = NodeKind::pow;
      n->exponent = static_cast<int>(negative ? -value : value);
      n->args = {base};
      return n;
    }
    return base;
  }

  NodePtr parse_number() {
    std::size_t start = pos_;
    std::size_t i = pos_;
    bool digits = false;
    while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
      ++i;
      digits = true;
    }
    if (i < text_.size() && text_[i] == '.') {
      ++i;
      while (i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]))) {
        ++i;
        digits = true;
      }
    }
    if (!digits) fail("malformed number");
    if (i < text_.size() && (text_[i] == 'e' || text_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < text_.size() && (text_[j] == '+' || text_[j] == '-')) ++j;
      if (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) {
        while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        i = j;
      } else {
        pos_ = j;
        fail("malformed exponent");
      }
    }
    std::string token(text_.substr(start, i - start));
    pos_ = i;
    double v = std::strtod(token.c_str(), nullptr);
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return make_number(v);
  }

  NodePtr parse_atom() {
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (peek() != ')') fail("')' expected");
      ++pos_;
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '8') {
        int index = name[1] - '1';
        if (index >= max_vars_)
          throw Error(ErrorCode::UnknownIdentifier,
                      "'" + name + "' exceeds chart dimension " + std::to_string(max_vars_), start);
        return make_variable(index);
      }
      static const struct {
        const char* name;
        Func func;
      } table[] = {{"sin", Func::sin}, {"cos", Func::cos}, {"exp", Func::exp},
                   {"log", Func::log}, {"sqrt", Func::sqrt}};
      for (const auto& entry : table) {
        if (name != entry.name) continue;
        if (peek() != '(') fail("'(' expected after function name");
        ++pos_;
        std::vector<NodePtr> args{parse_expr()};
        while (peek() == ',') {
          ++pos_;
          args.push_back(parse_expr());
        }
        if (peek() != ')') fail("')' expected");
        ++pos_;
        if (args.size() != 1)
          throw Error(ErrorCode::ArityError,
                      name + " takes 1 argument, got " + std::to_string(args.size()), start);
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::func;
        n->func = entry.func;
        n->args = std::move(args);
        return n;
      }
      throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + name + "'", start);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::add:
    case NodeKind::sub: return 1;
    case NodeKind::mul:
    case NodeKind::div: return 2;
    case NodeKind::neg: return 3;
    case NodeKind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest form that survives a round trip
  for (int digits = 1; digits <= 17; ++digits) {
    char trial[64];
    std::snprintf(trial, sizeof trial, "%.*g", digits, v);
    if (std::strtod(trial, nullptr) == v) return trial;
  }
  return buf;
}

void print_node(const Node& n, std::string& out);

void print_wrapped(const Node& n, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print_node(n, out);
  if (wrap) out += ')';
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::number:
      if (n.value < 0 || std::signbit(n.value)) {
        out += '(' + format_number(n.value) + ')';
      } else {
        out += format_number(n.value);
      }
      return;
    case NodeKind::variable:
      out += 'x';
      out += static_cast<char>('1' + n.var);
      return;
    case NodeKind::add:
    case NodeKind::sub:
    case NodeKind::mul:
    case NodeKind::div: {
      int p = precedence(n);
      const Node& a = *n.args[0];
      const Node& b = *n.args[1];
      print_wrapped(a, precedence(a) < p, out);
      out += n.kind == NodeKind::add ? "+" : n.kind == NodeKind::sub ? "-" : n.kind == NodeKind::mul ? "*" : "/";
      // a unary minus is a valid right operand, anything looser needs parens
      print_wrapped(b, precedence(b) <= p && b.kind != NodeKind::neg, out);
      return;
    }
    case NodeKind::neg: {
      const Node& a = *n.args[0];
      out += '-';
      print_wrapped(a, precedence(a) < 3, out);
      return;
    }
    case NodeKind::pow: {
      const Node& a = *n.args[0];
      bool atom = precedence(a) == 5 && !(a.kind == NodeKind::number && std::signbit(a.value));
      print_wrapped(a, !atom, out);
      out += '^';
      out += std::to_string(n.exponent);
      return;
    }
    case NodeKind::func:
      out += func_name(n.func);
      out += '(';
      print_node(*n.args[0], out);
      out += ')';
      return;
  }
}

bool nodes_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      if (a.value != b.value) return false;
      break;
    case NodeKind::variable:
      if (a.var != b.var) return false;
      break;
    case NodeKind::pow:
      if (a.exponent != b.exponent) return false;
      break;
    case NodeKind::func:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!nodes_equal(*a.args[i], *b.args[i])) return false;
  return true;
}

int max_var(const Node& n) {
  int m = n.kind == NodeKind::variable ? n.var + 1 : 0;
  for (const auto& c : n.args) m = std::max(m, max_var(*c));
  return m;
}

// f(u) with f, f', f'' given
Jet2 chain(const Jet2& u, double f, double df, double ddf) {
  Jet2 r;
  r.dim = u.dim;
  r.value = f;
  for (int i = 0; i < u.dim; ++i) r.grad[i] = df * u.grad[i];
  for (int i = 0; i < u.dim; ++i)
    for (int j = 0; j < u.dim; ++j)
      r.hess[i * 8 + j] = df * u.hess[i * 8 + j] + ddf * u.grad[i] * u.grad[j];
  return r;
}

void check_finite(const Jet2& r) {
  bool ok = std::isfinite(r.value);
  for (int i = 0; i < r.dim && ok; ++i) ok = std::isfinite(r.grad[i]);
  for (int i = 0; i < r.dim * 8 && ok; ++i) ok = std::isfinite(r.hess[i]);
  if (!ok) throw Error(ErrorCode::Overflow, "non-finite value during evaluation");
}

Jet2 jet(const Node& n, const double* x, int dim) {
  Jet2 r;
  r.dim = dim;
  switch (n.kind) {
    case NodeKind::number:
      r.value = n.value;
      return r;
    case NodeKind::variable:
      if (n.var >= dim) throw Error(ErrorCode::UnknownIdentifier, "variable outside chart dimension");
      r.value = x[n.var];
      r.grad[n.var] = 1.0;
      return r;
    case NodeKind::add:
    case NodeKind::sub: {
      Jet2 a = jet(*n.args[0], x, dim);
      Jet2 b = jet(*n.args[1], x, dim);
      double s = n.kind == NodeKind::add ? 1.0 : -1.0;
      r.value = a.value + s * b.value;
      for (int i = 0; i < dim; ++i) r.grad[i] = a.grad[i] + s * b.grad[i];
      for (int i = 0; i < dim * 8; ++i) r.hess[i] = a.hess[i] + s * b.hess[i];
      check_finite(r);
      return r;
    }
    case NodeKind::mul: {
      Jet2 a = jet(*n.args[0], x, dim);
      Jet2 b = jet(*n.args[1], x, dim);
      r.value = a.value * b.value;
      for (int i = 0; i < dim; ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          r.hess[i * 8 + j] = a.value * b.hess[i * 8 + j] + b.value * a.hess[i * 8 + j] +
                              a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
      check_finite(r);
      return r;
    }
    case NodeKind::div: {
      Jet2 a = jet(*n.args[0], x, dim);
      Jet2 b = jet(*n.args[1], x, dim);
      if (std::fabs(b.value) < 1e-300) throw Error(ErrorCode::DomainError, "division by zero");
      double inv = 1.0 / b.value;
      Jet2 ib = chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
      r.value = a.value * ib.value;
      for (int i = 0; i < dim; ++i) r.grad[i] = a.value * ib.grad[i] + ib.value * a.grad[i];
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          r.hess[i * 8 + j] = a.value * ib.hess[i * 8 + j] + ib.value * a.hess[i * 8 + j] +
                              a.grad[i] * ib.grad[j] + ib.grad[i] * a.grad[j];
      check_finite(r);
      return r;
    }
    case NodeKind::neg: {
      Jet2 a = jet(*n.args[0], x, dim);
      a.value = -a.value;
      for (int i = 0; i < dim; ++i) a.grad[i] = -a.grad[i];
      for (int i = 0; i < dim * 8; ++i) a.hess[i] = -a.hess[i];
      return a;
    }
    case NodeKind::pow: {
      Jet2 a = jet(*n.args[0], x, dim);
      int k = n.exponent;
      if (k == 0) {
        r.value = 1.0;
        return r;
      }
      if (k < 0 && std::fabs(a.value) < 1e-300)
        throw Error(ErrorCode::DomainError, "negative power of zero");
      double u = a.value;
      double f = std::pow(u, k);
      double df = k * (k == 1 ? 1.0 : std::pow(u, k - 1));
      double ddf = (k == 1) ? 0.0 : k * (k - 1) * (k == 2 ? 1.0 : std::pow(u, k - 2));
      r = chain(a, f, df, ddf);
      check_finite(r);
      return r;
    }
    case NodeKind::func: {
      Jet2 a = jet(*n.args[0], x, dim);
      double u = a.value;
      switch (n.func) {
        case Func::sin: r = chain(a, std::sin(u), std::cos(u), -std::sin(u)); break;
        case Func::cos: r = chain(a, std::cos(u), -std::sin(u), -std::cos(u)); break;
        case Func::exp: {
          double e = std::exp(u);
          r = chain(a, e, e, e);
          break;
        }
        case Func::log:
          if (u < 1e-300) throw Error(ErrorCode::DomainError, "log of non-positive value");
          r = chain(a, std::log(u), 1.0 / u, -1.0 / (u * u));
          break;
        case Func::sqrt: {
          if (u < 1e-300) throw Error(ErrorCode::DomainError, "sqrt of non-positive value");
          double s = std::sqrt(u);
          r = chain(a, s, 0.5 / s, -0.25 / (s * u));
          break;
        }
      }
      check_finite(r);
      return r;
    }
  }
  return r;
}

double value(const Node& n, const double* x, int dim) {
  switch (n.kind) {
    case NodeKind::number: return n.value;
    case NodeKind::variable:
      if (n.var >= dim) throw Error(ErrorCode::UnknownIdentifier, "variable outside chart dimension");
      return x[n.var];
    case NodeKind::add: return value(*n.args[0], x, dim) + value(*n.args[1], x, dim);
    case NodeKind::sub: return value(*n.args[0], x, dim) - value(*n.args[1], x, dim);
    case NodeKind::mul: return value(*n.args[0], x, dim) * value(*n.args[1], x, dim);
    case NodeKind::div: {
      double b = value(*n.args[1], x, dim);
      if (std::fabs(b) < 1e-300) throw Error(ErrorCode::DomainError, "division by zero");
      return value(*n.args[0], x, dim) / b;
    }
    case NodeKind::neg: return -value(*n.args[0], x, dim);
    case NodeKind::pow: {
      double u = value(*n.args[0], x, dim);
      if (n.exponent < 0 && std::fabs(u) < 1e-300)
        throw Error(ErrorCode::DomainError, "negative power of zero");
      return std::pow(u, n.exponent);
    }
    case NodeKind::func: {
      double u = value(*n.args[0], x, dim);
      switch (n.func) {
        case Func::sin: return std::sin(u);
        case Func::cos: return std::cos(u);
        case Func::exp: return std::exp(u);
        case Func::log:
          if (u < 1e-300) throw Error(ErrorCode::DomainError, "log of non-positive value");
          return std::log(u);
        case Func::sqrt:
          if (u < 1e-300) throw Error(ErrorCode::DomainError, "sqrt of non-positive value");
          return std::sqrt(u);
      }
    }
  }
  return 0.0;
}

}  // namespace

int Expression::arity() const { return root_ ? max_var(*root_) : 0; }

Expression Expression::constant(double v) { return Expression(make_number(v)); }

Expression Expression::variable(int index) { return Expression(make_variable(index)); }

Expression parse_expression(std::string_view text, int max_vars) {
  Parser p(text, max_vars);
  return Expression(p.run());
}

std::string print_expression(const Expression& e) {
  std::string out;
  if (e.root()) print_node(*e.root(), out);
  return out;
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (!a.root() || !b.root()) return !a.root() && !b.root();
  return nodes_equal(*a.root(), *b.root());
}

Jet2 evaluate_jet(const Expression& e, const double* point, int dim) {
  if (dim > 8) throw Error(ErrorCode::BadParams, "dimension above 8");
  return jet(*e.root(), point, dim);
}

double evaluate(const Expression& e, const double* point, int dim) {
  double v = value(*e.root(), point, dim);
  if (!std::isfinite(v)) throw Error(ErrorCode::Overflow, "non-finite value during evaluation");
  return v;
}

}  // namespace riemkit
