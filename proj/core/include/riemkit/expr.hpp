#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace riemkit {

enum class NodeKind { number, variable, add, sub, mul, div, neg, pow, func };
enum class Func { sin, cos, exp, log, sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;    // number
  int var = 0;           // variable, zero based (x1 -> 0)
  int exponent = 0;      // pow
  Func func = Func::sin; // func
  std::vector<NodePtr> args;
};

// Immutable expression tree over x1..x8.
class Expression {
 public:
  Expression() = default;
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  const NodePtr& root() const { return root_; }
  bool empty() const { return !root_; }
  // highest variable index used plus one
  int arity() const;

  static Expression constant(double v);
  static Expression variable(int index);

 private:
  NodePtr root_;
};

// Throws SyntaxError (with byte offset), UnknownIdentifier or ArityError.
// Variables beyond max_vars raise UnknownIdentifier.
Expression parse_expression(std::string_view text, int max_vars = 8);

// Canonical text form; parse(print(e)) is structurally equal to e for trees the
// parser can produce.
std::string print_expression(const Expression& e);

bool structurally_equal(const Expression& a, const Expression& b);

// Value with gradient and full Hessian in dim variables.
struct Jet2 {
  int dim = 0;
  double value = 0.0;
  std::array<double, 8> grad{};
  std::array<double, 64> hess{};

  double d(int i) const { return grad[static_cast<std::size_t>(i)]; }
  double dd(int i, int j) const { return hess[static_cast<std::size_t>(i * 8 + j)]; }
};

// Throws DomainError or Overflow.
Jet2 evaluate_jet(const Expression& e, const double* point, int dim);
double evaluate(const Expression& e, const double* point, int dim);

}  // namespace riemkit
