#pragma once

// Scalar functions of one real variable written in a small expression
// language, e.g. `sgn(x)*indicator[-1,1]`.
//
// Grammar (whitespace is insignificant):
//
//   expr     := term { ("+" | "-") term }
//   term     := unary { ("*" | "/") unary }
//   unary    := "-" unary | primary
//   primary  := number | "x" | "(" expr ")"
//             | func "(" expr ")" | func2 "(" expr "," expr ")"
//             | literal [ "(" expr ")" ]
//   func     := "abs" | "sgn" | "exp" | "sin" | "cos"
//   func2    := "min" | "max"
//   literal  := "indicator" "[" snum "," snum "]"
//             | "piecewise_linear" "[" knot { "," knot } "]"
//             | "polynomial" "[" snum { "," snum } "]"
//   knot     := "(" snum "," snum ")"
//   snum     := [ "+" | "-" ] number
//   number   := digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
//
// A literal without an argument is applied to `x`; `literal(expr)` applies it
// to `expr`. Composition in general is expressed by substitution (see
// `compose`).

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synchrosde {

enum class Op {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Abs,
  Sgn,
  Min,
  Max,
  Exp,
  Sin,
  Cos,
  Polynomial,
  Indicator,
  PiecewiseLinear,
};

struct Knot {
  double x;
  double y;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree node. Subtrees may be shared.
struct Node {
  Op op = Op::Const;
  double value = 0.0;           // Const
  std::vector<double> params;   // Polynomial coefficients c0..cn; Indicator {a, b}
  std::vector<Knot> knots;      // PiecewiseLinear, strictly increasing in x
  std::vector<NodePtr> args;
};

/// Optional metadata a user may assert about a function; it takes precedence
/// over grid estimates wherever constants are computed.
struct DeclaredMetadata {
  std::optional<double> sup_norm;
  std::optional<double> lipschitz;
  std::optional<double> support_radius;
  std::optional<double> l1_norm;

  bool empty() const {
    return !sup_norm && !lipschitz && !support_radius && !l1_norm;
  }
};

class FunctionDescriptor {
 public:
  FunctionDescriptor();  // constant zero
  explicit FunctionDescriptor(NodePtr root, DeclaredMetadata declared = {});

  double operator()(double x) const;

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const DeclaredMetadata& declared() const { return declared_; }
  FunctionDescriptor with_declared(DeclaredMetadata declared) const;

  /// Parseable text; re-parsing evaluates identically.
  std::string to_string() const;

  /// Points where the function or its derivative may jump, as far as the
  /// tree shows (sgn/abs/indicator/piecewise knots of affine arguments and
  /// min/max crossings of affine branches). Sorted, unique.
  std::vector<double> breakpoints() const;

  /// Radius r with f(x) = 0 for |x| > r when the tree proves it; nullopt when
  /// support cannot be proven compact.
  std::optional<double> proven_support_radius() const;

  /// Closed-form upper bound on the tail mass of |f| beyond radius R
  /// (both sides together), when the tree admits one.
  std::optional<double> tail_mass_bound(double R) const;

  /// True when the tree is the literal constant 0.
  bool is_literal_zero() const;

 private:
  NodePtr root_;
  DeclaredMetadata declared_;
};

/// Parse expression text. Throws ParseError with the byte offset.
FunctionDescriptor parse(std::string_view text);

/// Pointwise value. sgn(0) = 0; piecewise_linear is constant beyond its end
/// knots; indicator[a,b] is 1 on the closed interval. Throws DomainError on
/// division by zero.
double evaluate(const FunctionDescriptor& f, double x);
double evaluate(const Node& node, double x);

std::string print(const Node& node);

/// Tree builders.
namespace expr {
NodePtr constant(double c);
NodePtr var();
NodePtr unary(Op op, NodePtr a);
NodePtr binary(Op op, NodePtr a, NodePtr b);
NodePtr polynomial(std::vector<double> coeffs, NodePtr arg = var());
NodePtr indicator(double a, double b, NodePtr arg = var());
NodePtr piecewise_linear(std::vector<Knot> knots, NodePtr arg = var());

/// outer with every occurrence of x replaced by inner.
NodePtr compose(const NodePtr& outer, const NodePtr& inner);
}  // namespace expr

/// f∘g as a descriptor (metadata is dropped).
FunctionDescriptor compose(const FunctionDescriptor& outer,
                           const FunctionDescriptor& inner);

/// Shortest decimal representation that round-trips.
std::string format_real(double v);

}  // namespace synchrosde
