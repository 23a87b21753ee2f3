#include "synchrosde/funcspec.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "synchrosde/errors.hpp"

namespace synchrosde {

namespace expr {

namespace {
NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }
}  // namespace

NodePtr constant(double c) {
  Node n;
  n.op = Op::Const;
  n.value = c;
  return make(std::move(n));
}

NodePtr var() {
  static const NodePtr x = [] {
    Node n;
    n.op = Op::Var;
    return make(std::move(n));
  }();
  return x;
}

NodePtr unary(Op op, NodePtr a) {
  Node n;
  n.op = op;
  n.args = {std::move(a)};
  return make(std::move(n));
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  Node n;
  n.op = op;
  n.args = {std::move(a), std::move(b)};
  return make(std::move(n));
}

NodePtr polynomial(std::vector<double> coeffs, NodePtr arg) {
  if (coeffs.empty()) throw DomainError("polynomial needs at least one coefficient");
  Node n;
  n.op = Op::Polynomial;
  n.params = std::move(coeffs);
  n.args = {std::move(arg)};
  return make(std::move(n));
}

NodePtr indicator(double a, double b, NodePtr arg) {
  if (!(a < b)) throw DomainError("indicator requires a < b");
  Node n;
  n.op = Op::Indicator;
  n.params = {a, b};
  n.args = {std::move(arg)};
  return make(std::move(n));
}

NodePtr piecewise_linear(std::vector<Knot> knots, NodePtr arg) {
  if (knots.empty()) throw DomainError("piecewise_linear needs at least one knot");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].x > knots[i - 1].x)) {
      throw DomainError("piecewise_linear knots must be strictly increasing in x");
    }
  }
  Node n;
  n.op = Op::PiecewiseLinear;
  n.knots = std::move(knots);
  n.args = {std::move(arg)};
  return make(std::move(n));
}

NodePtr compose(const NodePtr& outer, const NodePtr& inner) {
  if (outer->op == Op::Var) return inner;
  if (outer->args.empty()) return outer;
  Node copy = *outer;
  bool changed = false;
  for (auto& a : copy.args) {
    NodePtr sub = compose(a, inner);
    changed = changed || sub != a;
    a = std::move(sub);
  }
  return changed ? make(std::move(copy)) : outer;
}

}  // namespace expr

// ---------------------------------------------------------------------------
// Evaluation

double evaluate(const Node& n, double x) {
  switch (n.op) {
    case Op::Const:
      return n.value;
    case Op::Var:
      return x;
    case Op::Add:
      return evaluate(*n.args[0], x) + evaluate(*n.args[1], x);
    case Op::Sub:
      return evaluate(*n.args[0], x) - evaluate(*n.args[1], x);
    case Op::Mul:
      return evaluate(*n.args[0], x) * evaluate(*n.args[1], x);
    case Op::Div: {
      const double num = evaluate(*n.args[0], x);
      const double den = evaluate(*n.args[1], x);
      if (den == 0.0) {
        throw DomainError("division by zero at x = " + format_real(x));
      }
      return num / den;
    }
    case Op::Neg:
      return -evaluate(*n.args[0], x);
    case Op::Abs:
      return std::abs(evaluate(*n.args[0], x));
    case Op::Sgn: {
      const double v = evaluate(*n.args[0], x);
      return static_cast<double>((v > 0.0) - (v < 0.0));
    }
    case Op::Min:
      return std::min(evaluate(*n.args[0], x), evaluate(*n.args[1], x));
    case Op::Max:
      return std::max(evaluate(*n.args[0], x), evaluate(*n.args[1], x));
    case Op::Exp:
      return std::exp(evaluate(*n.args[0], x));
    case Op::Sin:
      return std::sin(evaluate(*n.args[0], x));
    case Op::Cos:
      return std::cos(evaluate(*n.args[0], x));
    case Op::Polynomial: {
      const double t = evaluate(*n.args[0], x);
      double acc = 0.0;
      for (auto it = n.params.rbegin(); it != n.params.rend(); ++it) acc = acc * t + *it;
      return acc;
    }
    case Op::Indicator: {
      const double t = evaluate(*n.args[0], x);
      return (n.params[0] <= t && t <= n.params[1]) ? 1.0 : 0.0;
    }
    case Op::PiecewiseLinear: {
      const double t = evaluate(*n.args[0], x);
      const auto& k = n.knots;
      if (t <= k.front().x) return k.front().y;
      if (t >= k.back().x) return k.back().y;
      const auto hi = std::upper_bound(k.begin(), k.end(), t,
                                       [](double v, const Knot& kn) { return v < kn.x; });
      const auto lo = hi - 1;
      const double w = (t - lo->x) / (hi->x - lo->x);
      return lo->y + w * (hi->y - lo->y);
    }
  }
  return 0.0;
}

double evaluate(const FunctionDescriptor& f, double x) { return evaluate(f.root(), x); }

// ---------------------------------------------------------------------------
// Printing

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

std::string print_const(double v) {
  const std::string s = format_real(v);
  return std::signbit(v) ? "(" + s + ")" : s;
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Abs: return "abs";
    case Op::Sgn: return "sgn";
    case Op::Exp: return "exp";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Min: return "min";
    case Op::Max: return "max";
    default: return "";
  }
}

std::string print_arg_suffix(const Node& n) {
  return n.args[0]->op == Op::Var ? std::string{} : "(" + print(*n.args[0]) + ")";
}

}  // namespace

std::string print(const Node& n) {
  switch (n.op) {
    case Op::Const:
      return print_const(n.value);
    case Op::Var:
      return "x";
    case Op::Add:
      return "(" + print(*n.args[0]) + " + " + print(*n.args[1]) + ")";
    case Op::Sub:
      return "(" + print(*n.args[0]) + " - " + print(*n.args[1]) + ")";
    case Op::Mul:
      return "(" + print(*n.args[0]) + " * " + print(*n.args[1]) + ")";
    case Op::Div:
      return "(" + print(*n.args[0]) + " / " + print(*n.args[1]) + ")";
    case Op::Neg:
      return "(-" + print(*n.args[0]) + ")";
    case Op::Abs:
    case Op::Sgn:
    case Op::Exp:
    case Op::Sin:
    case Op::Cos:
      return std::string(func_name(n.op)) + "(" + print(*n.args[0]) + ")";
    case Op::Min:
    case Op::Max:
      return std::string(func_name(n.op)) + "(" + print(*n.args[0]) + ", " +
             print(*n.args[1]) + ")";
    case Op::Polynomial: {
      std::string s = "polynomial[";
      for (std::size_t i = 0; i < n.params.size(); ++i) {
        if (i) s += ", ";
        s += format_real(n.params[i]);
      }
      return s + "]" + print_arg_suffix(n);
    }
    case Op::Indicator:
      return "indicator[" + format_real(n.params[0]) + ", " + format_real(n.params[1]) + "]" +
             print_arg_suffix(n);
    case Op::PiecewiseLinear: {
      std::string s = "piecewise_linear[";
      for (std::size_t i = 0; i < n.knots.size(); ++i) {
        if (i) s += ", ";
        s += "(" + format_real(n.knots[i].x) + ", " + format_real(n.knots[i].y) + ")";
      }
      return s + "]" + print_arg_suffix(n);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  bool at_number() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    if (is_digit(c)) return true;
    return c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]);
  }

  double parse_number() {
    skip_ws();
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t d0 = pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      return pos_ - d0;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail_at("expected a number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
    }
    double v = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_) {
      fail_at("malformed number", start);
    }
    return v;
  }

  double parse_signed_number() {
    skip_ws();
    bool neg = false;
    if (accept('-')) {
      neg = true;
    } else {
      accept('+');
    }
    const double v = parse_number();
    return neg ? -v : v;
  }

  std::string_view parse_ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = expr::binary(Op::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = expr::binary(Op::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = expr::binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = expr::binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return expr::unary(Op::Neg, parse_unary());
    return parse_primary();
  }

  NodePtr parse_optional_arg() {
    if (!peek('(')) return expr::var();
    ++pos_;
    NodePtr a = parse_expr();
    expect(')');
    return a;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (at_number()) return expr::constant(parse_number());
    if (accept('(')) {
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (!is_ident_start(text_[pos_])) fail(std::string("unexpected character '") + text_[pos_] + "'");

    const std::size_t start = pos_;
    const std::string_view name = parse_ident();
    if (name == "x") return expr::var();

    static constexpr std::array<std::pair<std::string_view, Op>, 6> unary_fns{{
        {"abs", Op::Abs},
        {"sgn", Op::Sgn},
        {"sign", Op::Sgn},
        {"exp", Op::Exp},
        {"sin", Op::Sin},
        {"cos", Op::Cos},
    }};
    for (const auto& [fname, op] : unary_fns) {
      if (name == fname) {
        expect('(');
        NodePtr a = parse_expr();
        expect(')');
        return expr::unary(op, a);
      }
    }
    if (name == "min" || name == "max") {
      expect('(');
      NodePtr a = parse_expr();
      expect(',');
      NodePtr b = parse_expr();
      expect(')');
      return expr::binary(name == "min" ? Op::Min : Op::Max, a, b);
    }
    if (name == "indicator") {
      expect('[');
      const std::size_t at = pos_;
      const double a = parse_signed_number();
      expect(',');
      const double b = parse_signed_number();
      expect(']');
      if (!(a < b)) fail_at("indicator requires a < b", at);
      return expr::indicator(a, b, parse_optional_arg());
    }
    if (name == "polynomial") {
      expect('[');
      std::vector<double> coeffs{parse_signed_number()};
      while (accept(',')) coeffs.push_back(parse_signed_number());
      expect(']');
      return expr::polynomial(std::move(coeffs), parse_optional_arg());
    }
    if (name == "piecewise_linear") {
      expect('[');
      std::vector<Knot> knots;
      do {
        skip_ws();
        const std::size_t at = pos_;
        expect('(');
        const double kx = parse_signed_number();
        expect(',');
        const double ky = parse_signed_number();
        expect(')');
        if (!knots.empty() && !(kx > knots.back().x)) {
          fail_at("piecewise_linear knots must be strictly increasing in x", at);
        }
        knots.push_back({kx, ky});
      } while (accept(','));
      expect(']');
      return expr::piecewise_linear(std::move(knots), parse_optional_arg());
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FunctionDescriptor parse(std::string_view text) {
  return FunctionDescriptor(Parser(text).parse_all());
}

// ---------------------------------------------------------------------------
// Structural analysis

namespace {

struct Affine {
  double slope;
  double intercept;
};

// node(x) = slope*x + intercept for all x.
std::optional<Affine> affine(const Node& n) {
  switch (n.op) {
    case Op::Const:
      return Affine{0.0, n.value};
    case Op::Var:
      return Affine{1.0, 0.0};
    case Op::Neg:
      if (auto a = affine(*n.args[0])) return Affine{-a->slope, -a->intercept};
      return std::nullopt;
    case Op::Add:
    case Op::Sub: {
      auto a = affine(*n.args[0]);
      auto b = affine(*n.args[1]);
      if (!a || !b) return std::nullopt;
      const double s = n.op == Op::Add ? 1.0 : -1.0;
      return Affine{a->slope + s * b->slope, a->intercept + s * b->intercept};
    }
    case Op::Mul: {
      auto a = affine(*n.args[0]);
      auto b = affine(*n.args[1]);
      if (!a || !b) return std::nullopt;
      if (a->slope == 0.0) return Affine{a->intercept * b->slope, a->intercept * b->intercept};
      if (b->slope == 0.0) return Affine{b->intercept * a->slope, b->intercept * a->intercept};
      return std::nullopt;
    }
    case Op::Div: {
      auto a = affine(*n.args[0]);
      auto b = affine(*n.args[1]);
      if (!a || !b || b->slope != 0.0 || b->intercept == 0.0) return std::nullopt;
      return Affine{a->slope / b->intercept, a->intercept / b->intercept};
    }
    case Op::Polynomial: {
      auto a = affine(*n.args[0]);
      if (!a) return std::nullopt;
      for (std::size_t i = 2; i < n.params.size(); ++i) {
        if (n.params[i] != 0.0) return std::nullopt;
      }
      const double c1 = n.params.size() > 1 ? n.params[1] : 0.0;
      return Affine{c1 * a->slope, n.params[0] + c1 * a->intercept};
    }
    default:
      return std::nullopt;
  }
}

// node(x) = a + b*|x| for all x.
std::optional<Affine> affine_in_abs(const Node& n) {
  switch (n.op) {
    case Op::Const:
      return Affine{0.0, n.value};
    case Op::Abs: {
      auto a = affine(*n.args[0]);
      if (!a || a->intercept != 0.0) return std::nullopt;
      return Affine{std::abs(a->slope), 0.0};
    }
    case Op::Neg:
      if (auto a = affine_in_abs(*n.args[0])) return Affine{-a->slope, -a->intercept};
      return std::nullopt;
    case Op::Add:
    case Op::Sub: {
      auto a = affine_in_abs(*n.args[0]);
      auto b = affine_in_abs(*n.args[1]);
      if (!a || !b) return std::nullopt;
      const double s = n.op == Op::Add ? 1.0 : -1.0;
      return Affine{a->slope + s * b->slope, a->intercept + s * b->intercept};
    }
    case Op::Mul: {
      auto a = affine_in_abs(*n.args[0]);
      auto b = affine_in_abs(*n.args[1]);
      if (!a || !b) return std::nullopt;
      if (a->slope == 0.0) return Affine{a->intercept * b->slope, a->intercept * b->intercept};
      if (b->slope == 0.0) return Affine{b->intercept * a->slope, b->intercept * a->intercept};
      return std::nullopt;
    }
    case Op::Div: {
      auto a = affine_in_abs(*n.args[0]);
      auto b = affine(*n.args[1]);
      if (!a || !b || b->slope != 0.0 || b->intercept == 0.0) return std::nullopt;
      return Affine{a->slope / b->intercept, a->intercept / b->intercept};
    }
    default:
      if (auto a = affine(n); a && a->slope == 0.0) return a;
      return std::nullopt;
  }
}

void push_preimage(const std::optional<Affine>& a, double level, std::vector<double>& out) {
  if (a && a->slope != 0.0) out.push_back((level - a->intercept) / a->slope);
}

void collect_breakpoints(const Node& n, std::vector<double>& out) {
  for (const auto& a : n.args) collect_breakpoints(*a, out);
  switch (n.op) {
    case Op::Abs:
    case Op::Sgn:
      push_preimage(affine(*n.args[0]), 0.0, out);
      break;
    case Op::Div:
      push_preimage(affine(*n.args[1]), 0.0, out);
      break;
    case Op::Indicator: {
      const auto a = affine(*n.args[0]);
      push_preimage(a, n.params[0], out);
      push_preimage(a, n.params[1], out);
      break;
    }
    case Op::PiecewiseLinear: {
      const auto a = affine(*n.args[0]);
      for (const auto& k : n.knots) push_preimage(a, k.x, out);
      break;
    }
    case Op::Min:
    case Op::Max: {
      const auto a = affine(*n.args[0]);
      const auto b = affine(*n.args[1]);
      if (a && b && a->slope != b->slope) {
        out.push_back((b->intercept - a->intercept) / (a->slope - b->slope));
      }
      break;
    }
    default:
      break;
  }
}

// Radius of the preimage of [lo, hi] under a non-constant affine map.
double preimage_radius(const Affine& a, double lo, double hi) {
  const double p = (lo - a.intercept) / a.slope;
  const double q = (hi - a.intercept) / a.slope;
  return std::max(std::abs(p), std::abs(q));
}

std::optional<double> support(const Node& n) {
  auto max_of = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
    if (a && b) return std::max(*a, *b);
    return std::nullopt;
  };
  switch (n.op) {
    case Op::Const:
      return n.value == 0.0 ? std::optional<double>(0.0) : std::nullopt;
    case Op::Var:
    case Op::Exp:
    case Op::Cos:
      return std::nullopt;
    case Op::Add:
    case Op::Sub:
    case Op::Min:
    case Op::Max:
      return max_of(support(*n.args[0]), support(*n.args[1]));
    case Op::Mul: {
      const auto a = support(*n.args[0]);
      const auto b = support(*n.args[1]);
      if (a && b) return std::min(*a, *b);
      return a ? a : b;
    }
    case Op::Div:
      return support(*n.args[0]);
    case Op::Neg:
    case Op::Abs:
    case Op::Sgn:
    case Op::Sin:
      return support(*n.args[0]);
    case Op::Polynomial: {
      if (std::all_of(n.params.begin(), n.params.end(), [](double c) { return c == 0.0; })) {
        return 0.0;
      }
      if (n.params[0] == 0.0) return support(*n.args[0]);
      return std::nullopt;
    }
    case Op::Indicator: {
      const double lo = n.params[0], hi = n.params[1];
      const auto a = affine(*n.args[0]);
      if (a && a->slope != 0.0) return preimage_radius(*a, lo, hi);
      if (a) return (lo <= a->intercept && a->intercept <= hi) ? std::nullopt
                                                              : std::optional<double>(0.0);
      if (lo > 0.0 || hi < 0.0) return support(*n.args[0]);
      return std::nullopt;
    }
    case Op::PiecewiseLinear: {
      const auto& k = n.knots;
      const auto a = affine(*n.args[0]);
      if (a && a->slope != 0.0 && k.front().y == 0.0 && k.back().y == 0.0) {
        return preimage_radius(*a, k.front().x, k.back().x);
      }
      Node probe = n;
      probe.args = {expr::constant(0.0)};
      if (evaluate(probe, 0.0) == 0.0) return support(*n.args[0]);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

bool bounded_by_one(const Node& n) {
  return n.op == Op::Sgn || n.op == Op::Sin || n.op == Op::Cos || n.op == Op::Indicator;
}

std::optional<double> tail_mass(const Node& n, double R) {
  if (const auto r = support(n); r && *r <= R) return 0.0;
  switch (n.op) {
    case Op::Exp: {
      const auto a = affine_in_abs(*n.args[0]);
      if (a && a->slope < 0.0) return 2.0 * std::exp(a->intercept + a->slope * R) / -a->slope;
      return std::nullopt;
    }
    case Op::Mul: {
      const Node& l = *n.args[0];
      const Node& r = *n.args[1];
      const auto la = affine(l);
      const auto ra = affine(r);
      if (la && la->slope == 0.0) {
        if (auto t = tail_mass(r, R)) return std::abs(la->intercept) * *t;
      }
      if (ra && ra->slope == 0.0) {
        if (auto t = tail_mass(l, R)) return std::abs(ra->intercept) * *t;
      }
      if (bounded_by_one(l)) return tail_mass(r, R);
      if (bounded_by_one(r)) return tail_mass(l, R);
      return std::nullopt;
    }
    case Op::Div: {
      const auto d = affine(*n.args[1]);
      if (d && d->slope == 0.0 && d->intercept != 0.0) {
        if (auto t = tail_mass(*n.args[0], R)) return *t / std::abs(d->intercept);
      }
      return std::nullopt;
    }
    case Op::Neg:
    case Op::Abs:
      return tail_mass(*n.args[0], R);
    case Op::Add:
    case Op::Sub: {
      const auto a = tail_mass(*n.args[0], R);
      const auto b = tail_mass(*n.args[1], R);
      if (a && b) return *a + *b;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FunctionDescriptor

FunctionDescriptor::FunctionDescriptor() : root_(expr::constant(0.0)) {}

FunctionDescriptor::FunctionDescriptor(NodePtr root, DeclaredMetadata declared)
    : root_(std::move(root)), declared_(declared) {
  if (!root_) throw DomainError("null expression");
  auto non_negative = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 0.0)) {
      throw ConfigError(std::string("declared ") + name + " must be >= 0");
    }
  };
  non_negative(declared_.sup_norm, "sup_norm");
  non_negative(declared_.lipschitz, "lipschitz");
  non_negative(declared_.support_radius, "support_radius");
  non_negative(declared_.l1_norm, "l1_norm");
}

double FunctionDescriptor::operator()(double x) const { return evaluate(*root_, x); }

FunctionDescriptor FunctionDescriptor::with_declared(DeclaredMetadata declared) const {
  return FunctionDescriptor(root_, declared);
}

std::string FunctionDescriptor::to_string() const { return print(*root_); }

std::vector<double> FunctionDescriptor::breakpoints() const {
  std::vector<double> out;
  collect_breakpoints(*root_, out);
  std::erase_if(out, [](double v) { return !std::isfinite(v); });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<double> FunctionDescriptor::proven_support_radius() const {
  return support(*root_);
}

std::optional<double> FunctionDescriptor::tail_mass_bound(double R) const {
  return tail_mass(*root_, R);
}

bool FunctionDescriptor::is_literal_zero() const {
  return root_->op == Op::Const && root_->value == 0.0;
}

FunctionDescriptor compose(const FunctionDescriptor& outer, const FunctionDescriptor& inner) {
  return FunctionDescriptor(expr::compose(outer.root_ptr(), inner.root_ptr()));
}

}  // namespace synchrosde
