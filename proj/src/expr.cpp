// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Recursive-descent parser, precedence printer, and evaluators.
*/
#include "warpcheck/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace warpcheck {

using Node = ScalarFieldExpr::Node;
using NodePtr = ScalarFieldExpr::NodePtr;
using Kind = Node::Kind;

namespace exprb {

namespace {
NodePtr make(Kind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}
NodePtr binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}
}  // namespace

NodePtr num(double v) {
  auto n = make(Kind::number);
  const_cast<Node*>(n.get())->number = v;
  return n;
}
NodePtr var(int index) {
  auto n = make(Kind::var);
  const_cast<Node*>(n.get())->var = index;
  return n;
}
NodePtr add(NodePtr a, NodePtr b) { return binary(Kind::add, std::move(a), std::move(b)); }
NodePtr sub(NodePtr a, NodePtr b) { return binary(Kind::sub, std::move(a), std::move(b)); }
NodePtr mul(NodePtr a, NodePtr b) { return binary(Kind::mul, std::move(a), std::move(b)); }
NodePtr div(NodePtr a, NodePtr b) { return binary(Kind::div, std::move(a), std::move(b)); }
NodePtr neg(NodePtr a) {
  auto n = make(Kind::neg);
  const_cast<Node*>(n.get())->lhs = std::move(a);
  return n;
}
NodePtr powi(NodePtr a, long long p) {
  auto n = make(Kind::pow);
  auto* m = const_cast<Node*>(n.get());
  m->lhs = std::move(a);
  m->exponent = static_cast<double>(p);
  m->exponent_is_int = true;
  return n;
}
NodePtr call(Builtin f, NodePtr a) {
  auto n = make(Kind::call);
  auto* m = const_cast<Node*>(n.get());
  m->func = f;
  m->lhs = std::move(a);
  return n;
}

}  // namespace exprb

namespace {

struct Token {
  enum class Type { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };
  Type type;
  size_t offset;
  double number = 0.0;
  bool number_has_point = false;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_.offset = pos_;
    tok_.text.clear();
    if (pos_ >= src_.size()) {
      tok_.type = Token::Type::end;
      return;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': tok_.type = Token::Type::plus; ++pos_; return;
      case '-': tok_.type = Token::Type::minus; ++pos_; return;
      case '*': tok_.type = Token::Type::star; ++pos_; return;
      case '/': tok_.type = Token::Type::slash; ++pos_; return;
      case '^': tok_.type = Token::Type::caret; ++pos_; return;
      case '(': tok_.type = Token::Type::lparen; ++pos_; return;
      case ')': tok_.type = Token::Type::rparen; ++pos_; return;
      case ',': tok_.type = Token::Type::comma; ++pos_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const size_t start = pos_;
      bool has_point = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        has_point = true;
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t mark = pos_ + 1;
        if (mark < src_.size() && (src_[mark] == '+' || src_[mark] == '-')) ++mark;
        if (mark < src_.size() && std::isdigit(static_cast<unsigned char>(src_[mark]))) {
          has_point = true;
          pos_ = mark;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
      }
      tok_.type = Token::Type::number;
      tok_.text.assign(src_.substr(start, pos_ - start));
      tok_.number = std::strtod(tok_.text.c_str(), nullptr);
      tok_.number_has_point = has_point;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos_;
      ++pos_;
      while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      tok_.type = Token::Type::ident;
      tok_.text.assign(src_.substr(start, pos_ - start));
      return;
    }
    throw ParseError(pos_, "unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  size_t pos_ = 0;
  Token tok_;
};

bool builtin_by_name(const std::string& name, Builtin& out) {
  if (name == "sin") out = Builtin::sin;
  else if (name == "cos") out = Builtin::cos;
  else if (name == "exp") out = Builtin::exp;
  else if (name == "log") out = Builtin::log;
  else if (name == "sqrt") out = Builtin::sqrt;
  else return false;
  return true;
}

const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::sin: return "sin";
    case Builtin::cos: return "cos";
    case Builtin::exp: return "exp";
    case Builtin::log: return "log";
    case Builtin::sqrt: return "sqrt";
  }
  return "?";
}

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : lex_(src), vars_(vars) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::end) {
      throw ParseError(t.offset, "unexpected trailing input");
    }
    return e;
  }

 private:
  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.type == Token::Type::plus) {
        lex_.take();
        lhs = exprb::add(std::move(lhs), parse_term());
      } else if (t.type == Token::Type::minus) {
        lex_.take();
        lhs = exprb::sub(std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      const Token& t = lex_.peek();
      if (t.type == Token::Type::star) {
        lex_.take();
        lhs = exprb::mul(std::move(lhs), parse_factor());
      } else if (t.type == Token::Type::slash) {
        lex_.take();
        lhs = exprb::div(std::move(lhs), parse_factor());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_base();
    if (lex_.peek().type == Token::Type::caret) {
      lex_.take();
      bool negated = false;
      if (lex_.peek().type == Token::Type::minus || lex_.peek().type == Token::Type::plus) {
        negated = lex_.take().type == Token::Type::minus;
      }
      const Token t = lex_.take();
      if (t.type != Token::Type::number) {
        throw ParseError(t.offset, "expected numeric exponent");
      }
      auto n = std::make_shared<Node>();
      n->kind = Kind::pow;
      n->lhs = std::move(base);
      n->exponent = negated ? -t.number : t.number;
      n->exponent_is_int = !t.number_has_point;
      return n;
    }
    return base;
  }

  NodePtr parse_base() {
    const Token t = lex_.take();
    switch (t.type) {
      case Token::Type::number:
        return exprb::num(t.number);
      case Token::Type::minus:
        return exprb::neg(parse_base());
      case Token::Type::lparen: {
        NodePtr e = parse_expr();
        expect_rparen();
        return e;
      }
      case Token::Type::ident: {
        Builtin f;
        if (lex_.peek().type == Token::Type::lparen) {
          if (!builtin_by_name(t.text, f)) {
            throw ParseError(t.offset, "unknown function '" + t.text + "'");
          }
          lex_.take();
          NodePtr arg = parse_expr();
          if (lex_.peek().type == Token::Type::comma) {
            throw ParseError(lex_.peek().offset, "builtin functions take one argument");
          }
          expect_rparen();
          return exprb::call(f, std::move(arg));
        }
        for (size_t i = 0; i < vars_.size(); ++i) {
          if (vars_[i] == t.text) return exprb::var(static_cast<int>(i));
        }
        throw ParseError(t.offset, "unknown identifier '" + t.text + "'");
      }
      default:
        throw ParseError(t.offset, "expected expression");
    }
  }

  void expect_rparen() {
    const Token t = lex_.take();
    if (t.type != Token::Type::rparen) {
      throw ParseError(t.offset, "expected ')'");
    }
  }

  Lexer lex_;
  const std::vector<std::string>& vars_;
};

double eval_value_node(const Node* n, std::span<const double> p) {
  switch (n->kind) {
    case Kind::number: return n->number;
    case Kind::var: return p[static_cast<size_t>(n->var)];
    case Kind::add: return eval_value_node(n->lhs.get(), p) + eval_value_node(n->rhs.get(), p);
    case Kind::sub: return eval_value_node(n->lhs.get(), p) - eval_value_node(n->rhs.get(), p);
    case Kind::mul: return eval_value_node(n->lhs.get(), p) * eval_value_node(n->rhs.get(), p);
    case Kind::div: {
      const double d = eval_value_node(n->rhs.get(), p);
      if (d == 0.0) throw DomainError("division by zero");
      return eval_value_node(n->lhs.get(), p) / d;
    }
    case Kind::neg: return -eval_value_node(n->lhs.get(), p);
    case Kind::pow: {
      const double b = eval_value_node(n->lhs.get(), p);
      if (n->exponent_is_int) {
        const auto e = static_cast<long long>(n->exponent);
        if (e < 0 && b == 0.0) throw DomainError("zero raised to a negative power");
        return std::pow(b, n->exponent);
      }
      if (!(b > 0.0)) throw DomainError("real exponent requires a positive base");
      return std::pow(b, n->exponent);
    }
    case Kind::call: {
      const double a = eval_value_node(n->lhs.get(), p);
      switch (n->func) {
        case Builtin::sin: return std::sin(a);
        case Builtin::cos: return std::cos(a);
        case Builtin::exp: return std::exp(a);
        case Builtin::log:
          if (!(a > 0.0)) throw DomainError("log: value must be positive");
          return std::log(a);
        case Builtin::sqrt:
          if (!(a > 0.0)) throw DomainError("sqrt: value must be positive");
          return std::sqrt(a);
      }
      throw InternalError("unhandled builtin");
    }
  }
  throw InternalError("unhandled expression node");
}

Jet eval_jet_node(const Node* n, const std::vector<Jet>& vj, const JetLayout* L) {
  switch (n->kind) {
    case Kind::number: return Jet::constant(L, n->number);
    case Kind::var: return vj[static_cast<size_t>(n->var)];
    case Kind::add: return eval_jet_node(n->lhs.get(), vj, L) + eval_jet_node(n->rhs.get(), vj, L);
    case Kind::sub: return eval_jet_node(n->lhs.get(), vj, L) - eval_jet_node(n->rhs.get(), vj, L);
    case Kind::mul: return eval_jet_node(n->lhs.get(), vj, L) * eval_jet_node(n->rhs.get(), vj, L);
    case Kind::div: return eval_jet_node(n->lhs.get(), vj, L) / eval_jet_node(n->rhs.get(), vj, L);
    case Kind::neg: return -eval_jet_node(n->lhs.get(), vj, L);
    case Kind::pow: {
      Jet b = eval_jet_node(n->lhs.get(), vj, L);
      if (n->exponent_is_int) return pow(b, static_cast<long long>(n->exponent));
      return pow(b, n->exponent);
    }
    case Kind::call: {
      Jet a = eval_jet_node(n->lhs.get(), vj, L);
      switch (n->func) {
        case Builtin::sin: return sin(a);
        case Builtin::cos: return cos(a);
        case Builtin::exp: return exp(a);
        case Builtin::log: return log(a);
        case Builtin::sqrt: return sqrt(a);
      }
      throw InternalError("unhandled builtin");
    }
  }
  throw InternalError("unhandled expression node");
}

// Printing precedence levels; children with lower levels get parentheses.
int precedence(Kind k) {
  switch (k) {
    case Kind::add:
    case Kind::sub: return 1;
    case Kind::mul:
    case Kind::div: return 2;
    case Kind::neg: return 3;
    case Kind::pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double round_trip = std::strtod(buf, nullptr);
  if (round_trip == v) {
    // Prefer the shortest representation that still round-trips.
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

void print_node(const Node* n, const std::vector<std::string>& vars, std::string& out);

void print_child(const Node* c, const std::vector<std::string>& vars, bool need_parens,
                 std::string& out) {
  if (need_parens) out += '(';
  print_node(c, vars, out);
  if (need_parens) out += ')';
}

void print_node(const Node* n, const std::vector<std::string>& vars, std::string& out) {
  switch (n->kind) {
    case Kind::number:
      out += format_number(n->number);
      return;
    case Kind::var:
      out += vars[static_cast<size_t>(n->var)];
      return;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div: {
      const int p = precedence(n->kind);
      print_child(n->lhs.get(), vars, precedence(n->lhs->kind) < p, out);
      switch (n->kind) {
        case Kind::add: out += '+'; break;
        case Kind::sub: out += '-'; break;
        case Kind::mul: out += '*'; break;
        default: out += '/'; break;
      }
      // Right operands at equal precedence keep their parentheses so the
      // left-associative reparse rebuilds the identical tree.
      print_child(n->rhs.get(), vars, precedence(n->rhs->kind) <= p, out);
      return;
    }
    case Kind::neg: {
      out += '-';
      const Kind ck = n->lhs->kind;
      const bool bare = ck == Kind::number || ck == Kind::var || ck == Kind::call || ck == Kind::neg;
      print_child(n->lhs.get(), vars, !bare, out);
      return;
    }
    case Kind::pow: {
      const Kind ck = n->lhs->kind;
      const bool bare = ck == Kind::number || ck == Kind::var || ck == Kind::call;
      print_child(n->lhs.get(), vars, !bare, out);
      out += '^';
      if (n->exponent_is_int) {
        out += std::to_string(static_cast<long long>(n->exponent));
      } else {
        out += format_number(n->exponent);
      }
      return;
    }
    case Kind::call:
      out += builtin_name(n->func);
      out += '(';
      print_node(n->lhs.get(), vars, out);
      out += ')';
      return;
  }
}

bool same_node(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::number: return a->number == b->number;
    case Kind::var: return a->var == b->var;
    case Kind::pow:
      return a->exponent == b->exponent && a->exponent_is_int == b->exponent_is_int &&
             same_node(a->lhs.get(), b->lhs.get());
    case Kind::call:
      return a->func == b->func && same_node(a->lhs.get(), b->lhs.get());
    case Kind::neg:
      return same_node(a->lhs.get(), b->lhs.get());
    default:
      return same_node(a->lhs.get(), b->lhs.get()) && same_node(a->rhs.get(), b->rhs.get());
  }
}

NodePtr relabel(const NodePtr& n, const std::vector<int>& index_map) {
  switch (n->kind) {
    case Kind::number: return n;
    case Kind::var: return exprb::var(index_map[static_cast<size_t>(n->var)]);
    default: {
      auto m = std::make_shared<Node>(*n);
      if (n->lhs) m->lhs = relabel(n->lhs, index_map);
      if (n->rhs) m->rhs = relabel(n->rhs, index_map);
      return m;
    }
  }
}

}  // namespace

double ScalarFieldExpr::eval_value(std::span<const double> point) const {
  if (point.size() != vars_.size()) {
    throw std::invalid_argument("eval_value: point dimension mismatch");
  }
  return eval_value_node(root_.get(), point);
}

Jet ScalarFieldExpr::eval(const std::vector<Jet>& var_jets) const {
  if (var_jets.size() != vars_.size()) {
    throw std::invalid_argument("eval: one jet per variable required");
  }
  const JetLayout* L = var_jets.empty() ? nullptr : var_jets[0].layout();
  for (const auto& j : var_jets) {
    if (j.layout() != L) throw std::invalid_argument("eval: variable jets must share a layout");
  }
  return eval_jet_node(root_.get(), var_jets, L);
}

std::string ScalarFieldExpr::to_string() const {
  std::string out;
  print_node(root_.get(), vars_, out);
  return out;
}

bool ScalarFieldExpr::same_ast(const ScalarFieldExpr& other) const {
  return vars_ == other.vars_ && same_node(root_.get(), other.root_.get());
}

ScalarFieldExpr ScalarFieldExpr::with_vars(std::vector<std::string> new_vars,
                                           const std::vector<int>& index_map) const {
  if (index_map.size() != vars_.size()) {
    throw std::invalid_argument("with_vars: one target index per variable required");
  }
  return ScalarFieldExpr(relabel(root_, index_map), std::move(new_vars));
}

ScalarFieldExpr parse(std::string_view src, std::vector<std::string> vars) {
  Parser p(src, vars);
  NodePtr root = p.parse_all();
  return ScalarFieldExpr(std::move(root), std::move(vars));
}

Jet eval_jet(const ScalarFieldExpr& e, std::span<const double> point, int order) {
  if (order < 0 || order > 4) {
    throw std::invalid_argument("eval_jet: order must lie in [0, 4]");
  }
  if (point.size() != e.vars().size()) {
    throw std::invalid_argument("eval_jet: point dimension mismatch");
  }
  const JetLayout* L = JetLayout::get(static_cast<int>(point.size()), order);
  std::vector<Jet> vj;
  vj.reserve(point.size());
  for (size_t i = 0; i < point.size(); ++i) {
    vj.push_back(Jet::variable(L, static_cast<int>(i), point[i]));
  }
  return e.eval(vj);
}

}  // namespace warpcheck
