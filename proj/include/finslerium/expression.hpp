#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "finslerium/wirtinger.hpp"

// Small expression language for user-supplied metrics and holomorphic maps.
// Variables: z1..zn, zb1..zbn, v1..vn, vb1..vbn; any other identifier is a
// named parameter bound at compile time. Functions: exp, log, sqrt, conj.
// Operators: + - * / unary- and ^ with integer exponent. Maps are parsed in
// a restricted mode (z-variables only) so they stay holomorphic by
// construction, which also makes the symbolic Jacobian a straight recursion.

namespace finslerium::expr {

enum class NodeKind { Const, VarZ, VarZb, VarV, VarVb, Add, Sub, Mul, Div, Neg, PowInt, Exp, Log, Sqrt, Conj };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  C value{};       // Const
  int index = 0;   // Var*, PowInt exponent
  NodePtr a, b;
};

inline NodePtr constant(C v) {
  return std::make_shared<Node>(Node{NodeKind::Const, v, 0, nullptr, nullptr});
}
inline NodePtr variable(NodeKind k, int i) {
  return std::make_shared<Node>(Node{k, C{}, i, nullptr, nullptr});
}
inline NodePtr unary(NodeKind k, NodePtr a) {
  return std::make_shared<Node>(Node{k, C{}, 0, std::move(a), nullptr});
}
inline NodePtr binary(NodeKind k, NodePtr a, NodePtr b) {
  return std::make_shared<Node>(Node{k, C{}, 0, std::move(a), std::move(b)});
}
inline NodePtr pow_node(NodePtr a, int k) {
  return std::make_shared<Node>(Node{NodeKind::PowInt, C{}, k, std::move(a), nullptr});
}

template <class S>
S eval(const Node& n, std::span<const S> z, std::span<const S> v) {
  switch (n.kind) {
    case NodeKind::Const:
      return S{typename S::value_type(n.value.re), typename S::value_type(n.value.im)};
    case NodeKind::VarZ:
      return z[n.index];
    case NodeKind::VarZb:
      return conj(z[n.index]);
    case NodeKind::VarV:
      return v[n.index];
    case NodeKind::VarVb:
      return conj(v[n.index]);
    case NodeKind::Add:
      return eval(*n.a, z, v) + eval(*n.b, z, v);
    case NodeKind::Sub:
      return eval(*n.a, z, v) - eval(*n.b, z, v);
    case NodeKind::Mul:
      return eval(*n.a, z, v) * eval(*n.b, z, v);
    case NodeKind::Div:
      return eval(*n.a, z, v) / eval(*n.b, z, v);
    case NodeKind::Neg:
      return -eval(*n.a, z, v);
    case NodeKind::PowInt:
      return pow_int(eval(*n.a, z, v), n.index);
    case NodeKind::Exp:
      return exp(eval(*n.a, z, v));
    case NodeKind::Log:
      return log(eval(*n.a, z, v));
    case NodeKind::Sqrt:
      return exp(0.5 * log(eval(*n.a, z, v)));
    case NodeKind::Conj:
      return conj(eval(*n.a, z, v));
  }
  throw Error("expression: unreachable node kind");
}

// d/dz_i of a holomorphic expression (no zb/vb/conj nodes)
inline NodePtr d_dz(const NodePtr& n, int i) {
  switch (n->kind) {
    case NodeKind::Const:
      return constant(C{0.0, 0.0});
    case NodeKind::VarZ:
      return constant(n->index == i ? C{1.0, 0.0} : C{0.0, 0.0});
    case NodeKind::Add:
      return binary(NodeKind::Add, d_dz(n->a, i), d_dz(n->b, i));
    case NodeKind::Sub:
      return binary(NodeKind::Sub, d_dz(n->a, i), d_dz(n->b, i));
    case NodeKind::Mul:
      return binary(NodeKind::Add, binary(NodeKind::Mul, d_dz(n->a, i), n->b),
                    binary(NodeKind::Mul, n->a, d_dz(n->b, i)));
    case NodeKind::Div:
      // (a'b - ab') / b^2
      return binary(NodeKind::Div,
                    binary(NodeKind::Sub, binary(NodeKind::Mul, d_dz(n->a, i), n->b),
                           binary(NodeKind::Mul, n->a, d_dz(n->b, i))),
                    pow_node(n->b, 2));
    case NodeKind::Neg:
      return unary(NodeKind::Neg, d_dz(n->a, i));
    case NodeKind::PowInt:
      if (n->index == 0) return constant(C{0.0, 0.0});
      return binary(NodeKind::Mul,
                    binary(NodeKind::Mul, constant(C{static_cast<double>(n->index), 0.0}),
                           pow_node(n->a, n->index - 1)),
                    d_dz(n->a, i));
    case NodeKind::Exp:
      return binary(NodeKind::Mul, unary(NodeKind::Exp, n->a), d_dz(n->a, i));
    case NodeKind::Log:
      return binary(NodeKind::Div, d_dz(n->a, i), n->a);
    case NodeKind::Sqrt:
      return binary(NodeKind::Div, d_dz(n->a, i),
                    binary(NodeKind::Mul, constant(C{2.0, 0.0}), unary(NodeKind::Sqrt, n->a)));
    default:
      throw DomainError("expression: symbolic derivative requires a holomorphic expression");
  }
}

// ---------------------------------------------------------------------------
// parser

struct ParseOptions {
  int dim = 1;
  bool holomorphic_only = false;  // maps: only z-variables, no conj
  std::map<std::string, double> params;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opt) : text_(text), opt_(opt) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  std::string_view text_;
  const ParseOptions& opt_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr expression() {
    NodePtr e = term();
    for (;;) {
      if (eat('+'))
        e = binary(NodeKind::Add, e, term());
      else if (eat('-'))
        e = binary(NodeKind::Sub, e, term());
      else
        return e;
    }
  }

  NodePtr term() {
    NodePtr e = factor();
    for (;;) {
      if (eat('*'))
        e = binary(NodeKind::Mul, e, factor());
      else if (eat('/'))
        e = binary(NodeKind::Div, e, factor());
      else
        return e;
    }
  }

  NodePtr factor() {
    if (eat('-')) return unary(NodeKind::Neg, factor());
    if (eat('+')) return factor();
    NodePtr base = atom();
    if (eat('^')) {
      bool neg = eat('-');
      skip_ws();
      size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected after '^'");
      int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
      return pow_node(base, neg ? -k : k);
    }
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      if (!eat(')')) fail("')' expected");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double val = 0;
    auto [next, ec] = std::from_chars(begin, end, val);
    if (ec != std::errc{}) fail("malformed number");
    pos_ = static_cast<size_t>(next - text_.data());
    if (pos_ < text_.size() && text_[pos_] == 'i') {
      ++pos_;
      return constant(C{0.0, val});
    }
    return constant(C{val, 0.0});
  }

  NodePtr identifier() {
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "i") return constant(C{0.0, 1.0});
    if (name == "exp" || name == "log" || name == "sqrt" || name == "conj") {
      if (!eat('(')) fail("'(' expected after function name");
      NodePtr arg = expression();
      if (!eat(')')) fail("')' expected");
      if (name == "exp") return unary(NodeKind::Exp, arg);
      if (name == "log") return unary(NodeKind::Log, arg);
      if (name == "sqrt") return unary(NodeKind::Sqrt, arg);
      if (opt_.holomorphic_only) fail("conj() is not allowed in a holomorphic map");
      return unary(NodeKind::Conj, arg);
    }
    if (auto v = parse_var(name, "z", NodeKind::VarZ)) return v;
    if (!opt_.holomorphic_only) {
      if (auto v = parse_var(name, "zb", NodeKind::VarZb)) return v;
      if (auto v = parse_var(name, "v", NodeKind::VarV)) return v;
      if (auto v = parse_var(name, "vb", NodeKind::VarVb)) return v;
    }
    auto it = opt_.params.find(name);
    if (it == opt_.params.end()) fail("unknown identifier '" + name + "'");
    return constant(C{it->second, 0.0});
  }

  NodePtr parse_var(const std::string& name, std::string_view prefix, NodeKind kind) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
      return nullptr;
    for (size_t i = prefix.size(); i < name.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return nullptr;
    int idx = std::stoi(name.substr(prefix.size())) - 1;
    if (idx < 0 || idx >= opt_.dim) fail("variable index out of range in '" + name + "'");
    return variable(kind, idx);
  }
};

inline NodePtr parse(std::string_view text, const ParseOptions& opt) {
  return Parser(text, opt).parse();
}

inline FieldPtr make_expression_field(int dim, const NodePtr& ast) {
  return make_field(dim, [ast](auto z, auto v) { return eval(*ast, z, v); });
}

}  // namespace finslerium::expr
