#include "nesy/formula.hpp"

#include <cctype>
#include <charconv>

#include <fmt/format.h>

#include "nesy/errors.hpp"

namespace nesy {

struct Formula::Node {
  NodeKind kind = NodeKind::Const;
  bool value = false;
  VarKind var_kind = VarKind::Concept;
  int index = 0;
  std::shared_ptr<const Node> lhs;   // also the child of Not
  std::shared_ptr<const Node> rhs;
};

namespace {

bool is_binary(NodeKind k) {
  return k != NodeKind::Const && k != NodeKind::Var && k != NodeKind::Not;
}

bool eval_node(const Formula::Node& n, BitVec c, BitVec y) {
  switch (n.kind) {
    case NodeKind::Const: return n.value;
    case NodeKind::Var: return n.var_kind == VarKind::Concept ? c[n.index] : y[n.index];
    case NodeKind::Not: return !eval_node(*n.lhs, c, y);
    case NodeKind::And: return eval_node(*n.lhs, c, y) && eval_node(*n.rhs, c, y);
    case NodeKind::Or: return eval_node(*n.lhs, c, y) || eval_node(*n.rhs, c, y);
    case NodeKind::Xor: return eval_node(*n.lhs, c, y) != eval_node(*n.rhs, c, y);
    case NodeKind::Implies: return !eval_node(*n.lhs, c, y) || eval_node(*n.rhs, c, y);
    case NodeKind::Iff: return eval_node(*n.lhs, c, y) == eval_node(*n.rhs, c, y);
  }
  return false;
}

bool same_node(const Formula::Node& a, const Formula::Node& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Const: return a.value == b.value;
    case NodeKind::Var: return a.var_kind == b.var_kind && a.index == b.index;
    case NodeKind::Not: return same_node(*a.lhs, *b.lhs);
    default: return same_node(*a.lhs, *b.lhs) && same_node(*a.rhs, *b.rhs);
  }
}

constexpr int kAtomPrecedence = 7;

int node_precedence(const Formula::Node& n) {
  if (n.kind == NodeKind::Const || n.kind == NodeKind::Var) return kAtomPrecedence;
  return precedence(n.kind);
}

void print_node(const Formula::Node& n, std::string& out) {
  auto child = [&out](const Formula::Node& c, bool parens) {
    if (parens) out.push_back('(');
    print_node(c, out);
    if (parens) out.push_back(')');
  };
  switch (n.kind) {
    case NodeKind::Const: out += n.value ? "true" : "false"; return;
    case NodeKind::Var:
      out += fmt::format("{}{}", n.var_kind == VarKind::Concept ? 'c' : 'y', n.index);
      return;
    case NodeKind::Not:
      out.push_back('!');
      child(*n.lhs, is_binary(n.lhs->kind));
      return;
    default: break;
  }
  const int p = precedence(n.kind);
  const bool right_assoc = n.kind == NodeKind::Implies;
  const int lp = node_precedence(*n.lhs);
  const int rp = node_precedence(*n.rhs);
  child(*n.lhs, lp < p || (lp == p && right_assoc));
  out += fmt::format(" {} ", operator_symbol(n.kind));
  child(*n.rhs, rp < p || (rp == p && !right_assoc));
}

// Recursive-descent parser, one function per precedence level.
class Parser {
 public:
  Parser(std::string_view text, int concepts, int labels)
      : text_(text), concepts_(concepts), labels_(labels) {}

  Formula parse() {
    skip_space();
    if (pos_ == text_.size()) syntax("empty formula");
    Formula f = parse_iff();
    skip_space();
    if (pos_ != text_.size()) syntax(fmt::format("unexpected '{}'", text_[pos_]));
    return f;
  }

 private:
  [[noreturn]] void syntax(const std::string& what) const {
    throw ParseError(ParseError::Reason::Syntax, pos_, "syntax error: " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view op) {
    skip_space();
    if (text_.substr(pos_, op.size()) != op) return false;
    pos_ += op.size();
    return true;
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (accept("<->")) lhs = Formula::binary(NodeKind::Iff, lhs, parse_implies());
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("->")) return Formula::binary(NodeKind::Implies, lhs, parse_implies());
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_xor();
    while (accept("|")) lhs = Formula::binary(NodeKind::Or, lhs, parse_xor());
    return lhs;
  }

  Formula parse_xor() {
    Formula lhs = parse_and();
    while (accept("^")) lhs = Formula::binary(NodeKind::Xor, lhs, parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_unary();
    while (accept("&")) lhs = Formula::binary(NodeKind::And, lhs, parse_unary());
    return lhs;
  }

  Formula parse_unary() {
    if (accept("!")) return Formula::negate(parse_unary());
    return parse_atom();
  }

  Formula parse_atom() {
    skip_space();
    if (pos_ == text_.size()) syntax("unexpected end of input");
    if (accept("(")) {
      Formula inner = parse_iff();
      if (!accept(")")) syntax("expected ')'");
      return inner;
    }
    const std::size_t start = pos_;
    auto ident_char = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    };
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    if (pos_ == start) syntax(fmt::format("unexpected '{}'", text_[pos_]));
    return resolve(text_.substr(start, pos_ - start), start);
  }

  Formula resolve(std::string_view name, std::size_t at) const {
    if (name == "true") return Formula::constant(true);
    if (name == "false") return Formula::constant(false);
    const char family = name.front();
    std::string_view digits = name.substr(1);
    int index = 0;
    const bool numeric =
        (family == 'c' || family == 'y') && !digits.empty() &&
        std::isdigit(static_cast<unsigned char>(digits.front())) &&
        std::from_chars(digits.data(), digits.data() + digits.size(), index).ptr ==
            digits.data() + digits.size();
    if (!numeric) {
      throw ParseError(ParseError::Reason::UnknownVariable, at,
                       fmt::format("unknown variable '{}'", name));
    }
    const int bound = family == 'c' ? concepts_ : labels_;
    if (index < 1 || index > bound) {
      throw ParseError(ParseError::Reason::IndexOutOfRange, at,
                       fmt::format("variable '{}' out of range ({}1..{}{})", name, family,
                                   family, bound));
    }
    return family == 'c' ? Formula::concept_var(index) : Formula::label_var(index);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int concepts_;
  int labels_;
};

}  // namespace

Formula Formula::constant(bool value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Const;
  n->value = value;
  return Formula(std::move(n));
}

Formula Formula::concept_var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->var_kind = VarKind::Concept;
  n->index = index;
  return Formula(std::move(n));
}

Formula Formula::label_var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Var;
  n->var_kind = VarKind::Label;
  n->index = index;
  return Formula(std::move(n));
}

Formula Formula::negate(Formula child) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Not;
  n->lhs = std::move(child.node_);
  return Formula(std::move(n));
}

Formula Formula::binary(NodeKind kind, Formula lhs, Formula rhs) {
  if (!is_binary(kind)) throw Error("Formula::binary called with a non-binary node kind");
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs.node_);
  n->rhs = std::move(rhs.node_);
  return Formula(std::move(n));
}

NodeKind Formula::kind() const { return node_->kind; }
bool Formula::value() const { return node_->value; }
VarKind Formula::var_kind() const { return node_->var_kind; }
int Formula::var_index() const { return node_->index; }
Formula Formula::child() const { return Formula(node_->lhs); }
Formula Formula::lhs() const { return Formula(node_->lhs); }
Formula Formula::rhs() const { return Formula(node_->rhs); }

bool Formula::evaluate(BitVec concepts, BitVec labels) const {
  return eval_node(*node_, concepts, labels);
}

std::string Formula::to_string() const {
  std::string out;
  print_node(*node_, out);
  return out;
}

bool operator==(const Formula& a, const Formula& b) { return same_node(*a.node_, *b.node_); }

int precedence(NodeKind kind) {
  switch (kind) {
    case NodeKind::Not: return 6;
    case NodeKind::And: return 5;
    case NodeKind::Xor: return 4;
    case NodeKind::Or: return 3;
    case NodeKind::Implies: return 2;
    case NodeKind::Iff: return 1;
    default: return kAtomPrecedence;
  }
}

std::string_view operator_symbol(NodeKind kind) {
  switch (kind) {
    case NodeKind::Not: return "!";
    case NodeKind::And: return "&";
    case NodeKind::Xor: return "^";
    case NodeKind::Or: return "|";
    case NodeKind::Implies: return "->";
    case NodeKind::Iff: return "<->";
    default: return "";
  }
}

Formula parse_formula(std::string_view text, int concepts, int labels) {
  if (concepts < 1 || labels < 1) {
    throw Error(fmt::format("concept and label counts must be >= 1 (got {}, {})", concepts,
                            labels));
  }
  return Parser(text, concepts, labels).parse();
}

}  // namespace nesy
