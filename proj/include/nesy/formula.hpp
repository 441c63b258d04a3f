#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "nesy/bitvec.hpp"

namespace nesy {

enum class NodeKind { Const, Var, Not, And, Or, Xor, Implies, Iff };

/// Which family a variable belongs to: concepts c1..ck or labels y1..yl.
enum class VarKind { Concept, Label };

/// Immutable propositional formula over concept and label variables.
/// Subtrees are shared, so copies are cheap.
class Formula {
 public:
  struct Node;

  static Formula constant(bool value);
  static Formula concept_var(int index);
  static Formula label_var(int index);
  static Formula negate(Formula child);
  static Formula binary(NodeKind kind, Formula lhs, Formula rhs);

  NodeKind kind() const;
  bool value() const;          // Const only
  VarKind var_kind() const;    // Var only
  int var_index() const;       // Var only, one-based
  Formula child() const;       // Not only
  Formula lhs() const;         // binary only
  Formula rhs() const;         // binary only

  /// Standard propositional semantics; `concepts` and `labels` must be as
  /// wide as the largest variable index used.
  bool evaluate(BitVec concepts, BitVec labels) const;

  /// Renders with the minimal parentheses needed to re-parse to the same tree.
  std::string to_string() const;

  /// Structural equality.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Binding strength, tightest first: ! & ^ | -> <->.
int precedence(NodeKind kind);
std::string_view operator_symbol(NodeKind kind);

/// Parses the knowledge language. Variables must be c1..c<concepts> or
/// y1..y<labels>. Binary operators are left-associative except `->`.
Formula parse_formula(std::string_view text, int concepts, int labels);

inline bool evaluate(const Formula& f, BitVec c, BitVec y) { return f.evaluate(c, y); }

}  // namespace nesy
