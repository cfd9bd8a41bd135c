#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "masim/error.hpp"

namespace masim {

/// The three binary relations of the correspondence vocabulary.
enum class Rel : std::uint8_t { R, Box, Dia };

inline constexpr Rel kAllRelations[] = {Rel::R, Rel::Box, Rel::Dia};

/// Concrete-grammar spelling: R, Rb, Rd.
inline std::string_view rel_name(Rel r) {
  switch (r) {
    case Rel::R: return "R";
    case Rel::Box: return "Rb";
    case Rel::Dia: return "Rd";
  }
  return "?";
}

enum class Notation : std::uint8_t { ascii, unicode };

/// Finite set of proposition-letter indices (the unary part of a vocabulary).
/// The binary relations R, R□, R◇ are always implicitly present.
struct Signature {
  std::set<unsigned> letters;

  friend bool operator==(const Signature&, const Signature&) = default;
};

// ---------------------------------------------------------------------------
// Modal intuitionistic formulas

struct ModalNode;

/// Immutable modal formula over ⊥, pₙ, ∧, ∨, →, □, ◇. Copies share structure.
class ModalFormula {
 public:
  enum class Kind : std::uint8_t { bottom, prop, conj, disj, impl, box, dia };

  static ModalFormula bottom();
  static ModalFormula prop(unsigned index);
  static ModalFormula conj(ModalFormula lhs, ModalFormula rhs);
  static ModalFormula disj(ModalFormula lhs, ModalFormula rhs);
  static ModalFormula impl(ModalFormula lhs, ModalFormula rhs);
  static ModalFormula box(ModalFormula child);
  static ModalFormula dia(ModalFormula child);
  static ModalFormula binary(Kind kind, ModalFormula lhs, ModalFormula rhs);
  static ModalFormula unary(Kind kind, ModalFormula child);

  Kind kind() const noexcept;
  unsigned index() const;
  const ModalFormula& lhs() const;
  const ModalFormula& rhs() const;
  const ModalFormula& child() const { return lhs(); }

  bool is_binary() const noexcept {
    return kind() == Kind::conj || kind() == Kind::disj || kind() == Kind::impl;
  }
  bool is_modal() const noexcept { return kind() == Kind::box || kind() == Kind::dia; }

  /// Number of nodes.
  std::size_t size() const noexcept;
  /// Connective nesting depth; 0 for ⊥ and letters.
  std::size_t depth() const noexcept;

  /// Identity of the shared node, usable as a memoization key.
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const ModalFormula& a, const ModalFormula& b);

 private:
  explicit ModalFormula(std::shared_ptr<const ModalNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ModalNode> node_;
};

struct ModalNode {
  ModalFormula::Kind kind;
  unsigned index = 0;
  std::size_t size = 1;
  std::size_t depth = 0;
  std::vector<ModalFormula> kids;
};

inline ModalFormula ModalFormula::bottom() {
  static const ModalFormula f{std::make_shared<const ModalNode>(ModalNode{Kind::bottom, 0, 1, 0, {}})};
  return f;
}

inline ModalFormula ModalFormula::prop(unsigned index) {
  if (index == 0) throw InputError("proposition letters are numbered from 1");
  return ModalFormula{std::make_shared<const ModalNode>(ModalNode{Kind::prop, index, 1, 0, {}})};
}

inline ModalFormula ModalFormula::binary(Kind kind, ModalFormula lhs, ModalFormula rhs) {
  if (kind != Kind::conj && kind != Kind::disj && kind != Kind::impl)
    throw InputError("not a binary connective");
  const std::size_t size = 1 + lhs.size() + rhs.size();
  const std::size_t depth = 1 + std::max(lhs.depth(), rhs.depth());
  return ModalFormula{std::make_shared<const ModalNode>(
      ModalNode{kind, 0, size, depth, {std::move(lhs), std::move(rhs)}})};
}

inline ModalFormula ModalFormula::unary(Kind kind, ModalFormula child) {
  if (kind != Kind::box && kind != Kind::dia) throw InputError("not a modal operator");
  const std::size_t size = 1 + child.size();
  const std::size_t depth = 1 + child.depth();
  return ModalFormula{
      std::make_shared<const ModalNode>(ModalNode{kind, 0, size, depth, {std::move(child)}})};
}

inline ModalFormula ModalFormula::conj(ModalFormula l, ModalFormula r) { return binary(Kind::conj, std::move(l), std::move(r)); }
inline ModalFormula ModalFormula::disj(ModalFormula l, ModalFormula r) { return binary(Kind::disj, std::move(l), std::move(r)); }
inline ModalFormula ModalFormula::impl(ModalFormula l, ModalFormula r) { return binary(Kind::impl, std::move(l), std::move(r)); }
inline ModalFormula ModalFormula::box(ModalFormula c) { return unary(Kind::box, std::move(c)); }
inline ModalFormula ModalFormula::dia(ModalFormula c) { return unary(Kind::dia, std::move(c)); }

inline ModalFormula::Kind ModalFormula::kind() const noexcept { return node_->kind; }

inline unsigned ModalFormula::index() const {
  if (kind() != Kind::prop) throw InputError("index() on a non-letter formula");
  return node_->index;
}

inline const ModalFormula& ModalFormula::lhs() const {
  if (node_->kids.empty()) throw InputError("formula has no subformulas");
  return node_->kids[0];
}

inline const ModalFormula& ModalFormula::rhs() const {
  if (node_->kids.size() < 2) throw InputError("formula is not binary");
  return node_->kids[1];
}

inline std::size_t ModalFormula::size() const noexcept { return node_->size; }
inline std::size_t ModalFormula::depth() const noexcept { return node_->depth; }

inline bool operator==(const ModalFormula& a, const ModalFormula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  if (a.kind() == ModalFormula::Kind::prop) return a.node_->index == b.node_->index;
  for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
    if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
  return true;
}

/// Proposition letters occurring in a modal formula.
inline std::set<unsigned> letters(const ModalFormula& f) {
  std::set<unsigned> out;
  std::vector<const ModalFormula*> stack{&f};
  while (!stack.empty()) {
    const ModalFormula* g = stack.back();
    stack.pop_back();
    if (g->kind() == ModalFormula::Kind::prop) {
      out.insert(g->index());
    } else if (g->kind() != ModalFormula::Kind::bottom) {
      stack.push_back(&g->lhs());
      if (g->is_binary()) stack.push_back(&g->rhs());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correspondence-language formulas

struct FolNode;

/// Immutable first-order formula over {⊥, Pₙ(v), R/Rb/Rd(v,w), ∧, ∨, →, ∀, ∃}.
/// There is no identity atom.
class FolFormula {
 public:
  enum class Kind : std::uint8_t { bottom, pred, rel, conj, disj, impl, forall, exists };

  static FolFormula bottom();
  static FolFormula pred(unsigned index, std::string var);
  static FolFormula rel(Rel r, std::string v1, std::string v2);
  static FolFormula conj(FolFormula lhs, FolFormula rhs);
  static FolFormula disj(FolFormula lhs, FolFormula rhs);
  static FolFormula impl(FolFormula lhs, FolFormula rhs);
  static FolFormula forall(std::string var, FolFormula body);
  static FolFormula exists(std::string var, FolFormula body);
  static FolFormula binary(Kind kind, FolFormula lhs, FolFormula rhs);
  static FolFormula quantifier(Kind kind, std::string var, FolFormula body);

  Kind kind() const noexcept;
  /// Predicate index of a Pₙ atom.
  unsigned index() const;
  /// Relation of a binary atom.
  Rel relation() const;
  /// Variables of an atom (one for Pₙ, two for relations) or the bound
  /// variable of a quantifier.
  const std::vector<std::string>& vars() const noexcept;
  const std::string& bound_var() const;
  const FolFormula& lhs() const;
  const FolFormula& rhs() const;
  const FolFormula& body() const { return lhs(); }

  bool is_binary() const noexcept {
    return kind() == Kind::conj || kind() == Kind::disj || kind() == Kind::impl;
  }
  bool is_quantifier() const noexcept { return kind() == Kind::forall || kind() == Kind::exists; }
  bool is_atomic() const noexcept {
    return kind() == Kind::bottom || kind() == Kind::pred || kind() == Kind::rel;
  }

  const std::set<std::string>& free_variables() const noexcept;
  /// Quantifier nesting depth r(φ).
  std::size_t degree() const noexcept;
  std::size_t size() const noexcept;
  const void* id() const noexcept { return node_.get(); }

  friend bool operator==(const FolFormula& a, const FolFormula& b);

 private:
  explicit FolFormula(std::shared_ptr<const FolNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const FolNode> node_;
};

struct FolNode {
  FolFormula::Kind kind;
  unsigned index = 0;
  Rel relation = Rel::R;
  std::vector<std::string> vars{};
  std::vector<FolFormula> kids{};
  std::set<std::string> free{};
  std::size_t degree = 0;
  std::size_t size = 1;
};

inline FolFormula FolFormula::bottom() {
  static const FolFormula f{std::make_shared<const FolNode>(FolNode{Kind::bottom})};
  return f;
}

inline FolFormula FolFormula::pred(unsigned index, std::string var) {
  if (index == 0) throw InputError("predicate letters are numbered from 1");
  FolNode n{Kind::pred};
  n.index = index;
  n.free = {var};
  n.vars = {std::move(var)};
  return FolFormula{std::make_shared<const FolNode>(std::move(n))};
}

inline FolFormula FolFormula::rel(Rel r, std::string v1, std::string v2) {
  FolNode n{Kind::rel};
  n.relation = r;
  n.free = {v1, v2};
  n.vars = {std::move(v1), std::move(v2)};
  return FolFormula{std::make_shared<const FolNode>(std::move(n))};
}

inline FolFormula FolFormula::binary(Kind kind, FolFormula lhs, FolFormula rhs) {
  if (kind != Kind::conj && kind != Kind::disj && kind != Kind::impl)
    throw InputError("not a binary connective");
  FolNode n{kind};
  n.free = lhs.free_variables();
  n.free.insert(rhs.free_variables().begin(), rhs.free_variables().end());
  n.degree = std::max(lhs.degree(), rhs.degree());
  n.size = 1 + lhs.size() + rhs.size();
  n.kids = {std::move(lhs), std::move(rhs)};
  return FolFormula{std::make_shared<const FolNode>(std::move(n))};
}

inline FolFormula FolFormula::quantifier(Kind kind, std::string var, FolFormula body) {
  if (kind != Kind::forall && kind != Kind::exists) throw InputError("not a quantifier");
  FolNode n{kind};
  n.free = body.free_variables();
  n.free.erase(var);
  n.degree = body.degree() + 1;
  n.size = 1 + body.size();
  n.vars = {std::move(var)};
  n.kids = {std::move(body)};
  return FolFormula{std::make_shared<const FolNode>(std::move(n))};
}

inline FolFormula FolFormula::conj(FolFormula l, FolFormula r) { return binary(Kind::conj, std::move(l), std::move(r)); }
inline FolFormula FolFormula::disj(FolFormula l, FolFormula r) { return binary(Kind::disj, std::move(l), std::move(r)); }
inline FolFormula FolFormula::impl(FolFormula l, FolFormula r) { return binary(Kind::impl, std::move(l), std::move(r)); }
inline FolFormula FolFormula::forall(std::string v, FolFormula b) { return quantifier(Kind::forall, std::move(v), std::move(b)); }
inline FolFormula FolFormula::exists(std::string v, FolFormula b) { return quantifier(Kind::exists, std::move(v), std::move(b)); }

inline FolFormula::Kind FolFormula::kind() const noexcept { return node_->kind; }

inline unsigned FolFormula::index() const {
  if (kind() != Kind::pred) throw InputError("index() on a non-predicate formula");
  return node_->index;
}

inline Rel FolFormula::relation() const {
  if (kind() != Kind::rel) throw InputError("relation() on a non-relational formula");
  return node_->relation;
}

inline const std::vector<std::string>& FolFormula::vars() const noexcept { return node_->vars; }

inline const std::string& FolFormula::bound_var() const {
  if (!is_quantifier()) throw InputError("bound_var() on a non-quantified formula");
  return node_->vars[0];
}

inline const FolFormula& FolFormula::lhs() const {
  if (node_->kids.empty()) throw InputError("formula has no subformulas");
  return node_->kids[0];
}

inline const FolFormula& FolFormula::rhs() const {
  if (node_->kids.size() < 2) throw InputError("formula is not binary");
  return node_->kids[1];
}

inline const std::set<std::string>& FolFormula::free_variables() const noexcept { return node_->free; }
inline std::size_t FolFormula::degree() const noexcept { return node_->degree; }
inline std::size_t FolFormula::size() const noexcept { return node_->size; }

inline bool operator==(const FolFormula& a, const FolFormula& b) {
  if (a.node_ == b.node_) return true;
  const FolNode& x = *a.node_;
  const FolNode& y = *b.node_;
  if (x.kind != y.kind || x.size != y.size || x.index != y.index || x.vars != y.vars) return false;
  if (x.kind == FolFormula::Kind::rel && x.relation != y.relation) return false;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (!(x.kids[i] == y.kids[i])) return false;
  return true;
}

/// r(φ): 0 on ⊥ and atoms, max over binary connectives, +1 per quantifier.
inline std::size_t degree(const FolFormula& f) noexcept { return f.degree(); }

/// Unary predicate indices occurring in φ.
inline std::set<unsigned> predicates(const FolFormula& f) {
  std::set<unsigned> out;
  std::vector<const FolFormula*> stack{&f};
  while (!stack.empty()) {
    const FolFormula* g = stack.back();
    stack.pop_back();
    if (g->kind() == FolFormula::Kind::pred) out.insert(g->index());
    if (!g->is_atomic()) {
      stack.push_back(&g->lhs());
      if (g->is_binary()) stack.push_back(&g->rhs());
    }
  }
  return out;
}

/// Binary relations occurring in φ.
inline std::set<Rel> relations(const FolFormula& f) {
  std::set<Rel> out;
  std::vector<const FolFormula*> stack{&f};
  while (!stack.empty()) {
    const FolFormula* g = stack.back();
    stack.pop_back();
    if (g->kind() == FolFormula::Kind::rel) out.insert(g->relation());
    if (!g->is_atomic()) {
      stack.push_back(&g->lhs());
      if (g->is_binary()) stack.push_back(&g->rhs());
    }
  }
  return out;
}

namespace detail {

inline bool alpha_eq(const FolFormula& a, const FolFormula& b,
                     std::vector<std::pair<std::string, std::string>>& bound) {
  using K = FolFormula::Kind;
  if (a.kind() != b.kind()) return false;
  // Innermost binder wins; unbound names must coincide literally.
  auto same_var = [&](const std::string& x, const std::string& y) {
    for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
      if (it->first == x || it->second == y) return it->first == x && it->second == y;
    }
    return x == y;
  };
  switch (a.kind()) {
    case K::bottom: return true;
    case K::pred: return a.index() == b.index() && same_var(a.vars()[0], b.vars()[0]);
    case K::rel:
      return a.relation() == b.relation() && same_var(a.vars()[0], b.vars()[0]) &&
             same_var(a.vars()[1], b.vars()[1]);
    case K::conj:
    case K::disj:
    case K::impl: return alpha_eq(a.lhs(), b.lhs(), bound) && alpha_eq(a.rhs(), b.rhs(), bound);
    case K::forall:
    case K::exists: {
      bound.emplace_back(a.bound_var(), b.bound_var());
      const bool eq = alpha_eq(a.body(), b.body(), bound);
      bound.pop_back();
      return eq;
    }
  }
  return false;
}

}  // namespace detail

/// Structural equality up to renaming of bound variables.
inline bool alpha_equivalent(const FolFormula& a, const FolFormula& b) {
  std::vector<std::pair<std::string, std::string>> bound;
  return detail::alpha_eq(a, b, bound);
}

// ---------------------------------------------------------------------------
// Printing
//
// Precedence, loosest first: -> (right associative), |, &, then the unary
// operators box/dia and the quantifiers. Quantifier bodies are parsed at the
// unary level, so a binary body is always parenthesized.

namespace detail {

constexpr int kPrecImpl = 1;
constexpr int kPrecDisj = 2;
constexpr int kPrecConj = 3;
constexpr int kPrecUnary = 4;

inline std::string_view op_text(ModalFormula::Kind k, Notation n) {
  const bool u = n == Notation::unicode;
  switch (k) {
    case ModalFormula::Kind::conj: return u ? " ∧ " : " & ";
    case ModalFormula::Kind::disj: return u ? " ∨ " : " | ";
    case ModalFormula::Kind::impl: return u ? " → " : " -> ";
    default: return "";
  }
}

inline int precedence(ModalFormula::Kind k) {
  switch (k) {
    case ModalFormula::Kind::impl: return kPrecImpl;
    case ModalFormula::Kind::disj: return kPrecDisj;
    case ModalFormula::Kind::conj: return kPrecConj;
    default: return kPrecUnary;
  }
}

inline void print(const ModalFormula& f, int required, Notation n, std::string& out) {
  using K = ModalFormula::Kind;
  const int prec = precedence(f.kind());
  const bool wrap = prec < required;
  if (wrap) out += '(';
  switch (f.kind()) {
    case K::bottom: out += n == Notation::unicode ? "⊥" : "false"; break;
    case K::prop: out += 'p' + std::to_string(f.index()); break;
    case K::box:
      out += n == Notation::unicode ? "□" : "box ";
      print(f.child(), kPrecUnary, n, out);
      break;
    case K::dia:
      out += n == Notation::unicode ? "◇" : "dia ";
      print(f.child(), kPrecUnary, n, out);
      break;
    case K::impl:
      print(f.lhs(), kPrecImpl + 1, n, out);
      out += op_text(f.kind(), n);
      print(f.rhs(), f.rhs().kind() == f.kind() ? kPrecImpl + 1 : kPrecImpl, n, out);
      break;
    case K::disj:
    case K::conj:
      print(f.lhs(), prec, n, out);
      out += op_text(f.kind(), n);
      print(f.rhs(), prec + 1, n, out);
      break;
  }
  if (wrap) out += ')';
}

inline int precedence(FolFormula::Kind k) {
  switch (k) {
    case FolFormula::Kind::impl: return kPrecImpl;
    case FolFormula::Kind::disj: return kPrecDisj;
    case FolFormula::Kind::conj: return kPrecConj;
    default: return kPrecUnary;
  }
}

inline std::string_view rel_text(Rel r, Notation n) {
  if (n == Notation::ascii) return rel_name(r);
  switch (r) {
    case Rel::R: return "R";
    case Rel::Box: return "R□";
    case Rel::Dia: return "R◇";
  }
  return "?";
}

inline void print(const FolFormula& f, int required, Notation n, std::string& out) {
  using K = FolFormula::Kind;
  const bool u = n == Notation::unicode;
  const int prec = precedence(f.kind());
  const bool wrap = prec < required;
  if (wrap) out += '(';
  switch (f.kind()) {
    case K::bottom: out += u ? "⊥" : "false"; break;
    case K::pred: out += 'P' + std::to_string(f.index()) + '(' + f.vars()[0] + ')'; break;
    case K::rel:
      out += rel_text(f.relation(), n);
      out += '(' + f.vars()[0] + ',' + f.vars()[1] + ')';
      break;
    case K::forall:
    case K::exists:
      if (u) {
        out += f.kind() == K::forall ? "∀" : "∃";
        out += f.bound_var();
        if (f.body().is_binary()) {
          out += '(';
          print(f.body(), kPrecImpl, n, out);
          out += ')';
        } else {
          out += ' ';
          print(f.body(), kPrecUnary, n, out);
        }
      } else {
        out += f.kind() == K::forall ? "forall " : "exists ";
        out += f.bound_var() + ". ";
        print(f.body(), kPrecUnary, n, out);
      }
      break;
    case K::impl:
      print(f.lhs(), kPrecImpl + 1, n, out);
      out += u ? " → " : " -> ";
      print(f.rhs(), f.rhs().kind() == f.kind() ? kPrecImpl + 1 : kPrecImpl, n, out);
      break;
    case K::disj:
    case K::conj:
      print(f.lhs(), prec, n, out);
      if (f.kind() == K::conj)
        out += u ? " ∧ " : " & ";
      else
        out += u ? " ∨ " : " | ";
      print(f.rhs(), prec + 1, n, out);
      break;
  }
  if (wrap) out += ')';
}

}  // namespace detail

inline std::string to_string(const ModalFormula& f, Notation n = Notation::ascii) {
  std::string out;
  detail::print(f, detail::kPrecImpl, n, out);
  return out;
}

inline std::string to_string(const FolFormula& f, Notation n = Notation::ascii) {
  std::string out;
  detail::print(f, detail::kPrecImpl, n, out);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const ModalFormula& f) { return os << to_string(f); }
inline std::ostream& operator<<(std::ostream& os, const FolFormula& f) { return os << to_string(f); }

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
  enum class Type : std::uint8_t { ident, lparen, rparen, comma, dot, amp, bar, arrow, end };
  Type type;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(std::string_view src) {
  using T = Token::Type;
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back({T::ident, std::string(src.substr(start, i - start)), start});
      continue;
    }
    switch (c) {
      case '(': out.push_back({T::lparen, "(", i}); break;
      case ')': out.push_back({T::rparen, ")", i}); break;
      case ',': out.push_back({T::comma, ",", i}); break;
      case '.': out.push_back({T::dot, ".", i}); break;
      case '&': out.push_back({T::amp, "&", i}); break;
      case '|': out.push_back({T::bar, "|", i}); break;
      case '-':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          out.push_back({T::arrow, "->", i});
          ++i;
          break;
        }
        [[fallthrough]];
      default: throw ParseError(std::string("unknown character '") + c + "'", i);
    }
    ++i;
  }
  out.push_back({T::end, "", src.size()});
  return out;
}

/// Parses a letter token `<prefix><digits>` with a positive index; 0 otherwise.
inline unsigned letter_index(const std::string& text, char prefix) {
  if (text.size() < 2 || text[0] != prefix) return 0;
  unsigned long v = 0;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return 0;
    v = v * 10 + static_cast<unsigned long>(text[i] - '0');
    if (v > 1'000'000'000UL) return 0;
  }
  return static_cast<unsigned>(v);
}

inline bool is_keyword(const std::string& s) {
  return s == "false" || s == "forall" || s == "exists" || s == "box" || s == "dia";
}

class ParserBase {
 protected:
  explicit ParserBase(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(Token::Type t) {
    if (peek().type != t) return false;
    ++pos_;
    return true;
  }
  void expect(Token::Type t, std::string_view what) {
    if (!accept(t)) fail(std::string("expected ") + std::string(what));
  }
  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    throw ParseError(message + (t.type == Token::Type::end ? " but reached end of input" : " but found '" + t.text + "'"),
                     t.pos);
  }
  void expect_end() {
    if (peek().type != Token::Type::end) fail("expected end of input");
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class ModalParser : ParserBase {
 public:
  explicit ModalParser(std::string_view src) : ParserBase(src) {}

  ModalFormula parse() {
    ModalFormula f = implication();
    expect_end();
    return f;
  }

 private:
  ModalFormula implication() {
    ModalFormula lhs = disjunction();
    if (accept(Token::Type::arrow)) return ModalFormula::impl(std::move(lhs), implication());
    return lhs;
  }
  ModalFormula disjunction() {
    ModalFormula f = conjunction();
    while (accept(Token::Type::bar)) f = ModalFormula::disj(std::move(f), conjunction());
    return f;
  }
  ModalFormula conjunction() {
    ModalFormula f = unary();
    while (accept(Token::Type::amp)) f = ModalFormula::conj(std::move(f), unary());
    return f;
  }
  ModalFormula unary() {
    if (accept(Token::Type::lparen)) {
      ModalFormula f = implication();
      expect(Token::Type::rparen, "')'");
      return f;
    }
    if (peek().type != Token::Type::ident) fail("expected a formula");
    const std::string& text = peek().text;
    if (text == "false") {
      next();
      return ModalFormula::bottom();
    }
    if (text == "box") {
      next();
      return ModalFormula::box(unary());
    }
    if (text == "dia") {
      next();
      return ModalFormula::dia(unary());
    }
    if (const unsigned idx = letter_index(text, 'p'); idx != 0) {
      next();
      return ModalFormula::prop(idx);
    }
    fail("unknown token");
  }
};

class FolParser : ParserBase {
 public:
  explicit FolParser(std::string_view src) : ParserBase(src) {}

  FolFormula parse() {
    FolFormula f = implication();
    expect_end();
    return f;
  }

 private:
  FolFormula implication() {
    FolFormula lhs = disjunction();
    if (accept(Token::Type::arrow)) return FolFormula::impl(std::move(lhs), implication());
    return lhs;
  }
  FolFormula disjunction() {
    FolFormula f = conjunction();
    while (accept(Token::Type::bar)) f = FolFormula::disj(std::move(f), conjunction());
    return f;
  }
  FolFormula conjunction() {
    FolFormula f = unary();
    while (accept(Token::Type::amp)) f = FolFormula::conj(std::move(f), unary());
    return f;
  }
  std::string variable() {
    if (peek().type != Token::Type::ident || is_keyword(peek().text)) fail("expected a variable");
    return next().text;
  }
  FolFormula unary() {
    if (accept(Token::Type::lparen)) {
      FolFormula f = implication();
      expect(Token::Type::rparen, "')'");
      return f;
    }
    if (peek().type != Token::Type::ident) fail("expected a formula");
    const std::string text = peek().text;
    if (text == "false") {
      next();
      return FolFormula::bottom();
    }
    if (text == "forall" || text == "exists") {
      next();
      std::string var = variable();
      expect(Token::Type::dot, "'.'");
      FolFormula body = unary();
      return text == "forall" ? FolFormula::forall(std::move(var), std::move(body))
                              : FolFormula::exists(std::move(var), std::move(body));
    }
    if (const unsigned idx = letter_index(text, 'P'); idx != 0) {
      next();
      expect(Token::Type::lparen, "'(' after predicate");
      std::string v = variable();
      if (peek().type == Token::Type::comma) fail("unary predicate applied to more than one argument:");
      expect(Token::Type::rparen, "')'");
      return FolFormula::pred(idx, std::move(v));
    }
    if (text == "R" || text == "Rb" || text == "Rd") {
      next();
      const Rel r = text == "R" ? Rel::R : text == "Rb" ? Rel::Box : Rel::Dia;
      expect(Token::Type::lparen, "'(' after relation");
      std::string v1 = variable();
      if (peek().type == Token::Type::rparen) fail("binary relation applied to one argument: expected ','");
      expect(Token::Type::comma, "','");
      std::string v2 = variable();
      expect(Token::Type::rparen, "')' (binary relation takes two arguments)");
      return FolFormula::rel(r, std::move(v1), std::move(v2));
    }
    fail("unknown token");
  }
};

}  // namespace detail

/// Parses the modal grammar:
///   false | p<digits> | f & f | f "|" f | f -> f | box f | dia f | ( f )
inline ModalFormula parse_modal(std::string_view text) { return detail::ModalParser(text).parse(); }

/// Parses the correspondence grammar:
///   false | P<digits>(v) | R(v,w) | Rb(v,w) | Rd(v,w) | forall v. f | exists v. f
/// plus the binary connectives of the modal grammar.
inline FolFormula parse_fol(std::string_view text) { return detail::FolParser(text).parse(); }

}  // namespace masim
