#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>

#include "masim/semantics.hpp"
#include "masim/syntax.hpp"

namespace masim {

namespace detail {

/// Hands out y0, y1, … in order, skipping the free variable of the translation.
class FreshVariables {
 public:
  explicit FreshVariables(std::string avoid) : avoid_(std::move(avoid)) {}

  std::string next() {
    for (;;) {
      std::string v = "y" + std::to_string(counter_++);
      if (v != avoid_) return v;
    }
  }

 private:
  std::string avoid_;
  std::size_t counter_ = 0;
};

class Translator {
 public:
  Translator(Variant v, FreshVariables& fresh) : variant_(v), fresh_(fresh) {}

  FolFormula operator()(const ModalFormula& f, const std::string& x) {
    using K = ModalFormula::Kind;
    switch (f.kind()) {
      case K::bottom: return FolFormula::bottom();
      case K::prop: return FolFormula::pred(f.index(), x);
      case K::conj:
      case K::disj: {
        FolFormula lhs = (*this)(f.lhs(), x);
        FolFormula rhs = (*this)(f.rhs(), x);
        return f.kind() == K::conj ? FolFormula::conj(std::move(lhs), std::move(rhs))
                                   : FolFormula::disj(std::move(lhs), std::move(rhs));
      }
      case K::impl: {
        const std::string y = fresh_.next();
        FolFormula lhs = (*this)(f.lhs(), y);
        FolFormula rhs = (*this)(f.rhs(), y);
        FolFormula body = FolFormula::impl(std::move(lhs), std::move(rhs));
        return FolFormula::forall(y, FolFormula::impl(FolFormula::rel(Rel::R, x, y), std::move(body)));
      }
      case K::box: {
        if (variant_.box() == 1) return guarded_all(Rel::Box, x, f.child());
        const std::string y = fresh_.next();
        FolFormula inner = guarded_all(Rel::Box, y, f.child());
        return FolFormula::forall(y, FolFormula::impl(FolFormula::rel(Rel::R, x, y), std::move(inner)));
      }
      case K::dia: {
        if (variant_.dia() == 1) return guarded_some(Rel::Dia, x, f.child());
        const std::string y = fresh_.next();
        FolFormula inner = guarded_some(Rel::Dia, y, f.child());
        return FolFormula::forall(y, FolFormula::impl(FolFormula::rel(Rel::R, x, y), std::move(inner)));
      }
    }
    return FolFormula::bottom();
  }

  /// ∀y(r(x,y) → ST(I,y)).
  FolFormula guarded_all(Rel r, const std::string& x, const ModalFormula& child) {
    const std::string y = fresh_.next();
    FolFormula body = (*this)(child, y);
    return FolFormula::forall(y, FolFormula::impl(FolFormula::rel(r, x, y), std::move(body)));
  }

  /// ∃y(r(x,y) ∧ ST(I,y)).
  FolFormula guarded_some(Rel r, const std::string& x, const ModalFormula& child) {
    const std::string y = fresh_.next();
    FolFormula body = (*this)(child, y);
    return FolFormula::exists(y, FolFormula::conj(FolFormula::rel(r, x, y), std::move(body)));
  }

 private:
  Variant variant_;
  FreshVariables& fresh_;
};

}  // namespace detail

/// The (i,j)-standard x-translation of I. Bound variables are y0, y1, … in
/// order of introduction (outermost first), so the output is reproducible.
inline FolFormula translate(const ModalFormula& f, Variant v, const std::string& x = "x") {
  detail::FreshVariables fresh(x);
  return detail::Translator(v, fresh)(f, x);
}

/// degree(translate(I, v, x)) computed directly on I.
inline std::size_t translation_degree(const ModalFormula& f, Variant v) {
  using K = ModalFormula::Kind;
  switch (f.kind()) {
    case K::bottom:
    case K::prop: return 0;
    case K::conj:
    case K::disj: return std::max(translation_degree(f.lhs(), v), translation_degree(f.rhs(), v));
    case K::impl: return 1 + std::max(translation_degree(f.lhs(), v), translation_degree(f.rhs(), v));
    case K::box: return static_cast<std::size_t>(v.box()) + translation_degree(f.child(), v);
    case K::dia: return static_cast<std::size_t>(v.dia()) + translation_degree(f.child(), v);
  }
  return 0;
}

}  // namespace masim
