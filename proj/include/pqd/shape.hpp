#pragma once

#include "pqd/syntax.hpp"

namespace pqd {

/// Erases state content from a type: basic state types become Unit, linear
/// functions become intuitionistic ones over shapes. Parameter types are
/// fixed points.
TypePtr shape_type(const TypePtr& a);

/// Maps a term to its parameter skeleton. Parameter terms are fixed points;
/// labels become unit; lambda, application, force and apply become their
/// primed counterparts.
TermPtr shape_term(const TermPtr& m);

/// Applies shape_type to every binding, keeping indices.
Context shape_ctx(const Context& g);

}  // namespace pqd
