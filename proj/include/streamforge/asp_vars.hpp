#pragma once

// Variable bookkeeping shared by the safety checker and the grounder.

#include "streamforge/aspkit.hpp"

#include <set>
#include <string>
#include <vector>

namespace streamforge::asp {

using VariableSet = std::set<std::string>;

// Named variables of a term in order of first occurrence; `_` is skipped.
void collect_variables(const Term& term, std::vector<std::string>& out);
void collect_variables(const SymbolicAtom& atom, std::vector<std::string>& out);
void collect_variables(const BasicLiteral& lit, std::vector<std::string>& out);

bool all_bound(const Term& term, const VariableSet& bound);

// Variables that a positive occurrence of `term` binds once `bound` is known.
// Plain variables and function arguments bind; `X+c`, `X-c`, `c+X` and `-X`
// bind X when the other operand is already bound. `*` and `/` never bind.
void binding_variables(const Term& term, const VariableSet& bound, VariableSet& out);

// Extends `bound` to a fixpoint using the positive literals in `lits`:
// symbolic atoms bind their arguments, `X = t` binds X once t is bound.
void bind_from_literals(const std::vector<BasicLiteral>& lits, VariableSet& bound);

}  // namespace streamforge::asp
