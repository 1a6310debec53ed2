#pragma once

#include "subopt/algebra.hpp"

namespace subopt {

// positioned syntax error in an algebra document; line and column are 1-based
struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& msg);
    int line, column;
};

// Statements, one per line or separated by ';', '#' to end of line is a comment:
//   dim 4
//   basis e1 e2 e3 e4              (optional, default e1..eN)
//   param a (a != 0, a < 1)        (constraints optional)
//   [e1,e4] = a e1 - 1/2 e3
//   exp 2 = ((1,0),(t2,1))         (closed-form override, entries in t<k>)
//   name A_{4,6}
LieAlgebra parse_algebra(const std::string& text);

// inverse of parse_algebra up to whitespace
std::string serialize_algebra(const LieAlgebra& alg);

}  // namespace subopt
