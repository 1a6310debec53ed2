#pragma once

#include "subopt/families.hpp"

namespace subopt {

// a representative as printed: codes plus one 'g' (Greek, +-1) or 'l' (Latin) per coefficient
struct ExpectedFamily {
    Codes codes;
    std::string kinds;
};

struct CatalogEntry {
    std::string label;
    std::vector<std::string> aliases;
    std::string document;  // algebra definition in the input grammar
    // exact representative sets, per dimension
    std::map<int, std::vector<ExpectedFamily>> expected;
    // families that must appear when only part of a system is printed
    std::map<int, std::vector<ExpectedFamily>> required;
    std::map<int, int> expected_count;
    // vertex legend of the printed graphs, in order
    std::map<int, std::vector<Codes>> legend;
    // printed representatives that are not p-families
    std::map<int, std::vector<std::string>> exclusions;
    std::vector<std::map<std::string, Rational>> concrete;  // admissible sample instantiations
    std::vector<std::string> notes;

    LieAlgebra algebra() const;
};

struct UnknownLabel : std::runtime_error {
    explicit UnknownLabel(const std::string& l) : std::runtime_error("unknown catalog label '" + l + "'") {}
};

const std::vector<CatalogEntry>& entries();
// tolerant of TeX decoration: "A_{3,5}^a", "A35", "a3,5" all match
const CatalogEntry& lookup(const std::string& label);
std::string normalize_label(const std::string& label);

}  // namespace subopt
