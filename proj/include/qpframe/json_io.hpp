#pragma once

#include <string>
#include <vector>

#include "qpframe/frame.hpp"
#include "qpframe/framelet_set.hpp"

namespace qpframe {

// Serialization is deterministic: every container is sorted and keys are
// emitted in schema order, so equal values produce identical bytes.
std::string to_json(const PadicRational& x);
std::string to_json(const Ball& b);
std::string to_json(const CycScalar& s);
std::string to_json(const PFunction& f);
std::string to_json(const GeneratorSet& gens);
std::string to_json(const CoefficientTable& t);
std::string to_json(const MultiframeletSet& s);
std::string corpus_to_json(const std::vector<PFunction>& corpus);

/// Columns l, j, a, coeff_re, coeff_im, abs2; the floating columns are the
/// 53-bit evaluations of the exact entries. Rows follow the table order.
std::string table_to_csv(const CoefficientTable& t);

// Parsers throw std::runtime_error with a message naming the offending
// field. Serialization numbers generators 1-based; parsers convert back.
PadicRational padic_from_json(const std::string& text, long p);
PFunction pfunction_from_json(const std::string& text);
std::vector<PFunction> corpus_from_json(const std::string& text);
GeneratorSet generator_set_from_json(const std::string& text);
CoefficientTable table_from_json(const std::string& text);
MultiframeletSet set_from_json(const std::string& text);

}  // namespace qpframe
