#ifndef DIVLAB_WORDS_HPP
#define DIVLAB_WORDS_HPP

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

#include "divlab/common.hpp"

namespace divlab {

// One generator or formal inverse.  Symbols live in a fixed indexed list on
// the owning model; index i and i^1 are mutually inverse, with the plain
// generator at the even index.  ShortLex comparisons use index order, so the
// fixed order is: generator 0, its inverse, generator 1, its inverse, ...
struct GeneratorSymbol {
  std::string label;
};

inline int inverse_symbol(int s) { return s ^ 1; }
inline bool is_plain_symbol(int s) { return (s & 1) == 0; }

// A word is a sequence of symbol indices.  Words are inputs/outputs only;
// group elements are kept in canonical payload form by the models.
using Word = std::vector<int>;

inline Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inverse_symbol(*it));
  return out;
}

// Inverse label convention: swap the case of the first alphabetic character
// ("a" <-> "A", "e1" <-> "E1").  Falls back to a "~" suffix for labels with
// no alphabetic lead, which none of the built-in families produce.
inline std::string inverse_label(const std::string& label) {
  std::string out = label;
  if (!out.empty() && std::isalpha((unsigned char)out[0])) {
    out[0] = std::islower((unsigned char)out[0]) ? (char)std::toupper((unsigned char)out[0])
                                                 : (char)std::tolower((unsigned char)out[0]);
    return out;
  }
  return out + "~";
}

// Expands plain-generator labels into the interleaved symbol list.
inline std::vector<GeneratorSymbol> make_symbols(const std::vector<std::string>& plain_labels) {
  std::vector<GeneratorSymbol> out;
  out.reserve(plain_labels.size() * 2);
  for (const auto& l : plain_labels) {
    out.push_back({l});
    out.push_back({inverse_label(l)});
  }
  return out;
}

inline std::string format_word(const std::vector<GeneratorSymbol>& symbols, const Word& w) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += symbols[(size_t)w[i]].label;
  }
  return out;
}

// Parses a space-separated word over the symbol labels.  Unknown tokens are
// a validation error naming the token.
inline Word parse_word(const std::vector<GeneratorSymbol>& symbols, const std::string& text) {
  Word out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    int found = -1;
    for (size_t s = 0; s < symbols.size(); ++s) {
      if (symbols[s].label == tok) {
        found = (int)s;
        break;
      }
    }
    if (found < 0) throw ValidationError("unknown generator token '" + tok + "'");
    out.push_back(found);
  }
  return out;
}

}  // namespace divlab

#endif  // DIVLAB_WORDS_HPP
