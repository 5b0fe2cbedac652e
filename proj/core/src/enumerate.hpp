#pragma once

// Chunked enumeration of reduced words in lexicographic order.

#include <cstdint>
#include <vector>

#include "hypbdry/tree.hpp"

namespace hypbdry::detail {

// Advances `w` to the next reduced word of the same length; false after the last one.
inline bool next_word(int num_letters, std::vector<Letter>& w) {
  for (std::size_t pos = w.size(); pos-- > 0;) {
    int forbidden = pos > 0 ? inverse_letter(w[pos - 1]) : -1;
    int next = w[pos] + 1;
    if (next == forbidden) ++next;
    if (next < num_letters) {
      w[pos] = static_cast<Letter>(next);
      for (std::size_t i = pos + 1; i < w.size(); ++i) {
        Letter f = inverse_letter(w[i - 1]);
        w[i] = f == 0 ? 1 : 0;
      }
      return true;
    }
  }
  return false;
}

// Calls body(letters) for the words of length n with lexicographic rank in [lo, hi).
template <class Body>
void for_words_in_range(const FreeGroup& g, std::size_t n, std::uint64_t lo, std::uint64_t hi, Body&& body) {
  if (lo >= hi) return;
  std::vector<Letter> w = g.word_at(n, lo).letters();
  for (std::uint64_t i = lo; i < hi; ++i) {
    body(w);
    if (i + 1 < hi) next_word(g.num_letters(), w);
  }
}

}  // namespace hypbdry::detail
