#include "leafwalk/word.hpp"

namespace leafwalk::lattice {

Word Word::parse(std::string_view text) {
  Word w;
  for (char c : text) {
    if (!is_letter(c)) {
      throw WordError("invalid letter '" + std::string(1, c) + "' in word \"" + std::string(text) + "\"");
    }
    if (!w.letters_.empty() && w.letters_.back() == inverse_letter(c)) {
      throw WordError("word \"" + std::string(text) + "\" is not freely reduced");
    }
    w.letters_.push_back(c);
  }
  return w;
}

Word Word::letter(char c) { return parse(std::string_view(&c, 1)); }

Word Word::inverse() const {
  Word w;
  w.letters_.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
    w.letters_.push_back(inverse_letter(*it));
  }
  return w;
}

void Word::push_back(char c) {
  if (!letters_.empty() && letters_.back() == inverse_letter(c)) {
    letters_.pop_back();
  } else {
    letters_.push_back(c);
  }
}

Word Word::operator*(const Word& rhs) const {
  Word w = *this;
  for (char c : rhs.letters_) w.push_back(c);
  return w;
}

}  // namespace leafwalk::lattice
