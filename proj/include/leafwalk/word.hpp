#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace leafwalk::lattice {

class WordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Freely reduced word over {A, a, B, b}; lowercase is the inverse letter.
// The leftmost letter is the outermost factor: "AB" means A * B.
class Word {
 public:
  Word() = default;

  // Throws WordError on a foreign letter or an adjacent inverse pair.
  static Word parse(std::string_view text);
  static Word letter(char c);

  static bool is_letter(char c) { return c == 'A' || c == 'a' || c == 'B' || c == 'b'; }
  static char inverse_letter(char c) { return static_cast<char>(c ^ 0x20); }

  const std::string& str() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  char operator[](std::size_t i) const { return letters_[i]; }

  Word inverse() const;

  // Multiply on the right by one letter, cancelling if needed.
  void push_back(char c);

  // Reduced product.
  Word operator*(const Word& rhs) const;

  bool operator==(const Word&) const = default;

 private:
  std::string letters_;
};

// Length first, then byte-wise lexicographic ("A" < "B" < "a" < "b").
struct ShortLex {
  bool operator()(const Word& x, const Word& y) const {
    if (x.length() != y.length()) return x.length() < y.length();
    return x.str() < y.str();
  }
};

}  // namespace leafwalk::lattice

template <>
struct std::hash<leafwalk::lattice::Word> {
  std::size_t operator()(const leafwalk::lattice::Word& w) const noexcept {
    return std::hash<std::string>{}(w.str());
  }
};
