#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace opine {

// Decodes the UTF-8 code point starting at byte offset `i` of `s` and
// advances `i` past it. Malformed bytes decode as U+FFFD, one byte at a time.
char32_t utf8_next(std::string_view s, std::size_t& i);

std::size_t utf8_length(std::string_view s);

// CJK unified ideograph blocks (BMP extensions A plus the base block,
// compatibility ideographs, and the supplementary plane extensions).
bool is_cjk_ideograph(char32_t cp);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Splits one TSV line on hard tabs. No quoting or escaping.
std::vector<std::string> split_tsv(std::string_view line);

// Seeded RNG with hand-rolled draws so sequences do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n). n must be > 0.
  std::size_t bounded(std::size_t n) { return static_cast<std::size_t>(next() % n); }

  // Uniform in [0, 1) with 53 bits of entropy.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::swap(v[i], v[bounded(i + 1)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

void warn(const std::string& message);

}  // namespace opine
