#include "dagparse/util.hpp"

#include <cctype>
#include <sstream>

namespace dagparse {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::size_t utf8_len(unsigned char c) {
  if ((c & 0xE0) == 0xC0) return 2;
  if ((c & 0xF0) == 0xE0) return 3;
  if ((c & 0xF8) == 0xF0) return 4;
  return 1;
}

}  // namespace

std::string utf8_prefix(const std::string& s, int count) {
  std::size_t i = 0;
  int taken = 0;
  while (i < s.size() && taken < count) {
    i += utf8_len(static_cast<unsigned char>(s[i]));
    ++taken;
  }
  return s.substr(0, i);
}

std::string utf8_suffix(const std::string& s, int count) {
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < s.size(); i += utf8_len(static_cast<unsigned char>(s[i])))
    starts.push_back(i);
  if (static_cast<int>(starts.size()) <= count) return s;
  return s.substr(starts[starts.size() - static_cast<std::size_t>(count)]);
}

std::string word_shape(const std::string& word) {
  std::string shape;
  char last = 0;
  int run = 0;
  for (unsigned char c : word) {
    char cls;
    if (std::isupper(c)) {
      cls = 'X';
    } else if (std::islower(c)) {
      cls = 'x';
    } else if (std::isdigit(c)) {
      cls = 'd';
    } else {
      cls = static_cast<char>(c);
    }
    if (cls == last) {
      if (++run <= 4) shape.push_back(cls);
    } else {
      last = cls;
      run = 1;
      shape.push_back(cls);
    }
  }
  return shape;
}

}  // namespace dagparse
