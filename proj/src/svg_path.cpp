#include "fibercuit/svg_path.hpp"

#include <cctype>
#include <cstdlib>

namespace fibercuit {

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  void skip() {
    while (pos_ < s_.size() && (std::isspace(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == ',')) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  bool peek_command(char& c) {
    skip();
    if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
      c = s_[pos_];
      return true;
    }
    return false;
  }
  void advance() { ++pos_; }
  bool number(double& v) {
    skip();
    if (pos_ >= s_.size()) return false;
    const std::string tmp(s_.substr(pos_, std::min<size_t>(64, s_.size() - pos_)));
    char* end = nullptr;
    v = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str()) return false;
    pos_ += static_cast<size_t>(end - tmp.c_str());
    return true;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;
};

}  // namespace

bool parse_path_data(std::string_view d, std::vector<Subpath>& out) {
  Scanner sc(d);
  Vec2 cur;
  Vec2 start;
  char cmd = 0;
  while (!sc.done()) {
    char c;
    if (sc.peek_command(c)) {
      cmd = c;
      sc.advance();
      if (cmd == 'Z' || cmd == 'z') {
        if (out.empty()) return false;
        out.back().closed = true;
        cur = start;
        continue;
      }
    } else if (cmd == 0 || cmd == 'Z' || cmd == 'z') {
      return false;
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd));
    switch (std::toupper(static_cast<unsigned char>(cmd))) {
      case 'M': {
        double x, y;
        if (!sc.number(x) || !sc.number(y)) return false;
        cur = rel ? cur + Vec2{x, y} : Vec2{x, y};
        start = cur;
        out.push_back(Subpath{{cur}, false});
        cmd = rel ? 'l' : 'L';  // implicit lineto after moveto
        break;
      }
      case 'L': {
        double x, y;
        if (!sc.number(x) || !sc.number(y) || out.empty()) return false;
        cur = rel ? cur + Vec2{x, y} : Vec2{x, y};
        out.back().points.push_back(cur);
        break;
      }
      case 'H': {
        double x;
        if (!sc.number(x) || out.empty()) return false;
        cur.x = rel ? cur.x + x : x;
        out.back().points.push_back(cur);
        break;
      }
      case 'V': {
        double y;
        if (!sc.number(y) || out.empty()) return false;
        cur.y = rel ? cur.y + y : y;
        out.back().points.push_back(cur);
        break;
      }
      default:
        return false;
    }
  }
  return true;
}

}  // namespace fibercuit
