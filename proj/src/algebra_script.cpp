#include "mcced/algebra_script.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mcced/error.hpp"

namespace mcced::algebra {

namespace {

class Parser {
 public:
  Parser(const std::string& text, int N) : s_(text), N_(N) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::parse, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (accept('+'))
        p += term();
      else if (accept('-'))
        p -= term();
      else
        return p;
    }
  }

  Polynomial term() {
    Polynomial p = factor();
    while (accept('*')) p = p * factor();
    return p;
  }

  Rational integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected a number");
    return Rational(s_.substr(start, pos_ - start));
  }

  Rational rational() {
    const bool neg = accept('-');
    Rational r = integer();
    if (accept('/')) {
      const Rational d = integer();
      if (d == 0) error("zero denominator");
      r /= d;
    }
    return neg ? Rational(-r) : r;
  }

  int small_int() {
    const Rational r = integer();
    if (r > 64) error("index too large");
    return static_cast<int>(boost::multiprecision::numerator(r));
  }

  Polynomial factor() {
    skip();
    if (accept('-')) return -factor();
    if (accept('(')) {
      Polynomial p = expr();
      expect(')');
      return p;
    }
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      Rational r = integer();
      if (accept('/')) {
        const Rational d = integer();
        if (d == 0) error("zero denominator");
        r /= d;
      }
      return Polynomial::scalar(r);
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name.empty()) error("expected an expression");
    if (name == "H") {
      Rational omega = 1;
      if (accept('(')) {
        omega = rational();
        expect(')');
      }
      return build_h_ph(N_, omega);
    }
    expect('(');
    std::vector<int> args{small_int()};
    while (accept(',')) args.push_back(small_int());
    expect(')');
    auto want = [&](std::size_t n) {
      if (args.size() != n) error(name + " takes " + std::to_string(n) + " arguments");
    };
    if (name == "a" || name == "ad") {
      want(2);
      return base_operator(N_, args[0], args[1], name == "ad");
    }
    if (name == "alpha" || name == "alphad") {
      want(1);
      return build_alpha(N_, args[0], name == "alphad");
    }
    if (name == "arad" || name == "aradd") {
      want(2);
      return build_a_rad(N_, args[0], args[1], name == "aradd");
    }
    error("unknown generator '" + name + "'");
  }

  const std::string& s_;
  int N_;
  std::size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string parity_string(std::optional<int> p) {
  if (!p) return "mixed";
  return *p > 0 ? "+1" : "-1";
}

}  // namespace

Polynomial parse_expression(const std::string& text, int N) { return Parser(text, N).parse(); }

ScriptResult run_algebra_script(std::istream& in, std::ostream& out) {
  ScriptResult res;
  int N = 2;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    try {
      std::string cmd_part = body, expected;
      bool has_expected = false;
      if (const auto arrow = body.find("=>"); arrow != std::string::npos) {
        cmd_part = trim(body.substr(0, arrow));
        expected = trim(body.substr(arrow + 2));
        has_expected = true;
      }
      const auto sp = cmd_part.find_first_of(" \t");
      const std::string cmd = cmd_part.substr(0, sp);
      const std::string rest = sp == std::string::npos ? "" : trim(cmd_part.substr(sp));
      if (cmd == "N") {
        const int n = std::stoi(rest);
        if (n < 2) fail(ErrorCode::domain, "N must be >= 2");
        N = n;
        continue;
      }
      std::string result;
      bool ok = true;
      if (cmd == "COMM") {
        const auto args = split(rest, ';');
        if (args.size() != 2) fail(ErrorCode::parse, "COMM takes two expressions separated by ';'");
        const Polynomial c = commutator(parse_expression(args[0], N), parse_expression(args[1], N));
        result = c.str();
        if (has_expected) ok = c == parse_expression(expected, N);
      } else if (cmd == "APPLY") {
        const FockState st = apply_to_vacuum(parse_expression(rest, N));
        result = st.str() + " |0>";
        if (has_expected) ok = st == apply_to_vacuum(parse_expression(expected, N));
      } else if (cmd == "NORM") {
        const FockState st = apply_to_vacuum(parse_expression(rest, N));
        const Rational n = inner_product(st, st);
        result = n.str();
        if (has_expected) {
          const Polynomial e = parse_expression(expected, N);
          ok = e.degree() == 0 && e.constant() == n;
        }
      } else if (cmd == "PARITY") {
        result = parity_string(time_parity(apply_to_vacuum(parse_expression(rest, N))));
        if (has_expected) ok = result == expected;
      } else if (cmd == "SUBSIDIARY") {
        const auto args = split(rest, ';');
        if (args.size() != 2) fail(ErrorCode::parse, "SUBSIDIARY takes an expression and a lightlike vector");
        const auto comps = split(args[1], ',');
        if (comps.size() != 4) fail(ErrorCode::parse, "lightlike vector needs 4 components");
        Lightlike l;
        for (int i = 0; i < 4; ++i) {
          const Polynomial c = parse_expression(comps[i], N);
          if (c.degree() != 0) fail(ErrorCode::parse, "lightlike components must be numbers");
          l[i] = c.constant();
        }
        const auto per = subsidiary_check(apply_to_vacuum(parse_expression(args[0], N)), l, N);
        bool all = true;
        result = "[";
        for (std::size_t k = 0; k < per.size(); ++k) {
          result += (k ? " " : "") + std::string(per[k] ? "true" : "false");
          all = all && per[k];
        }
        result += "]";
        if (has_expected) {
          if (expected != "true" && expected != "false")
            fail(ErrorCode::parse, "SUBSIDIARY expects true or false");
          ok = all == (expected == "true");
        }
      } else {
        fail(ErrorCode::parse, "unknown command '" + cmd + "'");
      }
      ++res.commands;
      out << lineno << ": " << cmd_part << " -> " << result;
      if (has_expected) {
        ++res.assertions;
        if (ok) {
          out << "  [ok]";
        } else {
          ++res.failures;
          out << "  [FAIL expected " << expected << "]";
        }
      }
      out << '\n';
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": bad number");
    }
  }
  return res;
}

}  // namespace mcced::algebra
