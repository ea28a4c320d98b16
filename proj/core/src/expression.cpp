// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#include "nvms/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

#include "nvms/errors.hpp"

namespace nvms {

namespace {

using Eval = std::function<double(double, double)>;

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Eval parse() {
    Eval e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression '" + s_ + "', column " + std::to_string(pos_ + 1) + ": " + what);
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

  Eval expr() {
    Eval lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = [l = lhs, r = term()](double x, double y) { return l(x, y) + r(x, y); };
      } else if (accept('-')) {
        lhs = [l = lhs, r = term()](double x, double y) { return l(x, y) - r(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Eval term() {
    Eval lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = [l = lhs, r = unary()](double x, double y) { return l(x, y) * r(x, y); };
      } else if (accept('/')) {
        lhs = [l = lhs, r = unary()](double x, double y) { return l(x, y) / r(x, y); };
      } else {
        return lhs;
      }
    }
  }

  Eval unary() {
    if (accept('-')) return [u = unary()](double x, double y) { return -u(x, y); };
    if (accept('+')) return unary();
    return power();
  }

  Eval power() {
    Eval base = primary();
    if (accept('^'))
      return [b = base, e = unary()](double x, double y) { return std::pow(b(x, y), e(x, y)); };
    return base;
  }

  Eval primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Eval e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return [v](double, double) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return [](double x, double) { return x; };
      if (name == "y") return [](double, double y) { return y; };
      if (name == "pi") return [](double, double) { return std::numbers::pi; };
      using Fn = double (*)(double);
      static const std::map<std::string, Fn> functions{
          {"exp", [](double v) { return std::exp(v); }},
          {"log", [](double v) { return std::log(v); }},
          {"sqrt", [](double v) { return std::sqrt(v); }},
          {"sin", [](double v) { return std::sin(v); }},
          {"cos", [](double v) { return std::cos(v); }},
          {"tanh", [](double v) { return std::tanh(v); }},
          {"abs", [](double v) { return std::abs(v); }}};
      const auto it = functions.find(name);
      if (it == functions.end()) {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      Eval arg = expr();
      if (!accept(')')) fail("expected ')'");
      return [f = it->second, arg](double x, double y) { return f(arg(x, y)); };
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  return Expression(text, Parser(text).parse());
}

ScalarFn Expression::function() const {
  return [eval = eval_](const Point& p) { return eval(p.x(), p.y()); };
}

}  // namespace nvms
