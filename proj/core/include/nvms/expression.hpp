// Copyright 2026 The nvms Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "nvms/field.hpp"

namespace nvms {

/// Arithmetic expression over x and y.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | x | y | pi | func '(' expr ')' | '(' expr ')'
///   func    := exp | log | sqrt | sin | cos | tanh | abs
///
/// Parse failures throw ParseError with the column of the offending token.
class Expression {
 public:
  static Expression parse(const std::string& text);

  double operator()(double x, double y = 0.0) const { return eval_(x, y); }
  double operator()(const Point& p) const { return eval_(p.x(), p.y()); }
  const std::string& source() const { return source_; }
  ScalarFn function() const;

 private:
  using Eval = std::function<double(double, double)>;
  Expression(std::string source, Eval eval) : source_(std::move(source)), eval_(std::move(eval)) {}

  std::string source_;
  Eval eval_;
};

}  // namespace nvms
