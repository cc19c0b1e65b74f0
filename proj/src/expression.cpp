// Copyright 2026 The graded-min Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graded/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "graded/error.hpp"

namespace graded {

struct Expression::Node {
  enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double value = 0.0;
  int index = 0;
  double (*fn)(double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const Eigen::VectorXd& x) const {
    switch (kind) {
      case Kind::Constant:
        return value;
      case Kind::Variable:
        return x[index];
      case Kind::Negate:
        return -args[0]->eval(x);
      case Kind::Add:
        return args[0]->eval(x) + args[1]->eval(x);
      case Kind::Sub:
        return args[0]->eval(x) - args[1]->eval(x);
      case Kind::Mul:
        return args[0]->eval(x) * args[1]->eval(x);
      case Kind::Div:
        return args[0]->eval(x) / args[1]->eval(x);
      case Kind::Pow: {
        const double base = args[0]->eval(x);
        const double exponent = args[1]->eval(x);
        // Integer exponents by repeated multiplication keep polynomials exact.
        if (exponent == std::floor(exponent) && std::abs(exponent) <= 16) {
          double out = 1.0;
          for (int i = 0; i < static_cast<int>(std::abs(exponent)); ++i) out *= base;
          return exponent < 0 ? 1.0 / out : out;
        }
        return std::pow(base, exponent);
      }
      case Kind::Call:
        return fn(args[0]->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

struct FunctionEntry {
  const char* name;
  double (*fn)(double);
};

double abs_fn(double v) { return std::abs(v); }
double sin_fn(double v) { return std::sin(v); }
double cos_fn(double v) { return std::cos(v); }
double tan_fn(double v) { return std::tan(v); }
double exp_fn(double v) { return std::exp(v); }
double log_fn(double v) { return std::log(v); }
double sqrt_fn(double v) { return std::sqrt(v); }
double atan_fn(double v) { return std::atan(v); }
double tanh_fn(double v) { return std::tanh(v); }
double sinh_fn(double v) { return std::sinh(v); }
double cosh_fn(double v) { return std::cosh(v); }

constexpr FunctionEntry kFunctions[] = {
    {"sin", sin_fn},   {"cos", cos_fn},   {"tan", tan_fn},   {"exp", exp_fn},   {"log", log_fn},  {"sqrt", sqrt_fn},
    {"atan", atan_fn}, {"tanh", tanh_fn}, {"sinh", sinh_fn}, {"cosh", cosh_fn}, {"abs", abs_fn},
};

class Parser {
 public:
  Parser(const std::string& text, int dim) : s_(text), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw DomainError("expression '" + s_ + "' at offset " + std::to_string(pos_) + ": " + msg);
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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+'))
        lhs = make(Kind::Add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Kind::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = make(Kind::Mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Kind::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Constant;
      n->value = value;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "pi" || name == "e") {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Constant;
        n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
        return n;
      }
      if (name[0] == 'x') {
        int index = -1;
        if (name.size() > 1) {
          if (name.find_first_not_of("0123456789", 1) != std::string::npos) fail("bad variable '" + name + "'");
          index = std::stoi(name.substr(1));
        } else {
          expect('[');
          skip();
          const std::size_t digits = pos_;
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
          if (digits == pos_) fail("expected variable index");
          index = std::stoi(s_.substr(digits, pos_ - digits));
          expect(']');
        }
        if (index < 0 || index >= dim_) fail("variable x" + std::to_string(index) + " outside dimension");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Variable;
        n->index = index;
        return n;
      }
      for (const auto& entry : kFunctions) {
        if (name == entry.name) {
          expect('(');
          NodePtr arg = expr();
          expect(')');
          auto n = std::make_shared<Expression::Node>();
          n->kind = Kind::Call;
          n->fn = entry.fn;
          n->args = {arg};
          return n;
        }
      }
      fail("unknown name '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  Parser parser(text, dim);
  return Expression(text, parser.parse());
}

double Expression::operator()(const Eigen::VectorXd& x) const { return root_->eval(x); }

}  // namespace graded
