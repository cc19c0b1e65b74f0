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

#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

namespace graded {

/// Arithmetic expression over coordinates x0, x1, ... (also written x[0]).
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'e' | variable | name '(' expr ')' | '(' expr ')'
///
/// Functions: sin cos tan exp log sqrt atan tanh sinh cosh abs.
class Expression {
 public:
  struct Node;

  /// Throws DomainError with the failing offset. Variables must be < dim.
  static Expression parse(const std::string& text, int dim);

  double operator()(const Eigen::VectorXd& x) const;
  const std::string& text() const { return text_; }

 private:
  Expression(std::string text, std::shared_ptr<const Node> root) : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace graded
