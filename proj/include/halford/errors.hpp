// Copyright 2026 The Halford Authors
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

#ifndef HALFORD_ERRORS_HPP
#define HALFORD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace halford {

/// Base class for all halford errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A parameter is outside its mathematical domain (shape <= 0, alpha not in
/// (0,1), rho outside (0,1], ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An observation lies outside the pair's declared support.
class SupportError : public Error {
 public:
  using Error::Error;
};

/// A draw or atom violates mutual absolute continuity (log B non-finite).
class AbsoluteContinuityError : public Error {
 public:
  using Error::Error;
};

/// The requested evaluation method does not apply to this pair or order.
class MethodError : public Error {
 public:
  using Error::Error;
};

/// A check or study plan is internally inconsistent (missing sampler,
/// budgets too small, non-increasing grid, ...).
class PlanError : public Error {
 public:
  using Error::Error;
};

/// A draw budget is too small to be meaningful.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented API contract (wrong transform exponent,
/// empty weight vector, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Unknown output format requested.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A grid has too few usable points for the requested certificate.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while emitting results.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A quantity is evaluated outside its effective domain (e.g. a variance
/// identity at an order where I(t) itself diverges).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace halford

#endif  // HALFORD_ERRORS_HPP
