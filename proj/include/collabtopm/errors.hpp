// Copyright 2026 The collabtopm Authors.
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

#ifndef COLLABTOPM_ERRORS_HPP_
#define COLLABTOPM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace collabtopm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// theta_[m] == theta_[m+1]; the complexity measures are infinite.
class DegeneratePivot : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class RoundCapExceeded : public Error {
 public:
  using Error::Error;
};

class InsufficientBudget : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace collabtopm

#endif  // COLLABTOPM_ERRORS_HPP_
