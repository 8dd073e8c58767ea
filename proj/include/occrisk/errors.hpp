// Copyright 2026 The occrisk Authors
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

#ifndef OCCRISK__ERRORS_HPP_
#define OCCRISK__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace occrisk
{

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class EgoInsideObstacle : public Error
{
public:
  using Error::Error;
};

class OffRouteStart : public Error
{
public:
  using Error::Error;
};

class NonFiniteGradient : public Error
{
public:
  using Error::Error;
};

class PathTooShort : public Error
{
public:
  using Error::Error;
};

class Infeasible : public Error
{
public:
  using Error::Error;
};

class FormatError : public Error
{
public:
  using Error::Error;
};

class UsageError : public Error
{
public:
  using Error::Error;
};

}  // namespace occrisk

#endif  // OCCRISK__ERRORS_HPP_
