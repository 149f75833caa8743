// Copyright 2026 The fluxshot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLUXSHOT_ERRORS_H
#define FLUXSHOT_ERRORS_H

#include <stdexcept>
#include <string>

namespace fluxshot {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// A physical or numerical parameter is outside its valid domain.
class ParameterError : public Error {
   public:
    using Error::Error;
};

/// No positive finite temperature reproduces the requested population.
class NoFiniteTemperatureError : public ParameterError {
   public:
    using ParameterError::ParameterError;
};

/// A level label or named quantity was not found.
class LookupError : public Error {
   public:
    using Error::Error;
};

class ConvergenceError : public Error {
   public:
    using Error::Error;
};

class DiscretizationError : public Error {
   public:
    using Error::Error;
};

class DegenerateInputError : public Error {
   public:
    using Error::Error;
};

/// A least-squares or linear fit produced an unusable result.
class FitError : public Error {
   public:
    using Error::Error;
};

/// A conditional probability was requested for an empty conditioning class.
class UndefinedConditionalError : public Error {
   public:
    using Error::Error;
};

/// Scenario configuration failed schema validation.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// Output directory contents do not match their manifests.
class IntegrityError : public Error {
   public:
    using Error::Error;
};

}  // namespace fluxshot

#endif
