/*
 * Copyright 2026 The semantic_vtr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace vtr {

/// Two landmarks too close in the horizontal plane to define a pair frame.
class DegeneratePair : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pose was expressed in a different map frame than expected.
class FrameMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer than the minimum number of common unique landmarks.
class InsufficientLandmarks : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every candidate object pair was geometrically degenerate.
class NoValidPair : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A keyframe path was empty where at least one pose is required.
class EmptyPath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; `field()` names the offending field path.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& field_path, const std::string& what)
      : std::runtime_error("schema error at '" + field_path + "': " + what),
        field_(field_path) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A perturbation referenced an object label not present in the world.
class UnknownLabel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scripted bootstrap motion ended before enough objects were mapped.
class BootstrapFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vtr
