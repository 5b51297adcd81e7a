/*
 * Copyright (c) the mrdikit authors
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
#ifndef MRDIKIT_ERRORS_HPP
#define MRDIKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mrdikit {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON-level syntax error. `where()` carries "line L, column C".
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string where)
      : Error(message + " (" + where + ")"), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

/// Structural violation in a document. `path()` is a slash-separated
/// location inside the tree, "/" denoting the root.
class DocumentError : public Error {
 public:
  DocumentError(const std::string& message, std::string path)
      : Error(message + " [at " + path + "]"), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Schema compilation failure (unresolvable $ref, bad regex, bad keyword value).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Violated precondition or invariant in the arithmetic kernel.
class AlgebraError : public Error {
 public:
  using Error::Error;
};

/// Save/load failure in the session codec layer.
class CodecError : public Error {
 public:
  using Error::Error;
};

/// Version upgrade failure (no script path, invalid script output).
class UpgradeError : public Error {
 public:
  using Error::Error;
};

/// A tree path did not address the expected node.
class PathError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrdikit

#endif  // MRDIKIT_ERRORS_HPP
