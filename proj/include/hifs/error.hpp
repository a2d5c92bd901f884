#pragma once

#include <stdexcept>
#include <string>

namespace hifs {

/// Base class for every failure raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands belong to different algebras.
class algebra_mismatch : public error {
 public:
  using error::error;
};

/// Dimensions of vectors, matrices or point sets disagree.
class shape_mismatch : public error {
 public:
  using error::error;
};

/// An operation that needs a nonempty set received an empty one.
class empty_set : public error {
 public:
  using error::error;
};

/// A map family is not a contraction (Lipschitz constant >= 1).
class not_contractive : public error {
 public:
  using error::error;
};

/// An iterative procedure hit its iteration cap.
class convergence_failure : public error {
 public:
  using error::error;
};

class precondition_violation : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

/// Scene validation failure; `where` names the offending field or text position.
class scene_error : public error {
 public:
  scene_error(std::string where, const std::string& what)
      : error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace hifs
