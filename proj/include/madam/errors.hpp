#pragma once

#include <stdexcept>
#include <string>

namespace madam {

/// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated operation precondition (bad round number, empty input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// --- backend ---------------------------------------------------------------

class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::string fingerprint)
      : Error(what + " [request " + fingerprint + "]"), detail_(what), fingerprint_(std::move(fingerprint)) {}
  /// Message without the request fingerprint.
  const std::string& detail() const noexcept { return detail_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string detail_;
  std::string fingerprint_;
};

class TransportError : public BackendError {
 public:
  TransportError(const std::string& what, int status, std::string fingerprint)
      : BackendError(what + " (status " + std::to_string(status) + ")", std::move(fingerprint)),
        reason_(what), status_(status) {}
  const std::string& reason() const noexcept { return reason_; }
  /// HTTP status, or 0 when no response arrived.
  int status() const noexcept { return status_; }

 private:
  std::string reason_;
  int status_;
};

class AuthError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ScriptMiss : public BackendError {
 public:
  using BackendError::BackendError;
};

class SinkError : public Error {
 public:
  using Error::Error;
};

// --- prompting -------------------------------------------------------------

class MissingSlot : public Error {
 public:
  explicit MissingSlot(std::string slot)
      : Error("missing template slot '" + slot + "'"), slot_(std::move(slot)) {}
  const std::string& slot() const noexcept { return slot_; }

 private:
  std::string slot_;
};

// --- dataset ---------------------------------------------------------------

class InsufficientSupply : public Error {
 public:
  explicit InsufficientSupply(std::string resource, const std::string& detail = {})
      : Error("insufficient supply: " + resource + (detail.empty() ? "" : " (" + detail + ")")),
        resource_(std::move(resource)) {}
  const std::string& resource() const noexcept { return resource_; }

 private:
  std::string resource_;
};

class NoSupportingChunk : public Error {
 public:
  using Error::Error;
};

class AnswerNotFound : public Error {
 public:
  using Error::Error;
};

class ReplacementEqualsAnswer : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus is empty") {}
};

class EmptyGold : public Error {
 public:
  EmptyGold() : Error("gold answer set is empty") {}
};

}  // namespace madam
