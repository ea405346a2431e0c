#pragma once

#include <stdexcept>
#include <string>

namespace privstory {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class TaxonomyError : public Error {
  public:
    using Error::Error;
};

class CorpusError : public Error {
  public:
    using Error::Error;
};

class PromptError : public Error {
  public:
    using Error::Error;
};

class EmbeddingError : public Error {
  public:
    using Error::Error;
};

/// Raised by chat providers; `retryable()` marks transient endpoint failures.
class GatewayError : public Error {
  public:
    GatewayError(const std::string &what, bool retryable = false) : Error(what), retryable_(retryable) {}
    [[nodiscard]] bool retryable() const noexcept { return retryable_; }

  private:
    bool retryable_;
};

class MissingReplayRecord : public GatewayError {
  public:
    explicit MissingReplayRecord(const std::string &fingerprint)
        : GatewayError("no replay record for fingerprint " + fingerprint), fingerprint_(fingerprint) {}
    [[nodiscard]] const std::string &fingerprint() const noexcept { return fingerprint_; }

  private:
    std::string fingerprint_;
};

class StoryError : public Error {
  public:
    using Error::Error;
};

class EvaluationError : public Error {
  public:
    using Error::Error;
};

class ExportError : public Error {
  public:
    using Error::Error;
};

/// Review workflow errors carry an HTTP-ish status so the service can map them.
class ReviewError : public Error {
  public:
    ReviewError(const std::string &what, int status = 400) : Error(what), status_(status) {}
    [[nodiscard]] int status() const noexcept { return status_; }

  private:
    int status_;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace privstory
