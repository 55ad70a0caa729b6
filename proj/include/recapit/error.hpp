#pragma once

#include <stdexcept>
#include <string>

namespace recapit {

enum class ErrorCode { not_found, invalid_input, conflict, io };

const char* to_string(ErrorCode code);

// Base of every error the library throws. `detail` carries a field path
// (`aois[1].polygon[0]`) or a file path when one is known.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::string detail = {})
        : Error(ErrorCode::invalid_input, message, std::move(detail)) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message, std::string detail = {})
        : Error(ErrorCode::io, message, std::move(detail)) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& message, std::string detail = {})
        : Error(ErrorCode::not_found, message, std::move(detail)) {}
};

class ConflictError : public Error {
public:
    explicit ConflictError(const std::string& message, std::string detail = {})
        : Error(ErrorCode::conflict, message, std::move(detail)) {}
};

// An embedding or title provider could not produce a result.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& message, std::string detail = {})
        : Error(ErrorCode::io, message, std::move(detail)) {}
};

}  // namespace recapit
