#pragma once

#include <stdexcept>
#include <string>

namespace hfecg {

// Each category maps to a distinct CLI exit code (see tools/hfecg.cpp).
enum class ErrorKind {
  io,
  format,
  parse,
  length_mismatch,
  insufficient_data,
  domain,
  data,
  numerical,
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

#define HFECG_DEFINE_ERROR(Name, Kind)                                         \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &message) : Error(Kind, message) {}        \
  };

HFECG_DEFINE_ERROR(IoError, ErrorKind::io)
HFECG_DEFINE_ERROR(FormatError, ErrorKind::format)
HFECG_DEFINE_ERROR(ParseError, ErrorKind::parse)
HFECG_DEFINE_ERROR(LengthMismatchError, ErrorKind::length_mismatch)
HFECG_DEFINE_ERROR(InsufficientDataError, ErrorKind::insufficient_data)
HFECG_DEFINE_ERROR(DomainError, ErrorKind::domain)
HFECG_DEFINE_ERROR(DataError, ErrorKind::data)
HFECG_DEFINE_ERROR(NumericalError, ErrorKind::numerical)

#undef HFECG_DEFINE_ERROR

} // namespace hfecg
