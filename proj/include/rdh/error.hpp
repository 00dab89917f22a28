#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PgmErrorKind {
  BadMagic,         // not a PNM file at all
  Unsupported,      // a PNM variant other than P5
  MalformedHeader,  // missing or non-numeric header fields
  BadMaxval,        // maxval other than 255
  Truncated,        // fewer pixel bytes than width*height
  Io,               // open/read/write failure
};

class PgmError : public Error {
 public:
  PgmError(PgmErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  PgmErrorKind kind() const noexcept { return kind_; }

 private:
  PgmErrorKind kind_;
};

/// The payload (plus location map and overhead) does not fit into the cover.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t max_payload_bits)
      : Error(what), max_payload_bits_(max_payload_bits) {}
  /// Best measured payload capacity in bits; 0 when not even the overhead fits.
  std::size_t max_payload_bits() const noexcept { return max_payload_bits_; }

 private:
  std::size_t max_payload_bits_;
};

/// Input to extract() is not a marked image produced by this codec.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

}  // namespace rdh
