#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rstjpeg {

// Failure classes surfaced by the library. The CLI maps each one to a
// machine-readable error record, so the names are part of the public surface.
enum class ErrorKind {
  MalformedMarker,
  UnsupportedCoding,
  MultipleScans,
  NoRestartMarkers,
  InconsistentMarkers,
  InvalidHuffmanSpec,
  HuffmanDecodeFailure,
  TruncatedScan,
  MarkerDesyncError,
  BadKeyLength,
  RecipeMismatch,
  EmptyRegion,
  DimensionMismatch,
  ChannelMismatch,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace rstjpeg
