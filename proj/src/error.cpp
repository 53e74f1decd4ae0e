#include "gradprop/error.hpp"

#include <utility>

namespace gradprop {

const char* to_string(DataErrorCode code) {
  switch (code) {
    case DataErrorCode::FileOpen: return "file-open";
    case DataErrorCode::BadMagic: return "bad-magic";
    case DataErrorCode::BadHeader: return "bad-header";
    case DataErrorCode::Truncated: return "truncated";
    case DataErrorCode::CountMismatch: return "count-mismatch";
    case DataErrorCode::BadRecordLength: return "bad-record-length";
    case DataErrorCode::BadLabel: return "bad-label";
  }
  return "unknown";
}

DataError::DataError(DataErrorCode code, std::string path, std::uint64_t offset, const std::string& what)
    : std::runtime_error(path + ": " + to_string(code) + " at byte " + std::to_string(offset) + ": " + what),
      code_(code),
      path_(std::move(path)),
      offset_(offset) {}

DivergenceError::DivergenceError(std::size_t layer, std::size_t step, const std::string& what)
    : std::runtime_error(what + " (layer " + std::to_string(layer) + ", step " + std::to_string(step) + ")"),
      layer_(layer),
      step_(step) {}

}  // namespace gradprop
