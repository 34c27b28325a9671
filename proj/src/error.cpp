#include "plasmo/types.hpp"

namespace plasmo {

Error::Error(ErrorCode code, std::string tag, const std::string& message)
    : std::runtime_error(tag + ": " + message), code_(code), tag_(std::move(tag)) {}

void fail(ErrorCode code, const std::string& tag, const std::string& message) {
  throw Error(code, tag, message);
}

}  // namespace plasmo
