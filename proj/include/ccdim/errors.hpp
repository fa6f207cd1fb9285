#pragma once

#include <stdexcept>
#include <string>

namespace ccdim {

// Malformed caller input: unreadable files, ragged rows, out-of-range
// positions, bad flag combinations. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A configured resource cap would be exceeded. The message carries the
// computed bound so the caller can see how far off the request was.
// CLI exit code 3.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Online-game protocol violation: the revealed labels are inconsistent with
// every concept in the class.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ccdim
