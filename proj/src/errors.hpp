#pragma once

#include <stdexcept>

namespace bm {

// File could not be opened or written.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file or text exists but does not parse.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Receiver-side failure: no preamble, no separable threshold, short trace.
struct decode_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bm
