// Copyright 2026 The Strobe Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#pragma once

#include <stdexcept>

namespace strobe {

/// Base class for every error the toolkit raises.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File and format errors.
struct FileNotFound : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct CorruptImage : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Argument validation.
struct InvalidParameter : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct ImageTooSmall : Error { using Error::Error; };

// Dataset and statistics errors.
struct ParseError : Error { using Error::Error; };
struct MissingFile : Error { using Error::Error; };
struct DuplicateEntry : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct EmptyScope : Error { using Error::Error; };

// Remote backend errors.
struct NetworkError : Error { using Error::Error; };
struct ProtocolError : Error { using Error::Error; };
struct Unavailable : Error { using Error::Error; };

}  // namespace strobe
