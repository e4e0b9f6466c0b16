// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <stdexcept>
#include <string>

namespace patchsep {

// Base class for every error raised by the library. Each condition gets its
// own type so callers can catch precisely what they care about.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// audio_io
struct MalformedContainer : Error { using Error::Error; };
struct UnsupportedEncoding : Error { using Error::Error; };
struct EmptyAudio : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };

// spectral
struct NonPowerOfTwoLength : Error { using Error::Error; };
struct SignalTooShort : Error { using Error::Error; };

// patching
struct PatchLargerThanMatrix : Error { using Error::Error; };

// autoenc
struct DimensionMismatch : Error { using Error::Error; };
struct AsymmetricTopology : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };
struct MalformedModelFile : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };

// cluster
struct TooFewPoints : Error { using Error::Error; };
struct DegenerateInput : Error { using Error::Error; };

// separation
struct NegativeMagnitude : Error { using Error::Error; };

// evalkit
struct RateMismatch : Error { using Error::Error; };
struct EmptySources : Error { using Error::Error; };
struct AllZeroReference : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct FewerEstimatesThanReferences : Error { using Error::Error; };

}  // namespace patchsep
