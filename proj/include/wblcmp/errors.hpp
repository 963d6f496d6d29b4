// errors.hpp -- exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace wblcmp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// linear algebra
struct NotHermitian : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };

// configuration / scenario
struct ConfigInvalid : Error { using Error::Error; };
struct SpecInvalid : Error { using Error::Error; };

// RTF estimation
struct DegenerateCovariance : Error { using Error::Error; };
struct DegenerateRtf : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };

// beamformer
struct SingularConstraintGram : Error { using Error::Error; };

// metrics / I/O
struct LengthMismatch : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct ChannelMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace wblcmp
