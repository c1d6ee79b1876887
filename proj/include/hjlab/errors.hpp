// Error types thrown across the library.  Each one corresponds to a
// distinct caller mistake or a numerical-budget failure; none of them is
// used for control flow inside the library itself.
#ifndef HJLAB_ERRORS_HPP
#define HJLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hjlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tabulated H fails the decrease-then-increase pattern beyond tolerance.
struct NotQuasiConvex : Error { using Error::Error; };

// Gradient query outside the tabulated sample range.
struct OutOfRange : Error { using Error::Error; };

// Level-set query below the minimum of H.
struct BelowMinimum : Error { using Error::Error; };

// Time step larger than the monotonicity bound cfl_safety * dx / max|H'|.
struct CflViolation : Error { using Error::Error; };

// A single step may not straddle a limiter/Hamiltonian switch time.
struct PhaseBoundaryCrossed : Error { using Error::Error; };

// Two solutions living on different grids were compared.
struct GridMismatch : Error { using Error::Error; };

// A junction point does not coincide with a grid node (no silent snapping).
struct JunctionOffGrid : Error { using Error::Error; };

// Ergodic averaging horizon too short for the requested bracket width.
struct HorizonTooShort : Error { using Error::Error; };

// Truncation radius does not contain all junctions.
struct RhoTooSmall : Error { using Error::Error; };

// The rho-sweep brackets keep drifting apart beyond tolerance.
struct NotConverged : Error { using Error::Error; };

// Oscillatory solve requested on a grid that does not resolve eps.
struct UnderResolved : Error { using Error::Error; };

// Corrector profile window smaller than the requested rescaling window.
struct ProfileTooNarrow : Error { using Error::Error; };

// Scenario violates the structural constraints (ordering, schedule floors).
struct InvalidScenario : Error { using Error::Error; };

// A strict check failed; carries both values in the message.
struct ToleranceExceeded : Error { using Error::Error; };

// Experiment config missing/ill-typed fields; message names the field.
struct ConfigInvalid : Error { using Error::Error; };

// Plot-data emission asked for a result file that does not exist.
struct MissingResult : Error { using Error::Error; };

} // namespace hjlab

#endif
