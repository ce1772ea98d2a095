#include "hplateau/errors.hpp"

namespace hplateau {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::not_associative: return "NotAssociative";
    case Errc::no_identity: return "NoIdentity";
    case Errc::no_inverse: return "NoInverse";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::infeasible_class: return "InfeasibleClass";
    case Errc::unknown_class: return "UnknownClass";
    case Errc::invalid_spectrum: return "InvalidSpectrum";
    case Errc::odd_point_count: return "OddPointCount";
    case Errc::cap_exceeded: return "CapExceeded";
    case Errc::degenerate_spec: return "DegenerateSpec";
    case Errc::max_iterations: return "MaxIterations";
    case Errc::projection_out_of_reach: return "ProjectionOutOfReach";
    case Errc::off_manifold_value: return "OffManifoldValue";
    case Errc::ball_outside_domain: return "BallOutsideDomain";
    case Errc::loop_hits_singular_set: return "LoopHitsSingularSet";
    case Errc::points_not_on_boundary: return "PointsNotOnBoundary";
    case Errc::seminorm_zero: return "SeminormZero";
    case Errc::config_error: return "ConfigError";
    case Errc::io_error: return "IoError";
    case Errc::parse_error: return "ParseError";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace hplateau
