#ifndef TRAILNAV_ERROR_HPP
#define TRAILNAV_ERROR_HPP

#include <stdexcept>
#include <string>

namespace trailnav
{

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

#define TRAILNAV_DEFINE_ERROR(Name)          \
  class Name : public Error                  \
  {                                          \
  public:                                    \
    using Error::Error;                      \
  }

TRAILNAV_DEFINE_ERROR(EmptyInput);
TRAILNAV_DEFINE_ERROR(NonFiniteInput);
TRAILNAV_DEFINE_ERROR(ShapeError);
TRAILNAV_DEFINE_ERROR(DomainError);
TRAILNAV_DEFINE_ERROR(InsufficientPoints);
TRAILNAV_DEFINE_ERROR(DegenerateGeometry);
TRAILNAV_DEFINE_ERROR(NoTraversableSpace);
TRAILNAV_DEFINE_ERROR(CollisionSpace);
TRAILNAV_DEFINE_ERROR(ReplanRequired);
TRAILNAV_DEFINE_ERROR(ParamError);
TRAILNAV_DEFINE_ERROR(InputError);
TRAILNAV_DEFINE_ERROR(RefusedWaypoint);
TRAILNAV_DEFINE_ERROR(ParseError);

#undef TRAILNAV_DEFINE_ERROR

}  // namespace trailnav

#endif  // TRAILNAV_ERROR_HPP
