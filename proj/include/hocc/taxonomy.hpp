#pragma once

// Crash severity classes and collision-type labels for a single impact.

#include "hocc/geometry.hpp"

#include <array>
#include <string_view>

namespace hocc {

enum class Severity { S0, S1, S2, S3 };
enum class CollisionType { front_to_front, angle, sideswipe, front_to_rear };

inline constexpr std::array<Severity, 4> kSeverities{Severity::S0, Severity::S1, Severity::S2, Severity::S3};
inline constexpr std::array<CollisionType, 4> kCollisionTypes{CollisionType::front_to_front, CollisionType::angle,
                                                              CollisionType::sideswipe, CollisionType::front_to_rear};

/// Upper bounds (inclusive) of S0, S1 and S2 on relative impact speed, m/s.
/// S1 is closed at 7.8 so the classes partition [0, inf).
inline constexpr std::array<double, 3> kSeverityBounds{5.3, 7.8, 10.3};

std::string_view to_string(Severity s);
std::string_view to_string(CollisionType t);
Severity severity_from_string(std::string_view s);
CollisionType collision_type_from_string(std::string_view s);

Severity severity_class(double relative_speed);

/// Label from the yaw difference and the faces met along the minimal
/// translation axis of two overlapping (or touching) footprints.
CollisionType classify_collision(const OrientedBoxd& a, const OrientedBoxd& b);

}  // namespace hocc
