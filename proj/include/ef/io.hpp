#pragma once

#include "ef/synth.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace ef {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest exact decimal form of a double (round-trips bit-for-bit through
/// parse_double). Used everywhere numbers hit a file or CSV payload.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Unit quaternion (x, y, z, w) from a rotation matrix, w >= 0.
Vec4 quaternion_from_rotation(const Mat3& R);
Mat3 rotation_from_quaternion(const Vec4& q);

/// Versioned self-describing dataset document: spec echo, both trajectories,
/// ground-truth planes and per-pose labeled local points. Numbers round-trip
/// bitwise.
void write_dataset(std::ostream& os, const Dataset& d);
Dataset read_dataset(std::istream& is);
void save_dataset(const std::string& path, const Dataset& d);
Dataset load_dataset(const std::string& path);

/// One line per pose: index tx ty tz qx qy qz qw.
void write_trajectory(std::ostream& os, const std::vector<Pose>& traj);
std::vector<Pose> read_trajectory(std::istream& is);
void save_trajectory(const std::string& path, const std::vector<Pose>& traj);
std::vector<Pose> load_trajectory(const std::string& path);

}  // namespace ef
