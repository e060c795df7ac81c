#include "ef/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ef {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw parse_error("bad number: '" + s + "'");
  }
  return v;
}

Vec4 quaternion_from_rotation(const Mat3& R) {
  // Shepperd's method: pick the dominant diagonal combination.
  Vec4 q;  // (x, y, z, w)
  const double tr = R.trace();
  if (tr > 0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q << (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s,
        (R(1, 0) - R(0, 1)) / s, 0.25 * s;
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2.0;
    q << 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s,
        (R(2, 1) - R(1, 2)) / s;
  } else if (R(1, 1) > R(2, 2)) {
    double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2.0;
    q << (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s,
        (R(0, 2) - R(2, 0)) / s;
  } else {
    double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2.0;
    q << (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s,
        (R(1, 0) - R(0, 1)) / s;
  }
  q.normalize();
  if (q[3] < 0) q = -q;
  return q;
}

Mat3 rotation_from_quaternion(const Vec4& q) {
  const double x = q[0], y = q[1], z = q[2], w = q[3];
  Mat3 R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return R;
}

namespace {

constexpr const char* kDatasetMagic = "efslam-dataset v1";

std::vector<std::string> SplitWs(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::string PoseLine(int index, const Pose& T) {
  const Vec4 q = quaternion_from_rotation(T.rotation());
  const Vec3 t = T.translation();
  std::ostringstream os;
  os << index << ' ' << format_double(t.x()) << ' ' << format_double(t.y())
     << ' ' << format_double(t.z()) << ' ' << format_double(q[0]) << ' '
     << format_double(q[1]) << ' ' << format_double(q[2]) << ' '
     << format_double(q[3]);
  return os.str();
}

Pose ParsePoseLine(const std::vector<std::string>& tok, std::size_t expect_index) {
  if (tok.size() != 8) throw parse_error("trajectory line needs 8 fields");
  if (static_cast<std::size_t>(std::stoul(tok[0])) != expect_index) {
    throw parse_error("trajectory line out of order");
  }
  Vec3 t(parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]));
  Vec4 q(parse_double(tok[4]), parse_double(tok[5]), parse_double(tok[6]),
         parse_double(tok[7]));
  if (std::abs(q.norm() - 1.0) > 1e-9) {
    throw parse_error("quaternion is not unit");
  }
  return Pose::FromRt(rotation_from_quaternion(q), t);
}

// Dataset-internal pose encoding: the full top three matrix rows, so poses
// round-trip bit-for-bit (a quaternion re-encoding would not).
std::string PoseMatrixLine(int index, const Pose& T) {
  std::ostringstream os;
  os << index;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) os << ' ' << format_double(T.matrix()(r, c));
  return os.str();
}

Pose ParsePoseMatrixLine(const std::vector<std::string>& tok,
                         std::size_t expect_index) {
  if (tok.size() != 13) throw parse_error("dataset pose line needs 13 fields");
  if (static_cast<std::size_t>(std::stoul(tok[0])) != expect_index) {
    throw parse_error("dataset pose line out of order");
  }
  Mat4 m = Mat4::Identity();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c)
      m(r, c) = parse_double(tok[static_cast<size_t>(1 + 4 * r + c)]);
  return Pose(m);
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& d) {
  const WorldSpec& s = d.spec;
  os << "# " << kDatasetMagic << "\n";
  os << "[spec]\n";
  os << "n_poses " << s.n_poses << "\n";
  os << "n_planes " << s.n_planes << "\n";
  os << "points_per_plane " << s.points_per_plane << "\n";
  os << "point_noise_sigma " << format_double(s.point_noise_sigma) << "\n";
  os << "perturb_trans " << format_double(s.perturb_trans) << "\n";
  os << "perturb_rot_deg " << format_double(s.perturb_rot_deg) << "\n";
  os << "seed " << s.seed << "\n";
  os << "scene_radius " << format_double(s.scene_radius) << "\n";
  os << "patch_half_side " << format_double(s.patch_half_side) << "\n";
  os << "[gt_trajectory]\n";
  for (std::size_t t = 0; t < d.gt_trajectory.size(); ++t) {
    os << PoseMatrixLine(static_cast<int>(t), d.gt_trajectory[t]) << "\n";
  }
  os << "[initial_trajectory]\n";
  for (std::size_t t = 0; t < d.initial_trajectory.size(); ++t) {
    os << PoseMatrixLine(static_cast<int>(t), d.initial_trajectory[t]) << "\n";
  }
  os << "[planes]\n";
  for (std::size_t m = 0; m < d.planes_gt.size(); ++m) {
    const Plane& p = d.planes_gt[m];
    os << m << ' ' << format_double(p.eta.x()) << ' '
       << format_double(p.eta.y()) << ' ' << format_double(p.eta.z()) << ' '
       << format_double(p.d) << "\n";
  }
  os << "[points]\n";
  for (std::size_t t = 0; t < d.clouds.size(); ++t) {
    for (const auto& lp : d.clouds[t]) {
      os << t << ' ' << lp.plane_id << ' ' << format_double(lp.p.x()) << ' '
         << format_double(lp.p.y()) << ' ' << format_double(lp.p.z()) << "\n";
    }
  }
}

Dataset read_dataset(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != std::string("# ") + kDatasetMagic) {
    throw parse_error("not an efslam dataset (bad header)");
  }
  Dataset d;
  std::string section;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    const auto tok = SplitWs(line);
    if (section == "[spec]") {
      if (tok.size() != 2) throw parse_error("bad spec line: " + line);
      const std::string& k = tok[0];
      WorldSpec& s = d.spec;
      if (k == "n_poses") s.n_poses = std::stoi(tok[1]);
      else if (k == "n_planes") s.n_planes = std::stoi(tok[1]);
      else if (k == "points_per_plane") s.points_per_plane = std::stoi(tok[1]);
      else if (k == "point_noise_sigma") s.point_noise_sigma = parse_double(tok[1]);
      else if (k == "perturb_trans") s.perturb_trans = parse_double(tok[1]);
      else if (k == "perturb_rot_deg") s.perturb_rot_deg = parse_double(tok[1]);
      else if (k == "seed") s.seed = std::stoull(tok[1]);
      else if (k == "scene_radius") s.scene_radius = parse_double(tok[1]);
      else if (k == "patch_half_side") s.patch_half_side = parse_double(tok[1]);
      else throw parse_error("unknown spec key: " + k);
    } else if (section == "[gt_trajectory]") {
      d.gt_trajectory.push_back(ParsePoseMatrixLine(tok, d.gt_trajectory.size()));
    } else if (section == "[initial_trajectory]") {
      d.initial_trajectory.push_back(
          ParsePoseMatrixLine(tok, d.initial_trajectory.size()));
    } else if (section == "[planes]") {
      if (tok.size() != 5) throw parse_error("bad plane line: " + line);
      Plane p;
      p.eta = Vec3(parse_double(tok[1]), parse_double(tok[2]), parse_double(tok[3]));
      p.d = parse_double(tok[4]);
      d.planes_gt.push_back(p);
    } else if (section == "[points]") {
      if (tok.size() != 5) throw parse_error("bad point line: " + line);
      const std::size_t t = std::stoul(tok[0]);
      if (d.clouds.size() <= t) d.clouds.resize(t + 1);
      LabeledPoint lp;
      lp.plane_id = std::stoi(tok[1]);
      lp.p = Vec3(parse_double(tok[2]), parse_double(tok[3]), parse_double(tok[4]));
      d.clouds[t].push_back(lp);
    } else {
      throw parse_error("content outside any section: " + line);
    }
  }
  if (static_cast<int>(d.gt_trajectory.size()) != d.spec.n_poses ||
      static_cast<int>(d.initial_trajectory.size()) != d.spec.n_poses ||
      static_cast<int>(d.planes_gt.size()) != d.spec.n_planes) {
    throw parse_error("dataset sections inconsistent with spec echo");
  }
  d.clouds.resize(static_cast<size_t>(d.spec.n_poses));
  return d;
}

void save_dataset(const std::string& path, const Dataset& d) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open for writing: " + path);
  write_dataset(os, d);
  if (!os.flush()) throw io_error("write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open: " + path);
  return read_dataset(is);
}

void write_trajectory(std::ostream& os, const std::vector<Pose>& traj) {
  for (std::size_t t = 0; t < traj.size(); ++t) {
    os << PoseLine(static_cast<int>(t), traj[t]) << "\n";
  }
}

std::vector<Pose> read_trajectory(std::istream& is) {
  std::vector<Pose> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    out.push_back(ParsePoseLine(SplitWs(line), out.size()));
  }
  return out;
}

void save_trajectory(const std::string& path, const std::vector<Pose>& traj) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open for writing: " + path);
  write_trajectory(os, traj);
  if (!os.flush()) throw io_error("write failed: " + path);
}

std::vector<Pose> load_trajectory(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open: " + path);
  return read_trajectory(is);
}

}  // namespace ef
