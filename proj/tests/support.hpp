#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "t2nav/core.hpp"

namespace support {

inline t2nav::Trajectory circle(std::size_t n, double radius, bool rotate_heading, t2nav::Timestep t0 = 0,
                                double cx = 0.0, double cy = 0.0) {
  t2nav::Trajectory traj;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double th = rotate_heading ? a + std::numbers::pi / 2 : 0.0;
    traj.append(t0 + static_cast<t2nav::Timestep>(i), t2nav::Pose(cx + radius * std::cos(a), cy + radius * std::sin(a), th));
  }
  return traj;
}

inline t2nav::Trajectory line(std::size_t n, double spacing) {
  t2nav::Trajectory traj;
  for (std::size_t i = 0; i < n; ++i) traj.append(static_cast<t2nav::Timestep>(i), t2nav::Pose(spacing * i, 0.0, 0.0));
  return traj;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Run {
  int code = -1;
  std::string out;
};

// Runs a shell command, capturing stdout; stderr is discarded.
inline Run run(const std::string& cmd) {
  Run r;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("t2nav_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
