#include <fstream>
#include <sstream>
#include <stdexcept>

#include "loam/simulator.hpp"

namespace loam {
namespace sim {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("scene file line " + std::to_string(line) + ": " + what);
}

double num(std::istringstream& ss, int line, const char* what) {
  double v;
  if (!(ss >> v)) fail(line, std::string("expected number for ") + what);
  return v;
}

Eigen::Vector3d vec3(std::istringstream& ss, int line, const char* what) {
  return {num(ss, line, what), num(ss, line, what), num(ss, line, what)};
}

Channel* channel_by_name(Trajectory& traj, const std::string& name) {
  if (name == "px") return &traj.px;
  if (name == "py") return &traj.py;
  if (name == "pz") return &traj.pz;
  if (name == "roll") return &traj.roll;
  if (name == "pitch") return &traj.pitch;
  if (name == "yaw") return &traj.yaw;
  return nullptr;
}

void read_velocity(std::istringstream& ss, int line, Primitive& prim) {
  std::string kw;
  if (ss >> kw) {
    if (kw != "vel") fail(line, "unexpected trailing token '" + kw + "'");
    prim.velocity = vec3(ss, line, "velocity");
  }
}

}  // namespace

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("scene file: cannot open " + path);

  SceneSpec spec;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::string kind;
    if (!(ss >> kind)) continue;

    if (kind == "param") {
      std::string key;
      if (!(ss >> key)) fail(line_no, "param needs a key");
      const double v = num(ss, line_no, key.c_str());
      if (key == "point_rate") spec.params.point_rate = v;
      else if (key == "prism_f1") spec.params.prism_rate1 = v;
      else if (key == "prism_f2") spec.params.prism_rate2 = v;
      else if (key == "deflection1") spec.params.deflection1 = v;
      else if (key == "deflection2") spec.params.deflection2 = v;
      else if (key == "fov_half_deg") spec.params.fov_half_deg = v;
      else if (key == "max_range") spec.params.max_range = v;
      else if (key == "frame_rate") spec.frame_rate = v;
      else if (key == "duration") spec.duration = v;
      else if (key == "sigma_range") spec.sigma_range = v;
      else if (key == "seed") spec.seed = static_cast<std::uint64_t>(v);
      else fail(line_no, "unknown param '" + key + "'");
    } else if (kind == "rect") {
      Primitive p;
      p.type = Primitive::Type::Rect;
      p.center = vec3(ss, line_no, "center");
      p.normal = vec3(ss, line_no, "normal").normalized();
      p.u_axis = vec3(ss, line_no, "u axis");
      p.u_axis = (p.u_axis - p.u_axis.dot(p.normal) * p.normal).normalized();
      p.half_u = num(ss, line_no, "half_u");
      p.half_v = num(ss, line_no, "half_v");
      p.reflectivity = num(ss, line_no, "reflectivity");
      read_velocity(ss, line_no, p);
      spec.scene.primitives.push_back(p);
    } else if (kind == "box") {
      Primitive p;
      p.type = Primitive::Type::Box;
      p.center = vec3(ss, line_no, "center");
      p.half_extents = vec3(ss, line_no, "half extents");
      p.reflectivity = num(ss, line_no, "reflectivity");
      read_velocity(ss, line_no, p);
      spec.scene.primitives.push_back(p);
    } else if (kind == "sphere") {
      Primitive p;
      p.type = Primitive::Type::Sphere;
      p.center = vec3(ss, line_no, "center");
      p.radius = num(ss, line_no, "radius");
      p.reflectivity = num(ss, line_no, "reflectivity");
      read_velocity(ss, line_no, p);
      spec.scene.primitives.push_back(p);
    } else if (kind == "traj") {
      std::string channel_name, form;
      if (!(ss >> channel_name >> form)) fail(line_no, "traj needs '<channel> poly|sin ...'");
      Channel* ch = channel_by_name(spec.trajectory, channel_name);
      if (ch == nullptr) fail(line_no, "unknown channel '" + channel_name + "'");
      if (form == "poly") {
        double c;
        ch->poly.clear();
        while (ss >> c) ch->poly.push_back(c);
        if (ch->poly.empty()) fail(line_no, "poly needs coefficients");
      } else if (form == "sin") {
        Channel::Sinusoid s;
        s.amplitude = num(ss, line_no, "amplitude");
        s.frequency_hz = num(ss, line_no, "frequency");
        s.phase = num(ss, line_no, "phase");
        ch->sinusoids.push_back(s);
      } else {
        fail(line_no, "unknown trajectory form '" + form + "'");
      }
    } else {
      fail(line_no, "unknown directive '" + kind + "'");
    }
  }

  for (const Primitive& p : spec.scene.primitives)
    if (p.reflectivity <= 0) throw std::runtime_error("scene file: reflectivity must be > 0");
  return spec;
}

}  // namespace sim
}  // namespace loam
