// Copyright 2026 The wbcbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wbc/robot_model.hpp"

#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "wbc/spatial.hpp"

namespace wbc {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(where + ": unknown key '" + key + "'");
  }
}

Vec3 read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw Error(where + ": expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Mat3 read_mat3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw Error(where + ": expected a 3x3 matrix");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = read_vec3(j[r], where).transpose();
  return m;
}

json write_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json write_mat3(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(write_vec3(m.row(r).transpose()));
  return rows;
}

Vec3 matrix_to_rpy(const Mat3& R) {
  const Vec3 ypr = R.eulerAngles(2, 1, 0);
  return Vec3(ypr.z(), ypr.y(), ypr.x());
}

JointType parse_joint_type(const std::string& s, const std::string& where) {
  if (s == "free-flyer") return JointType::kFreeFlyer;
  if (s == "revolute") return JointType::kRevolute;
  if (s == "prismatic") return JointType::kPrismatic;
  throw Error(where + ": unknown joint type '" + s + "'");
}

std::string joint_type_name(JointType t) {
  switch (t) {
    case JointType::kFreeFlyer: return "free-flyer";
    case JointType::kRevolute: return "revolute";
    case JointType::kPrismatic: return "prismatic";
  }
  return "?";
}

void validate_link(const Link& l) {
  if (!(l.mass > 0.0)) throw Error("link '" + l.name + "': mass must be positive");
  const double scale = std::max(1.0, l.inertia.cwiseAbs().maxCoeff());
  if ((l.inertia - l.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error("link '" + l.name + "': rotational inertia is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(l.inertia);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error("link '" + l.name + "': rotational inertia is not positive definite");
  }
}

}  // namespace

void RobotModel::set_base(Link base, std::string root_joint_name) {
  links_.clear();
  joints_.clear();
  parents_.clear();
  links_.push_back(std::move(base));
  parents_.push_back(-1);
  root_joint_ = std::move(root_joint_name);
}

void RobotModel::add_link(Link link, Joint joint) {
  if (links_.empty()) throw Error("add_link: base link must be set first");
  const int p = link_index(joint.parent);
  if (link_index(link.name) >= 0) throw Error("duplicate link '" + link.name + "'");
  if (joint.type == JointType::kFreeFlyer) throw Error("joint '" + joint.name + "': only the root may be a free-flyer");
  joint.child = link.name;
  links_.push_back(std::move(link));
  joints_.push_back(std::move(joint));
  parents_.push_back(p);
}

void RobotModel::add_frame(Frame frame) {
  if (has_frame(frame.name)) throw Error("duplicate frame '" + frame.name + "'");
  frames_.push_back(std::move(frame));
}

void RobotModel::finalize() {
  if (links_.empty()) throw Error("model has no links");
  for (const auto& l : links_) validate_link(l);
  for (auto& j : joints_) {
    if (j.axis.norm() < 1e-9) throw Error("joint '" + j.name + "': zero axis");
    j.axis.normalize();
    if (j.lower > j.upper) throw Error("joint '" + j.name + "': lower limit above upper limit");
    if (!(j.effort >= 0.0)) throw Error("joint '" + j.name + "': negative effort limit");
  }
  for (const auto& f : frames_) {
    if (link_index(f.link) < 0) throw Error("frame '" + f.name + "': unknown link '" + f.link + "'");
  }
}

int RobotModel::link_index(const std::string& name) const {
  for (int i = 0; i < num_links(); ++i) {
    if (links_[i].name == name) return i;
  }
  return -1;
}

int RobotModel::joint_index(const std::string& name) const {
  for (int k = 0; k < num_joints(); ++k) {
    if (joints_[k].name == name) return k;
  }
  return -1;
}

bool RobotModel::has_frame(const std::string& name) const {
  for (const auto& f : frames_) {
    if (f.name == name) return true;
  }
  return false;
}

const Frame& RobotModel::frame(const std::string& name) const {
  for (const auto& f : frames_) {
    if (f.name == name) return f;
  }
  throw Error("unknown frame '" + name + "'");
}

std::vector<std::string> RobotModel::contact_frames() const {
  std::vector<std::string> out;
  for (const auto& f : frames_) {
    if (!f.contact_points.empty()) out.push_back(f.name);
  }
  return out;
}

double RobotModel::total_mass() const {
  double m = 0.0;
  for (const auto& l : links_) m += l.mass;
  return m;
}

VecX RobotModel::effort_limits() const {
  VecX e(num_joints());
  for (int k = 0; k < num_joints(); ++k) e[k] = joints_[k].effort;
  return e;
}

VecX RobotModel::lower_limits() const {
  VecX e(num_joints());
  for (int k = 0; k < num_joints(); ++k) e[k] = joints_[k].lower;
  return e;
}

VecX RobotModel::upper_limits() const {
  VecX e(num_joints());
  for (int k = 0; k < num_joints(); ++k) e[k] = joints_[k].upper;
  return e;
}

void RobotModel::attach_mass(const std::string& link_name, double mass, const Vec3& offset) {
  const int i = link_index(link_name);
  if (i < 0) throw Error("attach_mass: unknown link '" + link_name + "'");
  if (!(mass > 0.0)) throw Error("attach_mass: mass must be positive");
  Link& l = links_[i];
  const double m = l.mass + mass;
  const Vec3 c = (l.mass * l.com + mass * offset) / m;
  auto shift = [](double mm, const Vec3& d) {
    return Mat3(mm * (d.squaredNorm() * Mat3::Identity() - d * d.transpose()));
  };
  l.inertia = l.inertia + shift(l.mass, l.com - c) + shift(mass, offset - c);
  l.mass = m;
  l.com = c;
}

RobotModel RobotModel::from_json(const json& doc) {
  check_keys(doc, {"links", "joints", "frames", "gravity"}, "model");
  if (!doc.contains("links") || !doc.contains("joints")) throw Error("model: 'links' and 'joints' are required");

  std::map<std::string, Link> links;
  std::vector<std::string> link_order;
  for (const auto& jl : doc.at("links")) {
    check_keys(jl, {"name", "mass", "com", "inertia"}, "link");
    Link l;
    l.name = jl.at("name").get<std::string>();
    const std::string where = "link '" + l.name + "'";
    l.mass = jl.at("mass").get<double>();
    if (jl.contains("com")) l.com = read_vec3(jl.at("com"), where + " com");
    l.inertia = read_mat3(jl.at("inertia"), where + " inertia");
    validate_link(l);
    if (links.count(l.name)) throw Error("duplicate link '" + l.name + "'");
    links.emplace(l.name, l);
    link_order.push_back(l.name);
  }

  std::vector<Joint> joints;
  std::string root_child;
  std::string root_name;
  for (const auto& jj : doc.at("joints")) {
    check_keys(jj, {"name", "type", "parent", "child", "axis", "origin", "rpy", "limits"}, "joint");
    Joint j;
    j.name = jj.at("name").get<std::string>();
    const std::string where = "joint '" + j.name + "'";
    j.type = parse_joint_type(jj.at("type").get<std::string>(), where);
    j.child = jj.at("child").get<std::string>();
    if (!links.count(j.child)) throw Error(where + ": unknown child link '" + j.child + "'");
    if (j.type == JointType::kFreeFlyer) {
      if (!root_child.empty()) throw Error("model: more than one free-flyer joint");
      root_child = j.child;
      root_name = j.name;
      continue;
    }
    j.parent = jj.at("parent").get<std::string>();
    if (!links.count(j.parent)) throw Error(where + ": unknown parent link '" + j.parent + "'");
    j.axis = read_vec3(jj.at("axis"), where + " axis");
    if (std::abs(j.axis.norm() - 1.0) > 1e-6) throw Error(where + ": axis must be a unit vector");
    if (jj.contains("origin")) j.origin_position = read_vec3(jj.at("origin"), where + " origin");
    if (jj.contains("rpy")) j.origin_rotation = rpy_to_matrix(read_vec3(jj.at("rpy"), where + " rpy"));
    if (jj.contains("limits")) {
      const auto& lim = jj.at("limits");
      check_keys(lim, {"lower", "upper", "effort"}, where + " limits");
      if (lim.contains("lower")) j.lower = lim.at("lower").get<double>();
      if (lim.contains("upper")) j.upper = lim.at("upper").get<double>();
      if (lim.contains("effort")) j.effort = lim.at("effort").get<double>();
    }
    joints.push_back(j);
  }
  if (root_child.empty()) throw Error("model: exactly one free-flyer root joint is required");

  RobotModel model;
  model.set_base(links.at(root_child), root_name);
  std::set<std::string> placed{root_child};
  std::set<std::string> children;
  for (const auto& j : joints) {
    if (!children.insert(j.child).second) throw Error("link '" + j.child + "' has more than one parent joint");
    if (j.child == root_child) throw Error("link '" + j.child + "' is the floating base and cannot have a parent");
  }
  // breadth-first from the base keeps parents ahead of children
  std::queue<std::string> open;
  open.push(root_child);
  while (!open.empty()) {
    const std::string cur = open.front();
    open.pop();
    for (const auto& j : joints) {
      if (j.parent != cur) continue;
      if (placed.count(j.child)) throw Error("model: kinematic loop at link '" + j.child + "'");
      model.add_link(links.at(j.child), j);
      placed.insert(j.child);
      open.push(j.child);
    }
  }
  if (placed.size() != links.size()) {
    for (const auto& name : link_order) {
      if (!placed.count(name)) throw Error("link '" + name + "' is not connected to the floating base");
    }
  }

  if (doc.contains("frames")) {
    for (const auto& jf : doc.at("frames")) {
      check_keys(jf, {"name", "link", "position", "rpy", "contact_points"}, "frame");
      Frame f;
      f.name = jf.at("name").get<std::string>();
      const std::string where = "frame '" + f.name + "'";
      f.link = jf.at("link").get<std::string>();
      if (model.link_index(f.link) < 0) throw Error(where + ": unknown link '" + f.link + "'");
      if (jf.contains("position")) f.position = read_vec3(jf.at("position"), where + " position");
      if (jf.contains("rpy")) f.rotation = rpy_to_matrix(read_vec3(jf.at("rpy"), where + " rpy"));
      if (jf.contains("contact_points")) {
        for (const auto& p : jf.at("contact_points")) f.contact_points.push_back(read_vec3(p, where + " contact point"));
      }
      model.add_frame(f);
    }
  }
  if (doc.contains("gravity")) model.gravity_ = read_vec3(doc.at("gravity"), "gravity");
  model.finalize();
  return model;
}

RobotModel RobotModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  try {
    return from_json(doc);
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

json RobotModel::to_json() const {
  json doc;
  doc["gravity"] = write_vec3(gravity_);
  json links = json::array();
  for (const auto& l : links_) {
    links.push_back({{"name", l.name}, {"mass", l.mass}, {"com", write_vec3(l.com)}, {"inertia", write_mat3(l.inertia)}});
  }
  doc["links"] = links;
  json joints = json::array();
  joints.push_back({{"name", root_joint_}, {"type", "free-flyer"}, {"child", links_.front().name}});
  for (const auto& j : joints_) {
    joints.push_back({{"name", j.name},
                      {"type", joint_type_name(j.type)},
                      {"parent", j.parent},
                      {"child", j.child},
                      {"axis", write_vec3(j.axis)},
                      {"origin", write_vec3(j.origin_position)},
                      {"rpy", write_vec3(matrix_to_rpy(j.origin_rotation))},
                      {"limits", {{"lower", j.lower}, {"upper", j.upper}, {"effort", j.effort}}}});
  }
  doc["joints"] = joints;
  json frames = json::array();
  for (const auto& f : frames_) {
    json jf = {{"name", f.name}, {"link", f.link}, {"position", write_vec3(f.position)},
               {"rpy", write_vec3(matrix_to_rpy(f.rotation))}};
    if (!f.contact_points.empty()) {
      json pts = json::array();
      for (const auto& p : f.contact_points) pts.push_back(write_vec3(p));
      jf["contact_points"] = pts;
    }
    frames.push_back(jf);
  }
  doc["frames"] = frames;
  return doc;
}

SystemState SystemState::zero(const RobotModel& model) {
  SystemState s;
  s.joint_positions = VecX::Zero(model.num_joints());
  s.velocity = VecX::Zero(model.nv());
  return s;
}

}  // namespace wbc
