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

#include "wbc/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wbc/builtin_models.hpp"
#include "wbc/contact.hpp"
#include "wbc/id_wbc.hpp"
#include "wbc/pb_wbc.hpp"
#include "wbc/spatial.hpp"

namespace wbc {

using nlohmann::json;

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kFootSwing: return "foot_swing";
    case ScenarioKind::kSquat: return "squat";
    case ScenarioKind::kJump: return "jump";
    case ScenarioKind::kSlider: return "slider";
  }
  return "?";
}

const char* to_string(ControllerKind kind) { return kind == ControllerKind::kPb ? "pb" : "id"; }

ControllerKind controller_kind_from_string(const std::string& name) {
  if (name == "id") return ControllerKind::kId;
  if (name == "pb") return ControllerKind::kPb;
  throw ConfigError("unknown controller '" + name + "' (expected id or pb)");
}

namespace {

ScenarioKind kind_from_string(const std::string& name) {
  for (auto k : {ScenarioKind::kFootSwing, ScenarioKind::kSquat, ScenarioKind::kJump, ScenarioKind::kSlider}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown scenario '" + name + "' (expected foot_swing, squat, jump or slider)");
}

const char* crane_mode_name(CraneSpec::Mode m) {
  switch (m) {
    case CraneSpec::Mode::kOff: return "off";
    case CraneSpec::Mode::kSpring: return "spring";
    case CraneSpec::Mode::kWelded: return "welded";
  }
  return "?";
}

CraneSpec::Mode crane_mode_from_string(const std::string& name) {
  for (auto m : {CraneSpec::Mode::kOff, CraneSpec::Mode::kSpring, CraneSpec::Mode::kWelded}) {
    if (name == crane_mode_name(m)) return m;
  }
  throw ConfigError("unknown crane mode '" + name + "' (expected off, spring or welded)");
}

const json kEmptyObject = json::object();

// Strict object reader: every key must be consumed before finish().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("'" + (path_.empty() ? std::string("<root>") : path_) + "' must be an object");
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) throw ConfigError("unknown key '" + key(item.key()) + "'");
    }
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  const json* find(const std::string& k) {
    used_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& k, double def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number()) throw ConfigError("'" + key(k) + "' must be a number");
    return v->get<double>();
  }

  int integer(const std::string& k, int def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number_integer()) throw ConfigError("'" + key(k) + "' must be an integer");
    return v->get<int>();
  }

  std::uint64_t unsigned_integer(const std::string& k, std::uint64_t def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_number_unsigned()) throw ConfigError("'" + key(k) + "' must be a non-negative integer");
    return v->get<std::uint64_t>();
  }

  bool flag(const std::string& k, bool def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError("'" + key(k) + "' must be true or false");
    return v->get<bool>();
  }

  std::string text(const std::string& k, const std::string& def) {
    const json* v = find(k);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError("'" + key(k) + "' must be a string");
    return v->get<std::string>();
  }

  template <int N>
  Eigen::Matrix<double, N, 1> vec(const std::string& k, const Eigen::Matrix<double, N, 1>& def) {
    const json* v = find(k);
    if (!v) return def;
    if (v->is_number()) return Eigen::Matrix<double, N, 1>::Constant(v->get<double>());
    if (!v->is_array() || static_cast<int>(v->size()) != N) {
      throw ConfigError("'" + key(k) + "' must be a number or an array of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> out;
    for (int i = 0; i < N; ++i) {
      if (!(*v)[i].is_number()) throw ConfigError("'" + key(k) + "' must hold numbers");
      out[i] = (*v)[i].get<double>();
    }
    return out;
  }

  std::map<std::string, double> number_map(const std::string& k) {
    std::map<std::string, double> out;
    const json* v = find(k);
    if (!v) return out;
    if (!v->is_object()) throw ConfigError("'" + key(k) + "' must map names to numbers");
    for (const auto& item : v->items()) {
      if (!item.value().is_number()) throw ConfigError("'" + key(k) + "." + item.key() + "' must be a number");
      out[item.key()] = item.value().get<double>();
    }
    return out;
  }

  Reader child(const std::string& k) {
    const json* v = find(k);
    return Reader(v ? *v : kEmptyObject, key(k));
  }

  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

GainSet read_gains(Reader r, const GainSet& def) {
  GainSet g;
  g.kp = r.vec<6>("kp", def.kp);
  g.kd = r.vec<6>("kd", def.kd);
  g.weight = r.vec<6>("weight", def.weight);
  r.finish();
  return g;
}

json vec_json(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json gains_json(const GainSet& g) { return {{"kp", vec_json(g.kp)}, {"kd", vec_json(g.kd)}, {"weight", vec_json(g.weight)}}; }

}  // namespace

DisturbanceSpec DisturbanceConfig::resolve(const RobotModel& model) const {
  const int n = model.num_joints();
  auto per_joint = [&](const std::map<std::string, double>& m, const char* what) {
    if (m.empty()) return VecX();
    VecX v = VecX::Zero(n);
    if (auto it = m.find("*"); it != m.end()) v.setConstant(it->second);
    for (const auto& [name, value] : m) {
      if (name == "*") continue;
      const int k = model.joint_index(name);
      if (k < 0) throw ConfigError(std::string("disturbance.") + what + ": unknown joint '" + name + "'");
      v[k] = value;
    }
    return v;
  };
  DisturbanceSpec d;
  d.coulomb = per_joint(coulomb, "coulomb");
  d.viscous = per_joint(viscous, "viscous");
  d.joint_bias = per_joint(joint_bias, "joint_bias");
  d.masses = masses;
  d.wrenches = wrenches;
  d.force_bias = force_bias;
  return d;
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration must be positive");
  if (!(plant.dt > 0.0)) throw ConfigError("plant.dt must be positive");
  if (!(control_rate > 0.0)) throw ConfigError("control_rate must be positive");
  const double ratio = 1.0 / (plant.dt * control_rate);
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-6) {
    throw ConfigError("control_rate must divide the physics rate 1/plant.dt");
  }
  const bool periodic = kind == ScenarioKind::kSquat || kind == ScenarioKind::kFootSwing;
  if (periodic && !(trajectory.frequency > 0.0)) throw ConfigError("trajectory.frequency must be positive");
  if (trajectory.amplitude_pp < 0.0) throw ConfigError("trajectory.amplitude_pp must be non-negative");
  if (trajectory.start_time < 0.0) throw ConfigError("trajectory.start_time must be non-negative");
  const bool fixed = kind == ScenarioKind::kFootSwing || kind == ScenarioKind::kSlider;
  if (fixed && plant.crane.mode != CraneSpec::Mode::kWelded) {
    throw ConfigError(std::string(to_string(kind)) + " needs plant.crane.mode = welded");
  }
  if (!fixed && plant.crane.mode == CraneSpec::Mode::kWelded) {
    throw ConfigError(std::string(to_string(kind)) + " cannot run on a welded crane");
  }
  if (kind == ScenarioKind::kSlider) {
    if (model.builtin != "slider") throw ConfigError("slider scenario needs model.builtin = slider");
  } else if (!model.builtin.empty()) {
    throw ConfigError(std::string(to_string(kind)) + " needs a biped model file");
  }
  if (!model.builtin.empty() && model.builtin != "slider") throw ConfigError("unknown builtin model '" + model.builtin + "'");
  if (!(model.mass > 0.0)) throw ConfigError("model.mass must be positive");
  if (controller.mu <= 0.0) throw ConfigError("controller.mu must be positive");
  if (kind == ScenarioKind::kJump) trajectory.jump.validate();
  plant.ground.validate();
  sensors.validate();
}

RobotModel ScenarioConfig::load_model() const {
  if (model.builtin == "slider") return make_slider(model.mass);
  return RobotModel::load(model.path);
}

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(name + ": syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }

  ScenarioConfig c;
  c.name = name;
  Reader r(doc, "");
  const json* kind = r.find("scenario");
  if (!kind || !kind->is_string()) throw ConfigError("'scenario' is required (foot_swing, squat, jump or slider)");
  c.kind = kind_from_string(kind->get<std::string>());
  c.name = r.text("name", name);

  if (const json* m = r.find("model")) {
    if (m->is_string()) {
      std::filesystem::path p = m->get<std::string>();
      c.model.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
      Reader mr(*m, "model");
      c.model.builtin = mr.text("builtin", "");
      c.model.mass = mr.number("mass", c.model.mass);
      const std::string path = mr.text("path", "");
      if (!path.empty()) {
        std::filesystem::path p = path;
        c.model.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      }
      mr.finish();
    }
  } else if (c.kind == ScenarioKind::kSlider) {
    c.model.builtin = "slider";
  } else {
    c.model.path = default_biped_path();
  }

  c.duration = r.number("duration", c.duration);
  c.control_rate = r.number("control_rate", c.control_rate);
  c.seed = r.unsigned_integer("seed", c.seed);
  c.output = r.text("output", "");

  {
    Reader cr = r.child("controller");
    ControllerConfig& k = c.controller;
    k.type = controller_kind_from_string(cr.text("type", to_string(k.type)));
    k.centroidal = read_gains(cr.child("centroidal"), k.centroidal);
    k.end_effector = read_gains(cr.child("end_effector"), k.end_effector);
    k.mu = cr.number("mu", k.mu);
    k.cop_constraints = cr.flag("cop_constraints", k.cop_constraints);
    k.regularization = cr.number("regularization", k.regularization);
    k.qc = cr.vec<6>("qc", k.qc);
    k.qf = cr.vec<6>("qf", k.qf);
    k.landing_damping = cr.vec<6>("landing_damping", k.landing_damping);
    k.condition_bound = cr.number("condition_bound", k.condition_bound);
    Reader qr = cr.child("qp");
    k.qp.eps_abs = qr.number("eps_abs", k.qp.eps_abs);
    k.qp.max_iterations = qr.integer("max_iterations", k.qp.max_iterations);
    k.qp.rho = qr.number("rho", k.qp.rho);
    k.qp.polish = qr.flag("polish", k.qp.polish);
    k.qp.adaptive_rho = qr.flag("adaptive_rho", k.qp.adaptive_rho);
    qr.finish();
    cr.finish();
  }

  {
    Reader tr = r.child("trajectory");
    TrajectoryConfig& t = c.trajectory;
    t.amplitude_pp = tr.number("amplitude_pp", t.amplitude_pp);
    t.frequency = tr.number("frequency", t.frequency);
    t.start_time = tr.number("start_time", t.start_time);
    t.bend = tr.number("bend", t.bend);
    t.crane_lift = tr.number("crane_lift", t.crane_lift);
    t.initial_offset = tr.number("initial_offset", t.initial_offset);
    Reader jr = tr.child("jump");
    JumpConfig& j = t.jump;
    j.start_time = jr.number("start_time", j.start_time);
    j.push_duration = jr.number("push_duration", j.push_duration);
    j.landing_duration = jr.number("landing_duration", j.landing_duration);
    j.apex = jr.number("apex", j.apex);
    j.takeoff_height = jr.number("takeoff_height", j.takeoff_height);
    j.order = polynomial_order_from_string(jr.text("polynomial", to_string(j.order)));
    Reader thr = jr.child("thresholds");
    j.thresholds.height_margin = thr.number("height_margin", j.thresholds.height_margin);
    j.thresholds.force = thr.number("force", j.thresholds.force);
    j.thresholds.foot_height = thr.number("foot_height", j.thresholds.foot_height);
    thr.finish();
    jr.finish();
    tr.finish();
  }

  {
    const bool fixed = c.kind == ScenarioKind::kFootSwing || c.kind == ScenarioKind::kSlider;
    if (fixed) c.plant.crane.mode = CraneSpec::Mode::kWelded;
    if (c.kind == ScenarioKind::kSlider) c.plant.ground.enabled = false;
    Reader pr = r.child("plant");
    c.plant.dt = pr.number("dt", c.plant.dt);
    Reader gr = pr.child("ground");
    GroundModel& g = c.plant.ground;
    g.enabled = gr.flag("enabled", g.enabled);
    g.height = gr.number("height", g.height);
    g.stiffness = gr.number("stiffness", g.stiffness);
    g.damping = gr.number("damping", g.damping);
    g.mu = gr.number("mu", g.mu);
    g.regularization = gr.number("regularization", g.regularization);
    gr.finish();
    Reader kr = pr.child("crane");
    CraneSpec& k = c.plant.crane;
    k.mode = crane_mode_from_string(kr.text("mode", crane_mode_name(k.mode)));
    k.stiffness = kr.vec<6>("stiffness", k.stiffness);
    k.damping = kr.vec<6>("damping", k.damping);
    kr.finish();
    pr.finish();
  }

  {
    Reader dr = r.child("disturbance");
    DisturbanceConfig& d = c.disturbance;
    d.coulomb = dr.number_map("coulomb");
    d.viscous = dr.number_map("viscous");
    d.joint_bias = dr.number_map("joint_bias");
    d.force_bias = dr.number_map("force_bias");
    if (const json* ms = dr.find("masses")) {
      if (!ms->is_array()) throw ConfigError("'disturbance.masses' must be an array");
      for (std::size_t i = 0; i < ms->size(); ++i) {
        Reader mr((*ms)[i], "disturbance.masses[" + std::to_string(i) + "]");
        AttachedMass a;
        a.link = mr.text("link", "");
        a.mass = mr.number("mass", 0.0);
        a.offset = mr.vec<3>("offset", Vec3::Zero());
        mr.finish();
        d.masses.push_back(a);
      }
    }
    if (const json* ws = dr.find("wrenches")) {
      if (!ws->is_array()) throw ConfigError("'disturbance.wrenches' must be an array");
      for (std::size_t i = 0; i < ws->size(); ++i) {
        Reader wr((*ws)[i], "disturbance.wrenches[" + std::to_string(i) + "]");
        TimedWrench w;
        w.frame = wr.text("frame", "");
        w.wrench = wr.vec<6>("wrench", Vec6::Zero());
        w.start = wr.number("start", 0.0);
        w.end = wr.number("end", w.end);
        wr.finish();
        d.wrenches.push_back(w);
      }
    }
    dr.finish();
  }

  {
    Reader sr = r.child("sensors");
    SensorModel& s = c.sensors;
    s.position_noise = sr.number("position_noise", s.position_noise);
    s.orientation_noise = sr.number("orientation_noise", s.orientation_noise);
    s.velocity_noise = sr.number("velocity_noise", s.velocity_noise);
    s.force_noise = sr.number("force_noise", s.force_noise);
    s.delay_ticks = sr.integer("delay_ticks", s.delay_ticks);
    s.velocity_filter = sr.number("velocity_filter", s.velocity_filter);
    sr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.parent_path(), path.stem().string());
}

std::string dump_scenario(const ScenarioConfig& c) {
  json doc;
  doc["scenario"] = to_string(c.kind);
  doc["name"] = c.name;
  if (c.model.builtin.empty()) {
    doc["model"] = std::filesystem::absolute(c.model.path).lexically_normal().string();
  } else {
    doc["model"] = {{"builtin", c.model.builtin}, {"mass", c.model.mass}};
  }
  doc["duration"] = c.duration;
  doc["control_rate"] = c.control_rate;
  doc["seed"] = c.seed;
  if (!c.output.empty()) doc["output"] = c.output.string();
  const ControllerConfig& k = c.controller;
  doc["controller"] = {{"type", to_string(k.type)},
                       {"centroidal", gains_json(k.centroidal)},
                       {"end_effector", gains_json(k.end_effector)},
                       {"mu", k.mu},
                       {"cop_constraints", k.cop_constraints},
                       {"regularization", k.regularization},
                       {"qc", vec_json(k.qc)},
                       {"qf", vec_json(k.qf)},
                       {"landing_damping", vec_json(k.landing_damping)},
                       {"condition_bound", k.condition_bound},
                       {"qp",
                        {{"eps_abs", k.qp.eps_abs},
                         {"max_iterations", k.qp.max_iterations},
                         {"rho", k.qp.rho},
                         {"polish", k.qp.polish},
                         {"adaptive_rho", k.qp.adaptive_rho}}}};
  const TrajectoryConfig& t = c.trajectory;
  const JumpConfig& j = t.jump;
  doc["trajectory"] = {{"amplitude_pp", t.amplitude_pp},
                       {"frequency", t.frequency},
                       {"start_time", t.start_time},
                       {"bend", t.bend},
                       {"crane_lift", t.crane_lift},
                       {"initial_offset", t.initial_offset},
                       {"jump",
                        {{"start_time", j.start_time},
                         {"push_duration", j.push_duration},
                         {"landing_duration", j.landing_duration},
                         {"apex", j.apex},
                         {"takeoff_height", j.takeoff_height},
                         {"polynomial", to_string(j.order)},
                         {"thresholds",
                          {{"height_margin", j.thresholds.height_margin},
                           {"force", j.thresholds.force},
                           {"foot_height", j.thresholds.foot_height}}}}}};
  const GroundModel& g = c.plant.ground;
  doc["plant"] = {{"dt", c.plant.dt},
                  {"ground",
                   {{"enabled", g.enabled},
                    {"height", g.height},
                    {"stiffness", g.stiffness},
                    {"damping", g.damping},
                    {"mu", g.mu},
                    {"regularization", g.regularization}}},
                  {"crane",
                   {{"mode", crane_mode_name(c.plant.crane.mode)},
                    {"stiffness", vec_json(c.plant.crane.stiffness)},
                    {"damping", vec_json(c.plant.crane.damping)}}}};
  const DisturbanceConfig& d = c.disturbance;
  json masses = json::array(), wrenches = json::array();
  for (const auto& m : d.masses) masses.push_back({{"link", m.link}, {"mass", m.mass}, {"offset", vec_json(m.offset)}});
  for (const auto& w : d.wrenches) {
    json e = {{"frame", w.frame}, {"wrench", vec_json(w.wrench)}, {"start", w.start}};
    if (std::isfinite(w.end)) e["end"] = w.end;
    wrenches.push_back(e);
  }
  doc["disturbance"] = {{"coulomb", d.coulomb},       {"viscous", d.viscous}, {"joint_bias", d.joint_bias},
                        {"force_bias", d.force_bias}, {"masses", masses},     {"wrenches", wrenches}};
  const SensorModel& s = c.sensors;
  doc["sensors"] = {{"position_noise", s.position_noise}, {"orientation_noise", s.orientation_noise},
                    {"velocity_noise", s.velocity_noise}, {"force_noise", s.force_noise},
                    {"delay_ticks", s.delay_ticks},       {"velocity_filter", s.velocity_filter}};
  return doc.dump(2) + "\n";
}

int ScenarioLog::channel(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == name) return static_cast<int>(i);
  }
  throw Error("log has no channel '" + name + "'");
}

namespace {

const char* kSuffix[6] = {"x", "y", "z", "rx", "ry", "rz"};

// Pose channels (position, rotation vector) of a task reference.
Vec6 pose_channels(const Vec3& p, const Mat3& R) {
  Vec6 v;
  v << p, so3_log(R);
  return v;
}

TaskSpec make_task(const std::string& name, const std::string& frame, const GainSet& g) {
  TaskSpec t;
  t.name = name;
  t.frame = frame;
  t.kp = g.kp;
  t.kd = g.kd;
  t.weight = g.weight;
  return t;
}

PbPhase pb_phase(JumpPhase p, double t, double start) {
  switch (p) {
    case JumpPhase::kStanceJump: return t < start ? PbPhase::kStance : PbPhase::kJump;
    case JumpPhase::kFlight: return PbPhase::kFlight;
    case JumpPhase::kLanding: return PbPhase::kLanding;
    case JumpPhase::kSettled: return PbPhase::kStance;
  }
  return PbPhase::kStance;
}

// Everything one control tick hands to either controller.
struct TickTasks {
  std::vector<TaskSpec> id_tasks;
  PbTaskStack stack;
  PbPhase phase = PbPhase::kStance;
  std::string phase_name;
  VecX ref;
};

}  // namespace

ScenarioLog run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  const RobotModel model = cfg.load_model();
  const int n = model.num_joints();
  const ScenarioKind kind = cfg.kind;
  const bool fixed = kind == ScenarioKind::kFootSwing || kind == ScenarioKind::kSlider;
  const TrajectoryConfig& tc = cfg.trajectory;

  SystemState init;
  if (kind == ScenarioKind::kSlider) {
    init = SystemState::zero(model);
    init.joint_positions[0] = tc.initial_offset;
  } else {
    init = standing_state(model, tc.bend);
    if (kind == ScenarioKind::kFootSwing) init.base_position.z() += tc.crane_lift;
  }
  PlantConfig pc = cfg.plant;
  pc.crane.anchor = {init.base_rotation(), init.base_position};
  pc.disturbance = cfg.disturbance.resolve(model);

  ScenarioLog log;
  log.scenario = cfg.name;
  log.controller = cfg.controller.type;
  for (int k = 0; k < n; ++k) log.joints.push_back(model.joint(k).name);
  log.effort = model.effort_limits();

  const std::vector<std::string> feet = kind == ScenarioKind::kSlider ? std::vector<std::string>{}
                                                                      : model.contact_frames();
  ContactSet contacts;
  contacts.mu = cfg.controller.mu;
  if (!fixed) {
    contacts.frames = feet;
    if (cfg.controller.cop_constraints && !feet.empty()) {
      contacts.cop_box = footprint_half_extents(model.frame(feet.front()));
    }
    for (const auto& f : feet) {
      for (const char* c : {"fx", "fy", "fz", "mx", "my", "mz"}) log.grf_names.push_back(f + "_" + c);
    }
  }

  // Nominal poses from the initial state.
  const Kinematics k0(model, init);
  const Vec3 com0 = k0.com();
  std::vector<Pose> feet0;
  for (const auto& f : feet) feet0.push_back(k0.frame_pose(f));
  Vec3 slider0 = Vec3::Zero();
  if (kind == ScenarioKind::kSlider) {
    SystemState home = init;
    home.joint_positions.setZero();
    slider0 = Kinematics(model, home).frame_pose("slider").position;
  }

  if (kind == ScenarioKind::kSlider) {
    log.channels = {"slider_x"};
    log.nominal = VecX::Constant(1, slider0.x());
  } else if (kind == ScenarioKind::kFootSwing) {
    log.nominal.resize(6 * feet.size());
    for (std::size_t i = 0; i < feet.size(); ++i) {
      for (const char* s : kSuffix) log.channels.push_back(feet[i] + "_" + s);
      log.nominal.segment<6>(6 * i) = pose_channels(feet0[i].position, feet0[i].rotation);
    }
  } else {
    log.channels = {"com_x", "com_y", "com_z", "base_rx", "base_ry", "base_rz"};
    log.nominal = pose_channels(com0, Mat3::Identity());
  }

  if (kind == ScenarioKind::kSquat || kind == ScenarioKind::kFootSwing) {
    log.period = 1.0 / tc.frequency;
    log.reference_start = tc.start_time;
  }

  JumpConfig jc = tc.jump;
  jc.standing_height = com0.z();
  JumpPhaseMachine machine(jc);
  if (kind == ScenarioKind::kJump) {
    log.jump.standing_height = com0.z();
    log.jump.planned_apex = jc.apex;
  }
  std::vector<Vec3> flight_offsets(feet.size(), Vec3::Zero());
  JumpPhase last_jump_phase = machine.phase();

  const GainSet& gc = cfg.controller.centroidal;
  const GainSet& ge = cfg.controller.end_effector;
  const Vec3 g = model.gravity();

  auto build = [&](double t, const Measurement& meas, const Kinematics& km) {
    TickTasks tt;
    PbTaskStack& st = tt.stack;
    st.qc = cfg.controller.qc;
    st.qf = cfg.controller.qf;
    st.landing_damping = cfg.controller.landing_damping;
    st.condition_bound = cfg.controller.condition_bound;
    st.fixed_base = fixed;
    st.centroidal = make_task("centroidal", kComTask, gc);

    if (kind == ScenarioKind::kSlider) {
      TaskSpec task = make_task("slider", "slider", ge);
      task.mask = 0x01;
      task.ref_position = slider0;
      tt.id_tasks = {task};
      st.impedance = {task};
      tt.phase_name = "track";
      tt.ref = VecX::Constant(1, slider0.x());
      return tt;
    }

    if (kind == ScenarioKind::kFootSwing) {
      const TrajectoryPoint s = t < tc.start_time ? TrajectoryPoint{} : sinusoid(tc.amplitude_pp, tc.frequency, t - tc.start_time);
      tt.ref.resize(6 * feet.size());
      for (std::size_t i = 0; i < feet.size(); ++i) {
        TaskSpec task = make_task(feet[i], feet[i], ge);
        task.ref_position = feet0[i].position + Vec3(s.pos, 0, 0);
        task.ref_rotation = feet0[i].rotation;
        task.ref_velocity[0] = s.vel;
        task.ref_acceleration[0] = s.acc;
        tt.id_tasks.push_back(task);
        st.impedance.push_back(task);
        tt.ref.segment<6>(6 * i) = pose_channels(task.ref_position, task.ref_rotation);
      }
      tt.phase_name = "swing";
      return tt;
    }

    TaskSpec& cen = st.centroidal;
    TrajectoryPoint z;
    if (kind == ScenarioKind::kSquat) {
      z = t < tc.start_time ? TrajectoryPoint{} : sinusoid(tc.amplitude_pp, tc.frequency, t - tc.start_time);
      z.pos += com0.z();
      tt.phase_name = "stance";
    } else {
      // Jump: advance the phase machine on measured quantities.
      JumpInputs in;
      in.time = t;
      in.com_height = km.com().z();
      in.com_velocity = km.com_velocity().z();
      for (std::size_t i = 0; i < feet.size(); ++i) {
        in.foot_heights.push_back(km.frame_pose(feet[i]).position.z() - cfg.plant.ground.height);
        in.leg_forces.push_back(meas.contact_wrenches.size() > i ? meas.contact_wrenches[i][2] : 0.0);
      }
      const JumpPhase jp = machine.update(in);
      if (jp == JumpPhase::kFlight && last_jump_phase != JumpPhase::kFlight) {
        for (std::size_t i = 0; i < feet.size(); ++i) flight_offsets[i] = km.frame_pose(feet[i]).position - km.com();
      }
      last_jump_phase = jp;
      z = machine.command(t, in.com_height, in.com_velocity);
      tt.phase_name = to_string(jp);
      tt.phase = pb_phase(jp, t, jc.start_time);
    }

    if (tt.phase == PbPhase::kFlight) {
      const Vec3 c = km.com();
      const Vec3 v = km.com_velocity();
      const Mat3 R = meas.state.base_rotation();
      cen.ref_position = c;
      cen.ref_rotation = R;
      cen.ref_velocity << v, meas.state.velocity.segment<3>(3);
      cen.ref_acceleration << g, Vec3::Zero();
      st.track_centroidal = false;
      tt.id_tasks.push_back(cen);
      for (std::size_t i = 0; i < feet.size(); ++i) {
        TaskSpec task = make_task(feet[i], feet[i], ge);
        task.ref_position = c + flight_offsets[i];
        task.ref_rotation = feet0[i].rotation;
        task.ref_velocity.head<3>() = v;
        task.ref_acceleration.head<3>() = g;
        tt.id_tasks.push_back(task);
        st.impedance.push_back(task);
      }
      tt.ref = pose_channels(c, R);
      return tt;
    }

    cen.ref_position = Vec3(com0.x(), com0.y(), z.pos);
    cen.ref_velocity[2] = z.vel;
    cen.ref_acceleration[2] = z.acc;
    tt.id_tasks.push_back(cen);
    st.contacts = contacts;
    tt.ref = pose_channels(cen.ref_position, cen.ref_rotation);
    return tt;
  };

  auto measured_channels = [&](const Kinematics& kt) {
    if (kind == ScenarioKind::kSlider) return VecX::Constant(1, kt.frame_pose("slider").position.x()).eval();
    if (kind == ScenarioKind::kFootSwing) {
      VecX v(6 * feet.size());
      for (std::size_t i = 0; i < feet.size(); ++i) {
        const Pose p = kt.frame_pose(feet[i]);
        v.segment<6>(6 * i) = pose_channels(p.position, p.rotation);
      }
      return v;
    }
    return VecX(pose_channels(kt.com(), kt.state().base_rotation()));
  };

  IdSettings ids;
  ids.regularization = cfg.controller.regularization;
  ids.fixed_base = fixed;
  ids.qp = cfg.controller.qp;
  PbSettings pbs;
  pbs.qp = cfg.controller.qp;
  IdController id(ids);
  PbController pb(pbs);

  Plant plant(model, pc, init);
  Sensor sensor(cfg.sensors, cfg.seed, pc.disturbance.force_bias);
  const int per_tick = static_cast<int>(std::lround(1.0 / (pc.dt * cfg.control_rate)));
  const long steps = std::lround(cfg.duration / pc.dt);
  const double control_dt = per_tick * pc.dt;
  int consecutive_failures = 0;
  int dumped = 0;
  VecX tau = VecX::Zero(n);
  if (!options.dump_qp.empty()) std::filesystem::create_directories(options.dump_qp);

  try {
    for (long step = 0; step < steps; ++step) {
      if (step % per_tick == 0) {
        const double t = plant.time();
        const Measurement meas = sensor.measure(plant);
        const Kinematics km(model, meas.state);
        TickTasks tt = build(t, meas, km);

        LogRow row;
        row.t = t;
        row.phase = tt.phase_name;
        row.ref = tt.ref;
        const Kinematics ktrue(model, plant.state());
        row.meas = measured_channels(ktrue);
        row.grf = VecX::Zero(log.grf_names.size());

        const QpProblem* problem = nullptr;
        if (cfg.controller.type == ControllerKind::kId) {
          const ContactSet& cs = tt.stack.contacts;
          const ControlOutput out = id.tick(model, meas.state, tt.id_tasks, cs);
          tau = out.tau;
          row.status = out.status;
          row.iterations = out.iterations;
          row.fallback = out.fallback;
          for (int i = 0; i < cs.size(); ++i) row.grf.segment<6>(6 * i) = out.contact_wrenches.segment<6>(6 * i);
          problem = &id.last_problem();
        } else {
          const PbOutput out = pb.tick(model, meas.state, tt.stack, tt.phase);
          tau = out.tau;
          row.status = out.status;
          row.iterations = out.iterations;
          row.fallback = out.fallback;
          if (out.grf.size()) row.grf.head(out.grf.size()) = out.grf;
          if (tt.stack.contacts.size()) problem = &pb.last_problem();
        }
        row.tau = tau;

        for (int i = 0; i < tt.stack.contacts.size(); ++i) {
          const Mat3 R = km.frame_pose(tt.stack.contacts.frames[i]).rotation;
          row.friction_excess =
              std::max(row.friction_excess, friction_violation(contacts.mu, R, row.grf.segment<6>(6 * i)));
        }
        log.max_friction_violation = std::max(log.max_friction_violation, row.friction_excess);
        if (kind == ScenarioKind::kJump) {
          log.jump.apex = std::max(log.jump.apex, row.meas[2] - com0.z());
          if (machine.phase() == JumpPhase::kLanding) {
            for (const auto& f : feet) log.jump.landing_slip += ktrue.frame_velocity(f).head<2>().norm() * control_dt;
          }
        }

        const bool failed = row.status != QpStatus::kOptimal;
        if (failed) ++log.qp_failures;
        consecutive_failures = failed ? consecutive_failures + 1 : 0;
        if (problem && !options.dump_qp.empty() && dumped < 100 && (log.rows.empty() || failed)) {
          char file[64];
          std::snprintf(file, sizeof(file), "tick_%07ld.mtx", step / per_tick);
          std::ofstream os(options.dump_qp / file);
          write_problem(os, *problem);
          ++dumped;
        }
        log.rows.push_back(std::move(row));
        if (consecutive_failures > options.max_failed_ticks) {
          char msg[160];
          std::snprintf(msg, sizeof(msg), "QP failed for %d consecutive ticks at t = %.4f s (last status %s)",
                        consecutive_failures, t, to_string(log.rows.back().status).c_str());
          throw SimulationError(msg);
        }
      }
      plant.step(tau);
    }
  } catch (const SimulationError& e) {
    log.aborted = true;
    log.abort_reason = e.what();
  }

  log.jump.liftoff_time = machine.liftoff_time();
  log.jump.touchdown_time = machine.touchdown_time();
  log.jump.settle_time = machine.settle_time();
  log.jump.reached_settled = machine.phase() == JumpPhase::kSettled;
  log.jump.touchdown_discontinuity = machine.touchdown_discontinuity();
  log.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return log;
}

}  // namespace wbc
