#pragma once

// Reading and writing robot model files. See docs/model_format.md for the schema.

#include <fstream>
#include <sstream>
#include <string>

#include "transleg/error.hpp"
#include "transleg/robot_model.hpp"
#include "transleg/text_format.hpp"

namespace transleg {

namespace detail {

inline std::string join_numbers(std::initializer_list<double> vs) {
  std::string out;
  for (double v : vs) {
    if (!out.empty()) out += ' ';
    out += format_double(v);
  }
  return out;
}

inline std::string join_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

inline JointKind parse_kind(const SectionReader& r) {
  const auto& v = r.str("kind");
  if (v == "revolute") return JointKind::Revolute;
  if (v == "wheel") return JointKind::Wheel;
  r.fail(r.line_of("kind"), "unknown joint kind '" + v + "' (expected revolute or wheel)");
}

}  // namespace detail

/// Parses model text without validating invariants. Throws ModelError with
/// `source:line:` context on malformed input.
inline RobotModel parse_model_text(std::string_view text, const std::string& source = "<model>") {
  RobotModel model;
  try {
    const auto sections = parse_structured_text(text, source);
    KinematicChain* current = nullptr;
    std::string current_name;
    bool have_header = false;

    for (const auto& sec : sections) {
      const SectionReader r(sec, source);
      const auto dot = sec.name.find('.');
      const std::string kind = sec.name.substr(0, dot);
      const std::string id = dot == std::string::npos ? std::string() : sec.name.substr(dot + 1);

      if (sec.name.empty()) {
        r.fail(sec.entries.front().line, "field outside of any section");
      } else if (sec.name == "model") {
        reject_unknown_keys(sec, {"name"}, source);
        model.name = r.str("name");
        have_header = true;
      } else if (kind == "actuator" && !id.empty()) {
        reject_unknown_keys(sec, {"mass_g", "gear_ratio", "peak_torque_nm", "peak_speed_rpm"}, source);
        Actuator a{id, r.number("mass_g"), r.number("gear_ratio"), r.number("peak_torque_nm"),
                   r.number("peak_speed_rpm")};
        if (!model.actuators.emplace(id, a).second) r.fail(sec.line, "duplicate actuator '" + id + "'");
      } else if (kind == "chain" && !id.empty()) {
        reject_unknown_keys(sec, {"base_translation", "base_rotation"}, source);
        KinematicChain chain;
        const auto t = r.numbers("base_translation", 3);
        const auto rot = r.numbers("base_rotation", 9);
        chain.base_pose.translation = Eigen::Vector3d(t[0], t[1], t[2]);
        for (int i = 0; i < 9; ++i) chain.base_pose.rotation(i / 3, i % 3) = rot[i];
        auto [it, fresh] = model.chains.emplace(id, std::move(chain));
        if (!fresh) r.fail(sec.line, "duplicate chain '" + id + "'");
        current = &it->second;
        current_name = id;
      } else if (kind == "link" && !id.empty()) {
        if (!current) r.fail(sec.line, "[link." + id + "] appears before any [chain.<name>] section");
        const auto index = parse_double(id);
        if (!index || *index != static_cast<double>(current->joints.size()))
          r.fail(sec.line, "link index '" + id + "' out of order in chain '" + current_name + "' (expected " +
                               std::to_string(current->joints.size()) + ")");
        reject_unknown_keys(sec,
                                    {"joint", "kind", "a", "alpha", "d", "theta_offset", "limit_lo", "limit_hi",
                                     "velocity_limit", "actuator", "mass", "com", "inertia"},
                                    source);
        JointSpec j;
        j.name = r.str("joint");
        j.kind = detail::parse_kind(r);
        j.dh = {r.number("a"), r.number("alpha"), r.number("d"), r.number("theta_offset")};
        j.limit_lo = r.number("limit_lo");
        j.limit_hi = r.number("limit_hi");
        j.velocity_limit = r.number("velocity_limit");
        j.actuator = r.str("actuator");

        LinkInertial l;
        l.mass = r.number("mass");
        const auto com = r.numbers("com", 3);
        l.com = Eigen::Vector3d(com[0], com[1], com[2]);
        const auto in = r.numbers("inertia", 6);  // ixx iyy izz ixy ixz iyz
        l.inertia << in[0], in[3], in[4], in[3], in[1], in[5], in[4], in[5], in[2];

        current->joints.push_back(std::move(j));
        current->links.push_back(l);
      } else if (kind == "posture" && !id.empty()) {
        reject_unknown_keys(sec, {"chain", "q"}, source);
        const auto q = r.numbers("q");
        Posture p{r.str("chain"), Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(q.size()))};
        if (!model.postures.emplace(id, std::move(p)).second) r.fail(sec.line, "duplicate posture '" + id + "'");
      } else {
        r.fail(sec.line, "unknown section [" + sec.name + "]");
      }
    }
    if (!have_header) throw TextFormatError(source, 1, "missing [model] section");
  } catch (const TextFormatError& e) {
    throw ModelError(std::string("parse error: ") + e.what());
  }
  return model;
}

/// Parses and validates. Any invariant violation is reported as a ModelError.
inline RobotModel parse_model(std::string_view text, const std::string& source = "<model>") {
  auto model = parse_model_text(text, source);
  const auto violations = validate_model(model);
  if (!violations.empty()) {
    std::string msg = "validation failed for " + source + ":";
    for (const auto& v : violations) msg += "\n  " + v.str();
    throw ModelError(msg);
  }
  return model;
}

inline RobotModel load_model(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ModelError(e.what());
  }
  return parse_model(text, path);
}

/// Serializes with shortest round-trip number formatting, so
/// parse_model(format_model(m)) == m field for field.
inline std::string format_model(const RobotModel& model, std::string_view header_comment = {}) {
  std::ostringstream out;
  if (!header_comment.empty()) {
    for (auto line : split(header_comment, '\n')) out << "# " << line << '\n';
    out << '\n';
  }
  out << "[model]\nname = " << model.name << "\n";
  for (const auto& [name, a] : model.actuators) {
    out << "\n[actuator." << name << "]\n"
        << "mass_g = " << format_double(a.mass_g) << "\n"
        << "gear_ratio = " << format_double(a.gear_ratio) << "\n"
        << "peak_torque_nm = " << format_double(a.peak_torque_nm) << "\n"
        << "peak_speed_rpm = " << format_double(a.peak_speed_rpm) << "\n";
  }
  for (const auto& [name, chain] : model.chains) {
    const auto& t = chain.base_pose.translation;
    const auto& r = chain.base_pose.rotation;
    out << "\n[chain." << name << "]\n"
        << "base_translation = " << detail::join_numbers({t.x(), t.y(), t.z()}) << "\n"
        << "base_rotation = "
        << detail::join_numbers({r(0, 0), r(0, 1), r(0, 2), r(1, 0), r(1, 1), r(1, 2), r(2, 0), r(2, 1), r(2, 2)})
        << "\n";
    for (std::size_t i = 0; i < chain.joints.size(); ++i) {
      const auto& j = chain.joints[i];
      out << "\n[link." << i << "]\n"
          << "joint = " << j.name << "\n"
          << "kind = " << to_string(j.kind) << "\n"
          << "a = " << format_double(j.dh.a) << "\n"
          << "alpha = " << format_double(j.dh.alpha) << "\n"
          << "d = " << format_double(j.dh.d) << "\n"
          << "theta_offset = " << format_double(j.dh.theta_offset) << "\n"
          << "limit_lo = " << format_double(j.limit_lo) << "\n"
          << "limit_hi = " << format_double(j.limit_hi) << "\n"
          << "velocity_limit = " << format_double(j.velocity_limit) << "\n"
          << "actuator = " << j.actuator << "\n";
      if (i < chain.links.size()) {
        const auto& l = chain.links[i];
        const auto& I = l.inertia;
        out << "mass = " << format_double(l.mass) << "\n"
            << "com = " << detail::join_numbers({l.com.x(), l.com.y(), l.com.z()}) << "\n"
            << "inertia = " << detail::join_numbers({I(0, 0), I(1, 1), I(2, 2), I(0, 1), I(0, 2), I(1, 2)}) << "\n";
      }
    }
  }
  for (const auto& [name, p] : model.postures) {
    out << "\n[posture." << name << "]\n"
        << "chain = " << p.chain << "\n"
        << "q = " << detail::join_vector(p.q) << "\n";
  }
  return out.str();
}

inline void save_model(const RobotModel& model, const std::string& path, std::string_view header_comment = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << format_model(model, header_comment);
  if (!out) throw ModelError("failed writing model file '" + path + "'");
}

}  // namespace transleg
