#include "safeforce/scenario.hpp"

#include "safeforce/controller.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace safeforce {

using nlohmann::json;

namespace {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_, msg); }
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(sub(key), msg);
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }
    const json& raw(const std::string& key) const {
        if (!has(key)) fail(key, "missing required field");
        return j_.at(key);
    }
    Reader at(const std::string& key) const { return Reader(raw(key), sub(key)); }

    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "expected a finite number");
        return x;
    }
    double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

    bool boolean(const std::string& key, bool def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
        return j_.at(key).get<bool>();
    }

    std::string str(const std::string& key, const std::string& def) const {
        if (!has(key)) return def;
        if (!j_.at(key).is_string()) fail(key, "expected a string");
        return j_.at(key).get<std::string>();
    }

    // null entries become +inf when allow_null
    std::vector<double> numbers(const std::string& key, long size = -1, bool allow_null = false) const {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "expected an array");
        if (size >= 0 && static_cast<long>(v.size()) != size) {
            std::ostringstream os;
            os << "expected " << size << " entries, got " << v.size();
            fail(key, os.str());
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = sub(key) + "[" + std::to_string(i) + "]";
            if (v[i].is_null() && allow_null) {
                out.push_back(kUnbounded);
            } else if (v[i].is_number() && std::isfinite(v[i].get<double>())) {
                out.push_back(v[i].get<double>());
            } else {
                throw ConfigError(p, allow_null ? "expected a number or null" : "expected a number");
            }
        }
        return out;
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!ok.count(it.key())) fail(it.key(), "unknown field");
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
};

Vec3 vec3(const Reader& r, const std::string& key, const Vec3& def) {
    if (!r.has(key)) return def;
    const auto v = r.numbers(key, 3);
    return {v[0], v[1], v[2]};
}

Mat3 rpy_deg(const Reader& r, const std::string& key) {
    const Vec3 a = vec3(r, key, Vec3::Zero());
    return rpy(deg2rad(a[0]), deg2rad(a[1]), deg2rad(a[2]));
}

RobotModel parse_robot(const Reader& r) {
    r.allow_only({"plane_rpy_deg", "roll_deg", "pitch_deg", "arm", "link", "mount_z", "joints", "tool"});
    // plane_rpy_deg gives the plane frame orientation in the world; R_PW is its transpose.
    const Mat3 R_PW = rpy_deg(r, "plane_rpy_deg").transpose();
    const double roll = deg2rad(r.number("roll_deg", 0.0));
    const double pitch = deg2rad(r.number("pitch_deg", 0.0));
    const std::string arm = r.str("arm", r.has("joints") ? "custom" : "planar-2dof");
    try {
        if (arm == "planar-2dof") {
            if (r.has("joints")) r.fail("joints", "not allowed with arm planar-2dof");
            return RobotModel::planar_2dof(R_PW, r.number("link", 0.15), r.number("mount_z", -0.1), roll, pitch);
        }
        if (arm != "custom") r.fail("arm", "expected planar-2dof or custom");
        const json& js = r.raw("joints");
        if (!js.is_array() || js.empty()) r.fail("joints", "expected a nonempty array");
        std::vector<Joint> joints;
        for (std::size_t i = 0; i < js.size(); ++i) {
            const Reader jr(js[i], r.sub("joints") + "[" + std::to_string(i) + "]");
            jr.allow_only({"type", "xyz", "rpy_deg", "axis"});
            Joint j;
            const std::string type = jr.str("type", "revolute");
            if (type == "revolute")
                j.type = JointType::Revolute;
            else if (type == "prismatic")
                j.type = JointType::Prismatic;
            else
                jr.fail("type", "expected revolute or prismatic");
            j.origin = make_transform(vec3(jr, "xyz", Vec3::Zero()), rpy_deg(jr, "rpy_deg"));
            j.axis = vec3(jr, "axis", Vec3::UnitY());
            joints.push_back(j);
        }
        Transform tool = Transform::Identity();
        if (r.has("tool")) {
            const Reader tr = r.at("tool");
            tr.allow_only({"xyz", "rpy_deg"});
            tool = make_transform(vec3(tr, "xyz", Vec3::Zero()), rpy_deg(tr, "rpy_deg"));
        }
        return RobotModel(joints, tool, roll, pitch, R_PW);
    } catch (const ContractViolation& e) {
        r.fail(e.what());
    }
}

KappaAFamily kappa_a_family(const Reader& r, const std::string& key, KappaAFamily def) {
    const std::string f = r.str(key, "");
    if (f.empty()) return def;
    if (f == "rational") return KappaAFamily::Rational;
    if (f == "root") return KappaAFamily::Root;
    if (f == "linear") return KappaAFamily::Linear;
    r.fail(key, "expected rational, root or linear");
}

ShapingParams parse_shaping(const Reader& r) {
    r.allow_only({"preset", "kappa_F", "kappa_A", "kappa_A_O", "V_A_XY", "kappa_B"});
    const std::string name = r.str("preset", "baseline");
    ShapingParams p;
    if (name == "baseline")
        p = baseline_params();
    else if (name == "rational-alt")
        p = rational_alt_params();
    else
        r.fail("preset", "unknown shaping preset '" + name + "'");
    if (r.has("kappa_F")) {
        const Reader k = r.at("kappa_F");
        k.allow_only({"a", "b", "h"});
        p.kF_a = k.number("a", p.kF_a);
        p.kF_b = k.number("b", p.kF_b);
        p.kF_h = k.number("h", p.kF_h);
        if (!(p.kF_a >= 0 && p.kF_b > 0 && p.kF_h > 0)) k.fail("need a >= 0, b > 0, h > 0");
    }
    if (r.has("kappa_A")) {
        const Reader k = r.at("kappa_A");
        k.allow_only({"family", "c", "d"});
        p.kA_family = kappa_a_family(k, "family", p.kA_family);
        p.kA_c = k.number("c", p.kA_c);
        p.kA_d = k.number("d", p.kA_d);
        if (!(p.kA_c > 0)) k.fail("c", "must be positive");
        if (p.kA_family != KappaAFamily::Linear && !(p.kA_d > 0)) k.fail("d", "must be positive");
    }
    if (r.has("kappa_A_O")) {
        const Reader k = r.at("kappa_A_O");
        k.allow_only({"c"});
        p.kAO_c = k.number("c", p.kAO_c);
        if (!(p.kAO_c > 0)) k.fail("c", "must be positive");
    }
    if (r.has("V_A_XY")) {
        const Reader k = r.at("V_A_XY");
        k.allow_only({"c"});
        p.VXY_c = k.number("c", p.VXY_c);
        if (!(p.VXY_c > 0)) k.fail("c", "must be positive");
    }
    if (r.has("kappa_B")) {
        const Reader k = r.at("kappa_B");
        k.allow_only({"c", "mode"});
        p.kB_c = k.number("c", p.kB_c);
        const std::string mode = k.str("mode", "kappa-like");
        if (mode == "kappa-like")
            p.kB_mode = BarrierGainMode::KappaLike;
        else if (mode == "negated")
            p.kB_mode = BarrierGainMode::Negated;
        else
            k.fail("mode", "expected kappa-like or negated");
        if (!(p.kB_c > 0)) k.fail("c", "must be positive");
    }
    return p;
}

// Revolute entries in degrees, prismatic in meters.
VectorXd joint_values(const Reader& r, const std::string& key, const RobotModel& m, bool allow_null = false) {
    const auto v = r.numbers(key, static_cast<long>(m.arm_dof()), allow_null);
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j)
        out[static_cast<Eigen::Index>(j)] =
            m.joints()[j].type == JointType::Revolute ? deg2rad(v[j]) : v[j];
    return out;
}

LimitConfig parse_limits(const Reader& r, const RobotModel& m) {
    r.allow_only({"preset", "u_D_upper", "u_D_lower", "u_m_upper", "u_m_lower", "q_m_upper", "q_m_lower", "K_L"});
    LimitConfig c;
    const std::string name = r.str("preset", r.has("u_D_upper") ? "" : "baseline");
    if (name == "baseline") {
        if (m.arm_dof() != 2) r.fail("preset", "baseline limits need a two-joint arm");
        c = baseline_limits();
    } else if (!name.empty()) {
        r.fail("preset", "unknown limits preset '" + name + "'");
    } else {
        for (const char* k : {"u_D_upper", "u_m_upper", "q_m_upper"}) r.raw(k);
    }
    auto drone = [&](const std::string& key) {
        const auto v = r.numbers(key, 4, true);
        Eigen::Vector4d out(v[0], v[1], v[2], std::isinf(v[3]) ? v[3] : deg2rad(v[3]));
        return out;
    };
    if (r.has("u_D_upper")) {
        c.uD_upper = drone("u_D_upper");
        c.uD_lower = -c.uD_upper;
    }
    if (r.has("u_D_lower")) c.uD_lower = -drone("u_D_lower").cwiseAbs();
    if (r.has("u_m_upper")) {
        c.um_upper = joint_values(r, "u_m_upper", m);
        c.um_lower = -c.um_upper;
    }
    if (r.has("u_m_lower")) c.um_lower = -joint_values(r, "u_m_lower", m).cwiseAbs();
    if (r.has("q_m_upper")) {
        c.qm_upper = joint_values(r, "q_m_upper", m);
        c.qm_lower = -c.qm_upper;
    }
    if (r.has("q_m_lower")) c.qm_lower = joint_values(r, "q_m_lower", m);
    c.K_L = r.number("K_L", c.K_L);
    try {
        c.validate(m.arm_dof());
    } catch (const ContractViolation& e) {
        r.fail(e.what());
    }
    return c;
}

ForceModel parse_force(const Reader& r) {
    const std::string type = r.str("type", "spring");
    ForceModel fm;
    if (type == "spring") {
        r.allow_only({"type", "k"});
        fm = Spring{r.number("k")};
    } else if (type == "saturating-spring") {
        r.allow_only({"type", "k", "F_sat"});
        fm = SaturatingSpring{r.number("k"), r.number("F_sat")};
    } else if (type == "table") {
        r.allow_only({"type", "points"});
        const json& pts = r.raw("points");
        if (!pts.is_array()) r.fail("points", "expected an array of [Z, F] pairs");
        ForceTable t;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const json& p = pts[i];
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError(r.sub("points") + "[" + std::to_string(i) + "]", "expected [Z, F]");
            t.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        fm = t;
    } else {
        r.fail("type", "expected spring, saturating-spring or table");
    }
    try {
        validate_force_model(fm);
    } catch (const ContractViolation& e) {
        r.fail(e.what());
    }
    return fm;
}

// x, y, z in meters (or ee = [X, Y, Z] to place the end effector), psi_deg, q_m.
VectorXd parse_config(const Reader& r, const RobotModel& m, bool is_delta) {
    r.allow_only({"x", "y", "z", "ee", "psi_deg", "q_m"});
    const auto n = static_cast<Eigen::Index>(m.dof());
    VectorXd q = VectorXd::Zero(n);
    q[kPsi] = deg2rad(r.number("psi_deg", 0.0));
    if (r.has("q_m")) q.tail(n - kArm) = joint_values(r, "q_m", m);
    else if (!is_delta) r.raw("q_m");
    if (r.has("ee")) {
        if (is_delta) r.fail("ee", "not allowed in a disturbance");
        if (r.has("x") || r.has("y") || r.has("z")) r.fail("ee", "give either ee or x, y, z");
        const Vec3 target = vec3(r, "ee", Vec3::Zero());
        const EndEffectorState ee = forward_kinematics(q, m);
        q.head<3>() = target - Vec3(ee.X, ee.Y, ee.Z);
    } else {
        q[kX] = r.number("x", 0.0);
        q[kY] = r.number("y", 0.0);
        q[kZ] = is_delta ? r.number("z", 0.0) : r.number("z");
    }
    return q;
}

}  // namespace

ScenarioConfig parse_scenario(const json& j) {
    const Reader r(j, "");
    r.allow_only({"name", "description", "robot", "shaping", "limits", "regularization", "force_model", "q0",
                  "F_d", "Z_d_star", "dt", "dt_auto", "duration", "reference", "disturbances"});
    ScenarioConfig c;
    c.name = r.str("name", "custom");
    c.model = r.has("robot") ? parse_robot(r.at("robot")) : RobotModel();
    if (!c.model.yaw_axis_transversal()) r.fail("robot", "yaw axis is parallel to the plane normal");
    c.shaping = r.has("shaping") ? parse_shaping(r.at("shaping")) : baseline_params();
    c.limits = r.has("limits") ? parse_limits(r.at("limits"), c.model) : parse_limits(Reader(json::object(), "limits"), c.model);

    const auto n = static_cast<long>(c.model.dof());
    if (!r.has("regularization") || (r.raw("regularization").is_string())) {
        if (r.str("regularization", "baseline") != "baseline") r.fail("regularization", "unknown preset");
        c.E_diag = baseline_regularization(c.model.dof());
    } else {
        const auto e = r.numbers("regularization", n);
        c.E_diag = Eigen::Map<const VectorXd>(e.data(), n);
        if (c.E_diag[kZ] != 0.0) r.fail("regularization", "entry 3 (z) must be zero");
        for (long i = 0; i < n; ++i)
            if (i != kZ && !(c.E_diag[i] > 0)) r.fail("regularization", "entries other than z must be positive");
    }

    c.force = r.has("force_model") ? parse_force(r.at("force_model")) : ForceModel(Spring{300.0});
    c.q0 = parse_config(r.at("q0"), c.model, false);
    c.F_d = r.number("F_d");
    if (!(c.F_d < 0)) r.fail("F_d", "must be negative");
    c.Z_d_star = r.number("Z_d_star");
    if (!(c.Z_d_star < 0)) r.fail("Z_d_star", "must be negative");
    try {
        const double Z_d = insertion_for_force(c.F_d, c.force);
        (void)Z_d;
    } catch (const RangeError& e) {
        r.fail("F_d", e.what());
    }
    c.dt = r.number("dt", 1.0 / 60.0);
    if (!(c.dt > 0)) r.fail("dt", "must be positive");
    c.dt_auto = r.boolean("dt_auto", true);
    c.duration = r.number("duration", 20.0);
    if (!(c.duration >= c.dt)) r.fail("duration", "must be at least dt");

    if (r.has("reference")) {
        const json& w = r.raw("reference");
        if (!w.is_array()) r.fail("reference", "expected an array of [t, X, Y]");
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::string p = "reference[" + std::to_string(i) + "]";
            if (!w[i].is_array() || w[i].size() != 3) throw ConfigError(p, "expected [t, X, Y]");
            for (const auto& x : w[i])
                if (!x.is_number()) throw ConfigError(p, "expected numbers");
            c.reference.waypoints.push_back({w[i][0].get<double>(), w[i][1].get<double>(), w[i][2].get<double>()});
            if (i > 0 && c.reference.waypoints[i][0] < c.reference.waypoints[i - 1][0])
                throw ConfigError(p, "waypoint times must not decrease");
        }
    }
    if (r.has("disturbances")) {
        const json& ds = r.raw("disturbances");
        if (!ds.is_array()) r.fail("disturbances", "expected an array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const Reader dr(ds[i], "disturbances[" + std::to_string(i) + "]");
            dr.allow_only({"time", "dq"});
            Disturbance d;
            d.time = dr.number("time");
            d.dq = parse_config(dr.at("dq"), c.model, true);
            c.disturbances.push_back(d);
        }
    }
    try {
        c.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError("", e.what());
    }
    return c;
}

json parse_scenario_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream os;
        // Report line and column from the byte offset.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        os << "line " << line << ", column " << col << ": invalid JSON";
        throw ConfigError("", os.str());
    }
}

json load_scenario_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open scenario file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

ScenarioConfig load_scenario_file(const std::string& path) { return parse_scenario(load_scenario_json(path)); }

namespace {

json vertical_wall_base() {
    return json{
        {"robot", {{"plane_rpy_deg", {0, -90, 0}}, {"arm", "planar-2dof"}}},
        {"shaping", {{"preset", "baseline"}}},
        {"limits", {{"preset", "baseline"}}},
        {"regularization", "baseline"},
        {"force_model", {{"type", "spring"}, {"k", 300}}},
        {"F_d", -3},
        {"Z_d_star", -0.025},
        {"dt", 1.0 / 240.0},
        {"dt_auto", true},
        {"duration", 30},
    };
}

json make_preset(const std::string& name) {
    json j = vertical_wall_base();
    j["name"] = name;
    if (name == "exp1-above") {
        j["description"] = "far from a vertical wall and misaligned, above the B = 0 curve";
        j["q0"] = {{"ee", {0.06, -0.05, 0.8}}, {"psi_deg", 8}, {"q_m", {30, -38}}};
    } else if (name == "exp1-bounded-z") {
        j = make_preset("exp1-above");
        j["name"] = name;
        j["description"] = "exp1-above with the z rate limited to 0.3 m/s";
        j["limits"]["u_D_upper"] = {0.1, 0.15, 0.3, 5.7};
    } else if (name == "exp2-below") {
        j["description"] = "pressed past F_d and slightly misaligned, below the B = 0 curve";
        j["q0"] = {{"ee", {0.004, 0.003, -0.025}}, {"psi_deg", 0.5}, {"q_m", {30, -30.5}}};
    } else if (name == "exp3-inclined") {
        j["description"] = "wall inclined 30 degrees from vertical";
        j["robot"]["plane_rpy_deg"] = {0, -60, 0};
        j["q0"] = {{"ee", {-0.05, 0.06, 0.8}}, {"psi_deg", 8}, {"q_m", {20, 5}}};
    } else if (name == "exp4-sweep") {
        j = make_preset("exp1-above");
        j["name"] = name;
        j["description"] = "base point of the desired force sweep, F_d in {-1, ..., -5} N";
        j["F_d"] = -1;
    } else if (name == "exp5-hard") {
        j = make_preset("exp1-above");
        j["name"] = name;
        j["description"] = "stiff contact, k = 1e5 N/m";
        j["force_model"]["k"] = 1e5;
        j["Z_d_star"] = -0.001;
        j["duration"] = 20;
    } else if (name == "exp6-moving") {
        j = make_preset("exp1-above");
        j["name"] = name;
        j["description"] = "contact point moved along the surface after contact";
        j["reference"] = {{0, 0, 0}, {10, 0, 0}, {18, 0.1, 0.05}};
        j["duration"] = 30;
    } else {
        throw ConfigError("preset", "unknown preset '" + name + "'");
    }
    return j;
}

std::string canonical(const std::string& name) {
    static const std::vector<std::pair<std::string, std::string>> aliases = {
        {"exp1", "exp1-above"}, {"exp2", "exp2-below"}, {"exp3", "exp3-inclined"},
        {"exp4", "exp4-sweep"}, {"exp5", "exp5-hard"},  {"exp6", "exp6-moving"},
    };
    for (const auto& [a, b] : aliases)
        if (name == a) return b;
    return name;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"exp1-above", "exp1-bounded-z", "exp2-below",  "exp3-inclined",
                                                   "exp4-sweep", "exp5-hard",      "exp6-moving"};
    return names;
}

json preset_json(const std::string& name) { return make_preset(canonical(name)); }

ScenarioConfig preset(const std::string& name) { return parse_scenario(preset_json(name)); }

GridAxis parse_grid(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("grid", "expected /pointer=v1,v2,...");
    GridAxis g;
    g.pointer = spec.substr(0, eq);
    if (g.pointer[0] != '/') g.pointer = "/" + g.pointer;
    std::istringstream is(spec.substr(eq + 1));
    std::string item;
    while (std::getline(is, item, ',')) {
        if (item.empty()) continue;
        try {
            g.values.push_back(json::parse(item));
        } catch (const json::parse_error&) {
            g.values.emplace_back(item);
        }
    }
    if (g.values.empty()) throw ConfigError("grid", "grid has no values");
    return g;
}

}  // namespace safeforce
