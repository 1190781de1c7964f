#include <charconv>
#include "safeforce/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace safeforce {

namespace {

std::string join_indices(const std::vector<std::size_t>& v, std::size_t limit = 20) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size() && i < limit; ++i) os << (i ? "," : "") << v[i];
    if (v.size() > limit) os << ",... (" << v.size() << " total)";
    return os.str();
}

std::string vec_text(const VectorXd& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

VectorXd parse_vec(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> v;
    double x;
    while (is >> x) v.push_back(x);
    return Eigen::Map<VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        std::ostringstream os;
        os << "line " << line << ": bad number '" << s << "'";
        throw TrajectoryError(os.str());
    }
}

}  // namespace

void write_csv(std::ostream& os, const Trajectory& tr) {
    const auto& m = tr.meta;
    os << "# name=" << m.name << '\n'
       << "# n=" << m.n << '\n'
       << std::setprecision(17) << "# dt=" << m.dt << '\n'
       << "# F_d=" << m.F_d << '\n'
       << "# Z_d=" << m.Z_d << '\n'
       << "# Z_d_star=" << m.Z_d_star << '\n'
       << "# z_unbounded=" << (m.z_unbounded ? 1 : 0) << '\n'
       << "# time_varying_reference=" << (m.time_varying_reference ? 1 : 0) << '\n'
       << "# qm_lower=" << vec_text(m.qm_lower) << '\n'
       << "# qm_upper=" << vec_text(m.qm_upper) << '\n'
       << "# held_steps=" << m.held_steps << '\n'
       << "# disturbance_steps=";
    for (std::size_t i = 0; i < m.disturbance_steps.size(); ++i)
        os << (i ? " " : "") << m.disturbance_steps[i];
    os << '\n';

    os << "t";
    for (std::size_t i = 0; i < m.n; ++i) os << ",q" << i;
    for (std::size_t i = 0; i < m.n; ++i) os << ",u" << i;
    os << ",F,X,Y,Z,r_O,orientation_error_deg,A,B,kappa_F,V_F,V_F_dot,lambda,X_ref,Y_ref,feasible,"
          "active\n";
    std::string line;
    auto put = [&line](double v) {
        char buf[400];
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
        line.append(buf, res.ptr);
    };
    for (const Sample& s : tr.samples) {
        line.clear();
        put(s.t);
        for (Eigen::Index i = 0; i < s.q.size(); ++i) {
            line += ',';
            put(s.q[i]);
        }
        for (Eigen::Index i = 0; i < s.u.size(); ++i) {
            line += ',';
            put(s.u[i]);
        }
        for (double v : {s.F, s.X, s.Y, s.Z, s.r_O, orientation_error_deg(s.r_O), s.A, s.B, s.kappa_F, s.VF,
                         s.VF_dot, s.lambda, s.X_ref, s.Y_ref}) {
            line += ',';
            put(v);
        }
        os << line << ',' << (s.feasible ? 1 : 0) << ',' << s.active << '\n';
    }
}

Trajectory read_csv(std::istream& is) {
    Trajectory tr;
    auto& m = tr.meta;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    const std::size_t extra = 16;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
            if (key == "name") m.name = val;
            else if (key == "n") m.n = static_cast<std::size_t>(to_double(val, lineno));
            else if (key == "dt") m.dt = to_double(val, lineno);
            else if (key == "F_d") m.F_d = to_double(val, lineno);
            else if (key == "Z_d") m.Z_d = to_double(val, lineno);
            else if (key == "Z_d_star") m.Z_d_star = to_double(val, lineno);
            else if (key == "z_unbounded") m.z_unbounded = val == "1";
            else if (key == "time_varying_reference") m.time_varying_reference = val == "1";
            else if (key == "qm_lower") m.qm_lower = parse_vec(val);
            else if (key == "qm_upper") m.qm_upper = parse_vec(val);
            else if (key == "held_steps") m.held_steps = static_cast<std::size_t>(to_double(val, lineno));
            else if (key == "disturbance_steps") {
                std::istringstream vs(val);
                std::size_t k;
                while (vs >> k) m.disturbance_steps.push_back(k);
            }
            continue;
        }
        if (!header) {
            header = true;
            if (m.n == 0 || split(line, ',').size() != 1 + 2 * m.n + extra)
                throw TrajectoryError("CSV header does not match the metadata");
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 1 + 2 * m.n + extra) {
            std::ostringstream os;
            os << "line " << lineno << ": expected " << 1 + 2 * m.n + extra << " fields, got " << f.size();
            throw TrajectoryError(os.str());
        }
        Sample s;
        std::size_t c = 0;
        const auto n = static_cast<Eigen::Index>(m.n);
        s.t = to_double(f[c++], lineno);
        s.q.resize(n);
        s.u.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) s.q[i] = to_double(f[c++], lineno);
        for (Eigen::Index i = 0; i < n; ++i) s.u[i] = to_double(f[c++], lineno);
        s.F = to_double(f[c++], lineno);
        s.X = to_double(f[c++], lineno);
        s.Y = to_double(f[c++], lineno);
        s.Z = to_double(f[c++], lineno);
        s.r_O = to_double(f[c++], lineno);
        ++c;  // orientation error is derived
        s.A = to_double(f[c++], lineno);
        s.B = to_double(f[c++], lineno);
        s.kappa_F = to_double(f[c++], lineno);
        s.VF = to_double(f[c++], lineno);
        s.VF_dot = to_double(f[c++], lineno);
        s.lambda = to_double(f[c++], lineno);
        s.X_ref = to_double(f[c++], lineno);
        s.Y_ref = to_double(f[c++], lineno);
        s.feasible = f[c++] == "1";
        s.active = f[c++];
        tr.samples.push_back(std::move(s));
    }
    if (!header) throw TrajectoryError("CSV has no header row");
    return tr;
}

void write_audit(std::ostream& os, const Trajectory& tr, const AuditReport& r) {
    const auto& m = tr.meta;
    os << std::setprecision(6);
    os << "scenario: " << m.name << '\n'
       << "samples: " << tr.samples.size() << "  dt: " << m.dt << "  held steps: " << m.held_steps << '\n'
       << "first step inside P: " << (r.ever_safe ? std::to_string(r.first_safe_step) : "never") << '\n'
       << "barrier B >= 0: " << to_string(r.barrier) << "  (min B " << r.min_B << ")\n"
       << "barrier diagram: " << to_string(r.diagram) << '\n'
       << "V_F non-increasing: " << to_string(r.potential) << "  (max step increase " << r.max_dVF << ")\n"
       << "A non-increasing: " << to_string(r.alignment);
    if (r.alignment == Check::NotApplicable && !r.alignment_note.empty()) os << " (" << r.alignment_note << ")";
    else os << "  (max step increase " << r.max_dA << ")";
    os << '\n'
       << "joint limits: " << to_string(r.joints) << '\n'
       << "terminal |F - F_d|: " << r.terminal_force_error << " N\n"
       << "terminal A: " << r.terminal_A << "  bound: " << r.alignment_bound << "  "
       << (r.terminal_alignment_ok ? "within" : "above") << '\n';
    auto list = [&](const char* name, const std::vector<std::size_t>& v) {
        if (!v.empty()) os << "failing steps (" << name << "): " << join_indices(v) << '\n';
    };
    list("barrier", r.barrier_fail);
    list("diagram", r.diagram_fail);
    list("V_F", r.potential_fail);
    list("A", r.alignment_fail);
    list("joints", r.joints_fail);
    os << "result: " << (r.pass() ? "PASS" : "FAIL") << '\n';
}

void write_svg(std::ostream& os, const Trajectory& tr, const ScalarShaping& s) {
    const double W = 640, H = 480, L = 70, R = 20, T = 20, Bm = 50;
    double a_max = 0.0, z_min = std::min(tr.meta.Z_d_star, tr.meta.Z_d), z_max = 0.0;
    for (const Sample& x : tr.samples) {
        a_max = std::max(a_max, x.A);
        z_min = std::min(z_min, x.Z);
        z_max = std::max(z_max, x.Z);
    }
    a_max = a_max > 0 ? 1.05 * a_max : 1.0;
    z_max = std::max(z_max, tr.meta.Z_d_star + s.kappa_A(a_max));
    const double z_pad = 0.05 * (z_max - z_min);
    z_min -= z_pad;
    z_max += z_pad;
    auto px = [&](double a) { return L + (W - L - R) * a / a_max; };
    auto py = [&](double z) { return H - Bm - (H - T - Bm) * (z - z_min) / (z_max - z_min); };

    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - Bm << "\" x2=\"" << W - R << "\" y2=\"" << H - Bm
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - Bm
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double a = a_max * i / 4.0, z = z_min + (z_max - z_min) * i / 4.0;
        os << "<text x=\"" << px(a) << "\" y=\"" << H - Bm + 18 << "\" font-size=\"11\" text-anchor=\"middle\">"
           << std::setprecision(3) << a << std::setprecision(2) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(z) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
           << std::setprecision(3) << z << std::setprecision(2) << "</text>\n";
    }
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"13\" text-anchor=\"middle\">A</text>\n";
    os << "<text x=\"16\" y=\"" << (T + H - Bm) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (T + H - Bm) / 2 << ")\">Z [m]</text>\n";

    os << "<polyline id=\"barrier\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
    for (int i = 0; i <= 200; ++i) {
        const double a = a_max * i / 200.0;
        os << (i ? " " : "") << px(a) << ',' << py(s.Z_d_star + s.kappa_A(a));
    }
    os << "\"/>\n";
    os << "<line id=\"Z_d\" x1=\"" << L << "\" y1=\"" << py(tr.meta.Z_d) << "\" x2=\"" << W - R << "\" y2=\""
       << py(tr.meta.Z_d) << "\" stroke=\"#7f8c8d\" stroke-dasharray=\"4 3\"/>\n";

    const std::size_t N = tr.samples.size();
    const std::size_t stride = std::max<std::size_t>(1, N / 2000);
    os << "<polyline id=\"trajectory\" fill=\"none\" stroke=\"#2962ff\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t k = 0; k < N; k += stride) {
        os << (first ? "" : " ") << px(tr.samples[k].A) << ',' << py(tr.samples[k].Z);
        first = false;
    }
    if ((N - 1) % stride != 0) os << ' ' << px(tr.samples.back().A) << ',' << py(tr.samples.back().Z);
    os << "\"/>\n";
    if (N > 0) {
        os << "<circle cx=\"" << px(tr.samples.front().A) << "\" cy=\"" << py(tr.samples.front().Z)
           << "\" r=\"4\" fill=\"#2962ff\"/>\n";
        os << "<circle cx=\"" << px(tr.samples.back().A) << "\" cy=\"" << py(tr.samples.back().Z)
           << "\" r=\"4\" fill=\"#00c853\"/>\n";
    }
    os << "</svg>\n";
    os.unsetf(std::ios::floatfield);
}

std::string qp_dump_line(double t, const ControlEval& ev) {
    using nlohmann::json;
    auto vec = [](const VectorXd& v) {
        json a = json::array();
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::isfinite(v[i]))
                a.push_back(v[i]);
            else
                a.push_back(nullptr);
        }
        return a;
    };
    const QPProblem& p = ev.problem;
    json H = json::array();
    for (Eigen::Index r = 0; r < p.H.rows(); ++r) H.push_back(vec(p.H.row(r).transpose()));
    json j;
    j["t"] = t;
    j["H"] = H;
    j["f"] = vec(p.f);
    j["cbf_row"] = vec(p.cbf_row);
    j["cbf_rhs"] = p.cbf_rhs;
    j["lower"] = vec(p.bounds.lower);
    j["upper"] = vec(p.bounds.upper);
    j["kappa_F"] = p.kappa_F;
    const QPSolution& s = ev.sol;
    j["status"] = s.status == SolveStatus::Feasible ? "feasible" : "infeasible";
    j["margin"] = std::isfinite(s.margin) ? json(s.margin) : json(nullptr);
    j["mu"] = vec(s.mu);
    if (s.status == SolveStatus::Feasible) {
        j["lambda"] = s.lambda;
        j["lambda_lower"] = vec(s.lambda_lower);
        j["lambda_upper"] = vec(s.lambda_upper);
        j["kkt_residual"] = s.kkt_residual;
        j["active_set"] = s.active_set;
        j["W"] = s.objective;
    }
    return j.dump();
}

}  // namespace safeforce
