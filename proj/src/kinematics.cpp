#include "safeforce/kinematics.hpp"

#include <cmath>
#include <sstream>

namespace safeforce {

namespace {

bool is_rotation(const Mat3& R, double tol = 1e-9) {
    return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
           std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace

RobotModel::RobotModel(std::vector<Joint> joints, const Transform& tool, double roll, double pitch,
                       const Mat3& R_PW)
    : joints_(std::move(joints)), tool_(tool), roll_(roll), pitch_(pitch), R_PW_(R_PW) {
    if (joints_.empty()) throw ContractViolation("robot model needs at least one arm joint");
    if (!is_rotation(R_PW_)) throw ContractViolation("plane rotation is not a proper rotation");
    if (!std::isfinite(roll_) || !std::isfinite(pitch_))
        throw ContractViolation("roll/pitch must be finite");
    for (std::size_t j = 0; j < joints_.size(); ++j) {
        if (!is_rotation(joints_[j].origin.linear())) {
            std::ostringstream os;
            os << "joint " << j << " origin is not rigid";
            throw ContractViolation(os.str());
        }
        const double n = joints_[j].axis.norm();
        if (!(n > 1e-12)) throw ContractViolation("joint axis must be nonzero");
        joints_[j].axis /= n;
    }
    if (!is_rotation(tool_.linear())) throw ContractViolation("tool transform is not rigid");
    a_z_ = R_PW_ * Vec3::UnitZ();
    a_y_ = Vec3::UnitZ().cross(a_z_);
    a_x_ = a_y_.cross(a_z_);
}

RobotModel::RobotModel() : RobotModel(planar_2dof(Mat3::Identity())) {}

RobotModel RobotModel::planar_2dof(const Mat3& R_PW, double link, double mount_z, double roll,
                                   double pitch) {
    Joint j1;
    j1.origin = make_transform(Vec3(0, 0, mount_z), Mat3::Identity());
    Joint j2;
    j2.origin = make_transform(Vec3(link, 0, 0), Mat3::Identity());
    const Transform tool = make_transform(Vec3(link, 0, 0), rot_y(kPi / 2));
    return RobotModel({j1, j2}, tool, roll, pitch, R_PW);
}

void RobotModel::check(const Configuration& q) const {
    if (static_cast<std::size_t>(q.size()) != dof()) {
        std::ostringstream os;
        os << "configuration has " << q.size() << " entries, model expects " << dof();
        throw ContractViolation(os.str());
    }
    if (!q.allFinite()) throw ContractViolation("configuration has non-finite entries");
}

ChainState chain_state(const Configuration& q, const RobotModel& model) {
    model.check(q);
    ChainState cs;
    cs.p_U = q.head<3>();
    Transform T = make_transform(cs.p_U, model.R_PW() * rpy(model.roll(), model.pitch(), q[kPsi]));
    const auto& joints = model.joints();
    cs.joint_origins.reserve(joints.size());
    cs.joint_dirs.reserve(joints.size());
    for (std::size_t j = 0; j < joints.size(); ++j) {
        const Joint& jt = joints[j];
        T = T * jt.origin;
        cs.joint_origins.push_back(T.translation());
        cs.joint_dirs.push_back(T.linear() * jt.axis);
        const double v = q[kArm + static_cast<int>(j)];
        if (jt.type == JointType::Revolute)
            T = T * Transform(Eigen::AngleAxisd(v, jt.axis));
        else
            T = T * Eigen::Translation3d(v * jt.axis);
    }
    T = T * model.tool();
    cs.ee.X = T.translation().x();
    cs.ee.Y = T.translation().y();
    cs.ee.Z = T.translation().z();
    cs.ee.x_hat = T.linear().col(0);
    cs.ee.y_hat = T.linear().col(1);
    cs.ee.z_hat = T.linear().col(2);
    return cs;
}

EndEffectorState forward_kinematics(const Configuration& q, const RobotModel& model) {
    return chain_state(q, model).ee;
}

Vec3 joint_axis(const Configuration& q, const RobotModel& model, std::size_t j) {
    if (j >= model.arm_dof()) throw ContractViolation("joint index out of range");
    if (model.joints()[j].type == JointType::Prismatic) return Vec3::Zero();
    return chain_state(q, model).joint_dirs[j].normalized();
}

TaskGradients grad_task(const Configuration& q, const RobotModel& model) {
    return grad_task(model, chain_state(q, model));
}

TaskGradients grad_task(const RobotModel& model, const ChainState& cs) {
    const int n = static_cast<int>(model.dof());
    TaskGradients g;
    g.X = VectorXd::Zero(n);
    g.Y = VectorXd::Zero(n);
    g.Z = VectorXd::Zero(n);
    g.r_O = VectorXd::Zero(n);
    g.z_hat = Eigen::Matrix3Xd::Zero(3, n);

    g.X[kX] = 1.0;
    g.Y[kY] = 1.0;
    g.Z[kZ] = 1.0;

    const Vec3 p_E(cs.ee.X, cs.ee.Y, cs.ee.Z);
    const Vec3& zh = cs.ee.z_hat;
    const Vec3& a_z = model.yaw_axis();

    auto set_col = [&](int i, const Vec3& dp, const Vec3& dz, double drO) {
        g.X[i] = dp.x();
        g.Y[i] = dp.y();
        g.Z[i] = dp.z();
        g.z_hat.col(i) = dz;
        g.r_O[i] = drO;
    };

    set_col(kPsi, a_z.cross(p_E - cs.p_U), a_z.cross(zh), model.a_y().dot(zh));

    const auto& joints = model.joints();
    for (std::size_t j = 0; j < joints.size(); ++j) {
        const int i = kArm + static_cast<int>(j);
        if (joints[j].type == JointType::Revolute) {
            const Vec3 n_j = cs.joint_dirs[j].normalized();
            set_col(i, n_j.cross(p_E - cs.joint_origins[j]), n_j.cross(zh),
                    Vec3::UnitZ().cross(n_j).dot(zh));
        } else {
            set_col(i, cs.joint_dirs[j].normalized(), Vec3::Zero(), 0.0);
        }
    }
    return g;
}

}  // namespace safeforce
