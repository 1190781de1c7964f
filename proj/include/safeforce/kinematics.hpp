#pragma once

#include "safeforce/geometry.hpp"

#include <cstddef>
#include <vector>

namespace safeforce {

// q = [x y z psi q_m...], vehicle position and yaw expressed in the plane frame.
using Configuration = Eigen::VectorXd;

enum Index : int { kX = 0, kY = 1, kZ = 2, kPsi = 3, kArm = 4 };

enum class JointType { Revolute, Prismatic };

struct Joint {
    JointType type = JointType::Revolute;
    Transform origin = Transform::Identity();  // previous frame -> joint frame at q = 0
    Vec3 axis = Vec3::UnitY();                 // in the joint frame
};

class RobotModel {
public:
    RobotModel();  // planar_2dof with the plane frame equal to the world frame
    // R_PW rotates world coordinates into plane coordinates.
    RobotModel(std::vector<Joint> joints, const Transform& tool, double roll = 0.0,
               double pitch = 0.0, const Mat3& R_PW = Mat3::Identity());

    // Two revolute joints about the body y axis, links along body x, tool z along the last link.
    static RobotModel planar_2dof(const Mat3& R_PW, double link = 0.15, double mount_z = -0.1,
                                  double roll = 0.0, double pitch = 0.0);

    std::size_t dof() const { return 4 + joints_.size(); }
    std::size_t arm_dof() const { return joints_.size(); }
    const std::vector<Joint>& joints() const { return joints_; }
    const Transform& tool() const { return tool_; }
    double roll() const { return roll_; }
    double pitch() const { return pitch_; }
    const Mat3& R_PW() const { return R_PW_; }

    const Vec3& yaw_axis() const { return a_z_; }
    const Vec3& a_y() const { return a_y_; }
    const Vec3& a_x() const { return a_x_; }

    // Yaw axis not parallel to the plane normal.
    bool yaw_axis_transversal(double tol = 1e-9) const { return a_y_.norm() > tol; }

    void check(const Configuration& q) const;

private:
    std::vector<Joint> joints_;
    Transform tool_;
    double roll_, pitch_;
    Mat3 R_PW_;
    Vec3 a_z_, a_y_, a_x_;
};

struct EndEffectorState {
    double X = 0, Y = 0, Z = 0;
    Vec3 x_hat = Vec3::UnitX(), y_hat = Vec3::UnitY(), z_hat = Vec3::UnitZ();
};

struct ChainState {
    EndEffectorState ee;
    Vec3 p_U;
    std::vector<Vec3> joint_origins;  // in P
    std::vector<Vec3> joint_dirs;     // axis direction in P, for both joint types
};

ChainState chain_state(const Configuration& q, const RobotModel& model);
EndEffectorState forward_kinematics(const Configuration& q, const RobotModel& model);

// 0-based joint index. Zero vector for prismatic joints.
Vec3 joint_axis(const Configuration& q, const RobotModel& model, std::size_t j);

struct TaskGradients {
    VectorXd X, Y, Z, r_O;
    Eigen::Matrix3Xd z_hat;  // column i = d z_hat / d q_i
};

TaskGradients grad_task(const Configuration& q, const RobotModel& model);
TaskGradients grad_task(const RobotModel& model, const ChainState& cs);

}  // namespace safeforce
