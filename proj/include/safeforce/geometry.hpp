#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace safeforce {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Transform = Eigen::Isometry3d;
using Eigen::VectorXd;
using Eigen::MatrixXd;

// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

Mat3 rot_x(double a);
Mat3 rot_y(double a);
Mat3 rot_z(double a);

// R = Rz(yaw) * Ry(pitch) * Rx(roll)
Mat3 rpy(double roll, double pitch, double yaw);

Transform make_transform(const Vec3& p, const Mat3& R);

inline Mat3 skew(const Vec3& v) {
    Mat3 S;
    S << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return S;
}

}  // namespace safeforce
