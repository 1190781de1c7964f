#include "safeforce/geometry.hpp"

#include <cmath>

namespace safeforce {

Mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 R;
    R << 1, 0, 0, 0, c, -s, 0, s, c;
    return R;
}

Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 R;
    R << c, 0, s, 0, 1, 0, -s, 0, c;
    return R;
}

Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 R;
    R << c, -s, 0, s, c, 0, 0, 0, 1;
    return R;
}

Mat3 rpy(double roll, double pitch, double yaw) {
    return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

Transform make_transform(const Vec3& p, const Mat3& R) {
    Transform T = Transform::Identity();
    T.linear() = R;
    T.translation() = p;
    return T;
}

}  // namespace safeforce
