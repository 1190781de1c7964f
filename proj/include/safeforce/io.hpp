#pragma once

#include "safeforce/analysis.hpp"
#include "safeforce/simulator.hpp"

#include <iosfwd>
#include <string>

namespace safeforce {

// Metadata as "# key=value" lines, then a header row, fixed 9-decimal values.
void write_csv(std::ostream& os, const Trajectory& tr);
Trajectory read_csv(std::istream& is);

void write_audit(std::ostream& os, const Trajectory& tr, const AuditReport& r);

// (A, Z) plane: the B = 0 curve, the Z_d line and the trajectory.
void write_svg(std::ostream& os, const Trajectory& tr, const ScalarShaping& s);

// One JSON object per line; unbounded bounds are written as null.
std::string qp_dump_line(double t, const ControlEval& ev);

}  // namespace safeforce
