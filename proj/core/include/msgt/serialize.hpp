#pragma once

#include <string>

#include "msgt/charmap.hpp"
#include "msgt/inclusion.hpp"
#include "msgt/smallgain.hpp"
#include "msgt/system.hpp"

namespace msgt {

/// Fixed 17-significant-digit formatting used by every CSV writer.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// CSV ------------------------------------------------------------------------

/// Header t,x1..xn,u,y; one row per stored step.
std::string trajectory_to_csv(const Trajectory& traj);

/// Header t,x1..,z1..,y,w for closed-loop runs.
std::string loop_trajectory_to_csv(const LoopTrajectory& traj, std::size_t dim_x);

/// Header u,branch_index,value; `samples` rows per grid point, one per branch.
std::string characteristic_samples_csv(const MultiMap& map, double lo, double hi, int samples);

/// Header start,step,value,branch; paths are separated by `# path` comment
/// lines carrying the classification.
std::string paths_to_csv(const PathSet& set, double start);

// JSON -----------------------------------------------------------------------

std::string profile_to_json(const CardinalityProfile& profile);
std::string classification_to_json(const GridClassification& cls);
std::string fixed_points_to_json(const FixedPointResult& result);
std::string verification_report_to_json(const VerificationReport& report);
std::string convergence_report_to_json(const ConvergenceReport& report);
std::string characteristic_report_to_json(const CharacteristicReport& report);

/// Human-readable rendering mirroring the JSON report.
std::string verification_report_to_text(const VerificationReport& report);

/// Parses a JSON fragment of budget overrides, e.g.
/// {"t_final": 40, "depth": 60}. Unknown keys are rejected.
VerificationBudget budget_from_json(const std::string& text);

}  // namespace msgt
