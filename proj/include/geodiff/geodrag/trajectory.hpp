#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geodiff::drag {

// One line of the trajectory log. Iteration records carry no event; event
// records are enter_I, exit_I, copy_paste (per point) and denoise (point_id -1,
// no position). tx/ty repeat the point's target so a log is self-contained.
struct TrajectoryRecord {
  int timestep = 0;
  int iteration = 0;
  int point_id = -1;
  std::optional<double> x, y, e;
  std::optional<bool> fixated;
  std::optional<double> loss;
  std::string event;  // empty for plain iteration records
  std::optional<double> tx, ty;

  bool operator==(const TrajectoryRecord&) const = default;
};

std::string to_json_line(const TrajectoryRecord& record);
void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records);

// Throws InputError("line N: ...") on the first malformed line.
std::vector<TrajectoryRecord> read_trajectory(std::istream& in);

}  // namespace geodiff::drag
