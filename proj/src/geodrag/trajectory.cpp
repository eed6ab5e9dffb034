#include "geodiff/geodrag/trajectory.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "geodiff/error.hpp"

namespace geodiff::drag {
namespace {

using ojson = nlohmann::ordered_json;

template <typename T>
ojson opt(const std::optional<T>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::optional<double> read_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw InputError(std::string("field '") + key + "' must be a number or null");
  return j[key].get<double>();
}

int read_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw InputError(std::string("field '") + key + "' must be an integer");
  return j[key].get<int>();
}

bool known_event(const std::string& e) {
  return e.empty() || e == "enter_I" || e == "exit_I" || e == "copy_paste" || e == "denoise";
}

}  // namespace

std::string to_json_line(const TrajectoryRecord& r) {
  ojson j;
  j["timestep"] = r.timestep;
  j["iteration"] = r.iteration;
  j["point_id"] = r.point_id;
  j["x"] = opt(r.x);
  j["y"] = opt(r.y);
  j["e"] = opt(r.e);
  j["fixated"] = opt(r.fixated);
  j["loss"] = opt(r.loss);
  j["event"] = r.event.empty() ? ojson(nullptr) : ojson(r.event);
  j["tx"] = opt(r.tx);
  j["ty"] = opt(r.ty);
  return j.dump();
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<TrajectoryRecord> read_trajectory(std::istream& in) {
  std::vector<TrajectoryRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw InputError("record is not an object");
      TrajectoryRecord r;
      r.timestep = read_int(j, "timestep");
      r.iteration = read_int(j, "iteration");
      r.point_id = read_int(j, "point_id");
      r.x = read_number(j, "x");
      r.y = read_number(j, "y");
      r.e = read_number(j, "e");
      if (j.contains("fixated") && !j["fixated"].is_null()) {
        if (!j["fixated"].is_boolean()) throw InputError("field 'fixated' must be a boolean or null");
        r.fixated = j["fixated"].get<bool>();
      }
      r.loss = read_number(j, "loss");
      if (j.contains("event") && !j["event"].is_null()) {
        if (!j["event"].is_string()) throw InputError("field 'event' must be a string or null");
        r.event = j["event"].get<std::string>();
      }
      if (!known_event(r.event)) throw InputError("unknown event '" + r.event + "'");
      r.tx = read_number(j, "tx");
      r.ty = read_number(j, "ty");
      if (r.point_id >= 0 && r.event != "denoise" && (!r.x || !r.y)) {
        throw InputError("point record without x/y");
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace geodiff::drag
