#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "geodyn/integrators.hpp"
#include "geodyn/relativistic.hpp"

namespace geodyn {

namespace exit_code {
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
}  // namespace exit_code

// Runs the geodyn command line; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

inline constexpr const char* kKeplerCsvHeader = "step,t,x1,x2,v1,v2,H,m,A1,A2,ecc,angle";
inline constexpr const char* kRelativisticCsvHeader = "step,tau,t,x1,x2,gamma,u1,u2,H";

void write_kepler_csv(const TrajectoryRecord& rec, std::ostream& out);
void write_relativistic_csv(const std::vector<ExtSample>& samples, std::ostream& out);

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct SvgOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

// Standalone 800x600 line plot. Points that cannot be shown on a log axis
// are dropped; every series needs at least two drawable points.
std::string render_svg(const std::vector<Series>& series, const SvgOptions& opt);
void emit_svg(const std::vector<Series>& series, const std::string& path, const SvgOptions& opt);

}  // namespace geodyn
