#ifndef IPSDUAL_REPORT_HPP
#define IPSDUAL_REPORT_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace ipsdual {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "# ipsdual-csv v1";

// Flat key = value run description; embedded verbatim into every report so a
// run can be reproduced from its own output.
struct RunSpec {
  std::string command;
  std::vector<std::pair<std::string, std::string>> fields;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
};

class CsvReport {
 public:
  CsvReport(const std::string& path, const RunSpec& spec,
            const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

  static std::string format(double v);

 private:
  std::string path_;
  std::ofstream out_;
};

// Default output directory: $IPSDUAL_OUT or "." when unset.
std::string default_output_dir();

}  // namespace ipsdual

#endif  // IPSDUAL_REPORT_HPP
