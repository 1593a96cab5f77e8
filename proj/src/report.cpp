#include "ipsdual/report.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace ipsdual {

void RunSpec::set(const std::string& key, const std::string& value) {
  fields.emplace_back(key, value);
}

void RunSpec::set(const std::string& key, double value) {
  set(key, CsvReport::format(value));
}

void RunSpec::set(const std::string& key, long long value) {
  set(key, std::to_string(value));
}

CsvReport::CsvReport(const std::string& path, const RunSpec& spec,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open report file: " + path);
  out_ << kCsvSchema << "\n";
  out_ << "# library = ipsdual " << kLibraryVersion << "\n";
  out_ << "# command = " << spec.command << "\n";
  for (const auto& [k, v] : spec.fields) out_ << "# " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

void CsvReport::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
  out_.flush();
}

std::string CsvReport::format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string default_output_dir() {
  const char* env = std::getenv("IPSDUAL_OUT");
  return env && *env ? env : ".";
}

}  // namespace ipsdual
