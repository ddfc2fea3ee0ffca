#ifndef DBAR_CSV_HPP
#define DBAR_CSV_HPP

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace dbar {

/// Full-precision decimal rendering (17 significant digits) so repeated
/// runs produce byte-identical files.
std::string format_g17(double v);

/// Line-oriented CSV writer with '\n' endings and no locale surprises.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void comment(const std::string& text);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);

  static std::string num(double v) { return format_g17(v); }
  static std::string num(int64_t v) { return std::to_string(v); }

 private:
  std::ofstream out_;
};

}  // namespace dbar

#endif  // DBAR_CSV_HPP
