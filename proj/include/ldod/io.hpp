#ifndef LDOD_IO_HPP
#define LDOD_IO_HPP

#include <filesystem>
#include <string>

#include "json.hpp"
#include "ldod/nls.hpp"
#include "ldod/search.hpp"

namespace ldod {
namespace io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Design CSV: header row of factor names, one run per row, 17
/// significant digits (write -> read round-trips bit-exactly).
void write_design_csv(const std::filesystem::path& path, const Design& design);
std::string design_csv(const Design& design);
Design read_design_csv(const std::filesystem::path& path,
                       const DesignRegion& region);

/// Data CSV: factor columns then one response column; an empty response
/// field marks a missing observation.
struct DataSet {
  std::vector<DataPoint> rows;   // valid rows only
  int dropped = 0;               // rows with missing response
  std::vector<std::string> factor_names;
};
DataSet read_data_csv(const std::filesystem::path& path, int factor_count);

/// Model spec: {"builtin": name} or
/// {"expr": source, "params": [...], "factors": [...]}.
Model model_from_json(const nlohmann::json& j);
Model model_from_file(const std::filesystem::path& path);

/// Prior: a bare array or {"values": [...]}.
PriorTheta prior_from_json(const nlohmann::json& j);
PriorTheta prior_from_file(const std::filesystem::path& path);
void write_prior_json(const std::filesystem::path& path, const Eigen::VectorXd& v);

/// Region: {"factors": [{"name","lo","hi","closest"?}, ...]}.
DesignRegion region_from_json(const nlohmann::json& j);
DesignRegion region_from_file(const std::filesystem::path& path);

nlohmann::json design_to_json(const Design& design);
nlohmann::json search_result_to_json(const SearchResult& result,
                                     const nlohmann::json& config_echo,
                                     double wall_seconds);

}  // namespace io
}  // namespace ldod

#endif
