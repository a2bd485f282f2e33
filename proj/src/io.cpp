#include "ldod/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ldod/builtins.hpp"
#include "ldod/expr.hpp"

namespace ldod {
namespace io {

namespace {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim spaces
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(where + ": cannot parse number '" + s + "'");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json json_from_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string design_csv(const Design& design) {
  std::ostringstream os;
  const auto names = design.region().factor_names();
  for (std::size_t k = 0; k < names.size(); ++k)
    os << (k ? "," : "") << names[k];
  os << "\n";
  for (int i = 0; i < design.runs(); ++i) {
    for (int k = 0; k < design.factors(); ++k)
      os << (k ? "," : "") << format_full(design.rows()(i, k));
    os << "\n";
  }
  return os.str();
}

void write_design_csv(const std::filesystem::path& path, const Design& design) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << design_csv(design);
}

Design read_design_csv(const std::filesystem::path& path,
                       const DesignRegion& region) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  int lineno = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      if (static_cast<int>(header.size()) != region.dim())
        throw IoError(path.string() + ":1: expected " +
                      std::to_string(region.dim()) + " factor columns, found " +
                      std::to_string(header.size()));
      for (int k = 0; k < region.dim(); ++k)
        if (header[static_cast<std::size_t>(k)] != region.factor(k).name)
          throw IoError(path.string() + ":1: column '" +
                        header[static_cast<std::size_t>(k)] +
                        "' does not match factor '" + region.factor(k).name + "'");
      continue;
    }
    if (static_cast<int>(fields.size()) != region.dim())
      throw IoError(path.string() + ":" + std::to_string(lineno) +
                    ": wrong field count");
    std::vector<double> row;
    for (const auto& f : fields)
      row.push_back(parse_double(f, path.string() + ":" + std::to_string(lineno)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no runs");
  DesignMatrix m(static_cast<Eigen::Index>(rows.size()), region.dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < region.dim(); ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  try {
    return Design(std::move(m), region);
  } catch (const ValidationError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

DataSet read_data_csv(const std::filesystem::path& path, int factor_count) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  int lineno = 0;
  DataSet ds;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != factor_count + 1)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(factor_count + 1) + " columns");
    if (ds.factor_names.empty()) {
      ds.factor_names.assign(fields.begin(), fields.end() - 1);
      continue;
    }
    if (fields.back().empty()) {
      ++ds.dropped;
      continue;
    }
    DataPoint p;
    p.point.resize(factor_count);
    for (int k = 0; k < factor_count; ++k)
      p.point[k] = parse_double(fields[static_cast<std::size_t>(k)],
                                path.string() + ":" + std::to_string(lineno));
    p.response = parse_double(fields.back(), path.string() + ":" + std::to_string(lineno));
    ds.rows.push_back(std::move(p));
  }
  if (ds.factor_names.empty()) throw IoError(path.string() + ": empty file");
  return ds;
}

Model model_from_json(const nlohmann::json& j) {
  if (j.contains("builtin")) {
    const std::string name = j.at("builtin").get<std::string>();
    if (name == "mechanistic" || name == "reactor") return mechanistic_model();
    if (name == "hybrid" || name == "dextran") return hybrid_model();
    if (name == "quadratic-reactor") return quadratic_reactor_model();
    if (name == "quadratic-dextran") return quadratic_dextran_model();
    if (name == "saturation") return appendix_models().first;
    if (name == "exp-quadratic") return appendix_models().second;
    throw IoError("unknown builtin model '" + name +
                  "' (mechanistic, hybrid, quadratic-reactor, quadratic-dextran, "
                  "saturation, exp-quadratic)");
  }
  if (j.contains("expr")) {
    try {
      return expr::make_model(j.at("expr").get<std::string>(),
                              j.at("params").get<std::vector<std::string>>(),
                              j.at("factors").get<std::vector<std::string>>());
    } catch (const expr::ParseError& e) {
      throw IoError(std::string("model expression: ") + e.what());
    }
  }
  throw IoError("model spec needs either \"builtin\" or \"expr\"");
}

Model model_from_file(const std::filesystem::path& path) {
  return model_from_json(json_from_file(path));
}

PriorTheta prior_from_json(const nlohmann::json& j) {
  const nlohmann::json& arr = j.is_array() ? j : j.at("values");
  if (!arr.is_array() || arr.empty())
    throw IoError("prior must be a non-empty array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  try {
    return PriorTheta(std::move(v));
  } catch (const std::exception& e) {
    throw IoError(std::string("prior: ") + e.what());
  }
}

PriorTheta prior_from_file(const std::filesystem::path& path) {
  return prior_from_json(json_from_file(path));
}

void write_prior_json(const std::filesystem::path& path, const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json{{"values", arr}}.dump(2) << "\n";
}

DesignRegion region_from_json(const nlohmann::json& j) {
  if (!j.contains("factors")) throw IoError("region needs a \"factors\" list");
  std::vector<Factor> factors;
  for (const auto& f : j.at("factors")) {
    Factor fac;
    fac.name = f.at("name").get<std::string>();
    fac.lo = f.at("lo").get<double>();
    fac.hi = f.at("hi").get<double>();
    if (f.contains("closest")) fac.closest_distance = f.at("closest").get<double>();
    factors.push_back(std::move(fac));
  }
  try {
    return DesignRegion(std::move(factors));
  } catch (const ValidationError& e) {
    throw IoError(std::string("region: ") + e.what());
  }
}

DesignRegion region_from_file(const std::filesystem::path& path) {
  return region_from_json(json_from_file(path));
}

nlohmann::json design_to_json(const Design& design) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < design.runs(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < design.factors(); ++k) row.push_back(design.rows()(i, k));
    rows.push_back(std::move(row));
  }
  return {{"factors", design.region().factor_names()}, {"runs", rows}};
}

nlohmann::json search_result_to_json(const SearchResult& result,
                                     const nlohmann::json& config_echo,
                                     double wall_seconds) {
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : result.traces) {
    nlohmann::json jt{{"try", t.try_index},
                      {"iterations", t.iterations},
                      {"final_phi", t.final_phi},
                      {"failed", t.failed}};
    if (t.failed) jt["failure"] = t.failure;
    jt["phi_trajectory"] = t.phi_trajectory;
    traces.push_back(std::move(jt));
  }
  return {{"best", design_to_json(result.best)},
          {"phi", result.phi},
          {"mean_iterations", result.mean_iterations()},
          {"tries", traces},
          {"config", config_echo},
          {"wall_seconds", wall_seconds}};
}

}  // namespace io
}  // namespace ldod
