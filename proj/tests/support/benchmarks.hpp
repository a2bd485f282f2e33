// Benchmark designs and the dataset bundled under data/benchmarks.
#ifndef LDOD_TESTS_BENCHMARKS_HPP
#define LDOD_TESTS_BENCHMARKS_HPP

#include <filesystem>
#include <string>

#include "ldod/builtins.hpp"
#include "ldod/criterion.hpp"
#include "ldod/io.hpp"

namespace bench {

inline std::filesystem::path data_dir() { return LDOD_DATA_DIR; }

inline ldod::Design reactor_design(const std::string& name) {
  return ldod::io::read_design_csv(data_dir() / "benchmarks" / name,
                                   ldod::reactor_region());
}

inline ldod::Design dextran_design(const std::string& name) {
  return ldod::io::read_design_csv(data_dir() / "benchmarks" / name,
                                   ldod::dextran_region());
}

inline double phi_reactor(const ldod::Design& d) {
  static const ldod::Model model = ldod::mechanistic_model();
  return ldod::log_det(ldod::model_matrix(model, d, ldod::reactor_prior()));
}

inline double phi_dextran(const ldod::Design& d) {
  static const ldod::Model model = ldod::hybrid_model();
  return ldod::log_det(ldod::model_matrix(model, d, ldod::dextran_prior()));
}

}  // namespace bench

#endif
