#include "ldod/standard_designs.hpp"

#include "ldod/builtins.hpp"

namespace ldod {

namespace {

DesignMatrix from_rows(const std::vector<std::array<double, 3>>& rows) {
  DesignMatrix m(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int k = 0; k < 3; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<std::size_t>(k)];
  return m;
}

// 24 runs: full cube once, face points twice, centre four times.
const std::vector<std::array<double, 3>> kFaceCcd1 = {
    {1.5, 1, 70}, {1.5, 1, 90}, {1.5, 2, 80}, {1.5, 2, 80}, {1.5, 4, 70},
    {1.5, 4, 90}, {3, 1, 80},   {3, 1, 80},   {3, 2, 70},   {3, 2, 70},
    {3, 2, 80},   {3, 2, 80},   {3, 2, 80},   {3, 2, 80},   {3, 2, 90},
    {3, 2, 90},   {3, 4, 80},   {3, 4, 80},   {6, 1, 70},   {6, 1, 90},
    {6, 2, 80},   {6, 2, 80},   {6, 4, 70},   {6, 4, 90}};

// Spherical CCD with radius sqrt(2) inside the cuboid region; factorial
// and axial levels as printed (four decimals).
const std::vector<std::array<double, 3>> kSphericalCcd1 = {
    {1.5, 2, 80},
    {1.5, 2, 80},
    {1.8376, 1.2251, 72.9289},
    {1.8376, 1.2251, 87.0711},
    {1.8376, 3.2651, 72.9289},
    {1.8376, 3.2651, 87.0711},
    {3, 1, 80},
    {3, 1, 80},
    {3, 2, 70},
    {3, 2, 70},
    {3, 2, 80},
    {3, 2, 80},
    {3, 2, 80},
    {3, 2, 80},
    {3, 2, 90},
    {3, 2, 90},
    {3, 4, 80},
    {3, 4, 80},
    {4.8976, 1.2251, 72.9289},
    {4.8976, 1.2251, 87.0711},
    {4.8976, 3.2651, 72.9289},
    {4.8976, 3.2651, 87.0711},
    {6, 2, 80},
    {6, 2, 80}};

// Box-Behnken design with edge midpoints replicated to reach 24 runs.
const std::vector<std::array<double, 3>> kBoxBehnken1 = {
    {1.5, 1, 80}, {1.5, 1, 80}, {1.5, 2, 70}, {1.5, 2, 90}, {1.5, 4, 80},
    {1.5, 4, 80}, {3, 1, 70},   {3, 1, 70},   {3, 1, 90},   {3, 1, 90},
    {3, 2, 80},   {3, 2, 80},   {3, 2, 80},   {3, 2, 80},   {3, 4, 70},
    {3, 4, 70},   {3, 4, 90},   {3, 4, 90},   {6, 1, 80},   {6, 1, 80},
    {6, 2, 70},   {6, 2, 90},   {6, 4, 80},   {6, 4, 80}};

// 18-run face-centred CCD actually used in the dextran experiment.
const std::vector<std::array<double, 3>> kFaceCcd2 = {
    {5, 6.25, 300},    {5, 6.25, 200},   {5, 62.5, 300},   {5, 6.25, 300},
    {5, 6.25, 300},    {5, 0.625, 300},  {2.5, 62.5, 400}, {7.5, 6.25, 300},
    {5, 6.25, 400},    {7.5, 0.625, 200}, {2.5, 0.625, 200}, {5, 6.25, 300},
    {7.5, 62.5, 400},  {2.5, 6.25, 300}, {2.5, 0.625, 400}, {7.5, 0.625, 400},
    {7.5, 62.5, 200},  {2.5, 62.5, 200}};

}  // namespace

StandardDesignKind standard_design_kind_from_string(const std::string& s) {
  if (s == "face-centred-ccd" || s == "face-centred" || s == "face_centred_ccd")
    return StandardDesignKind::face_centred_ccd;
  if (s == "spherical-ccd" || s == "spherical" || s == "spherical_ccd")
    return StandardDesignKind::spherical_ccd;
  if (s == "box-behnken" || s == "bbd" || s == "box_behnken")
    return StandardDesignKind::box_behnken;
  throw ValidationError("unknown standard design kind '" + s +
                        "' (use face-centred-ccd, spherical-ccd or box-behnken)");
}

std::string to_string(StandardDesignKind kind) {
  switch (kind) {
    case StandardDesignKind::face_centred_ccd: return "face-centred-ccd";
    case StandardDesignKind::spherical_ccd: return "spherical-ccd";
    case StandardDesignKind::box_behnken: return "box-behnken";
  }
  return "?";
}

Design standard_design(StandardDesignKind kind, int example) {
  if (example == 1) {
    switch (kind) {
      case StandardDesignKind::face_centred_ccd:
        return Design(from_rows(kFaceCcd1), reactor_region());
      case StandardDesignKind::spherical_ccd:
        return Design(from_rows(kSphericalCcd1), reactor_region());
      case StandardDesignKind::box_behnken:
        return Design(from_rows(kBoxBehnken1), reactor_region());
    }
  }
  if (example == 2 && kind == StandardDesignKind::face_centred_ccd)
    return Design(from_rows(kFaceCcd2), dextran_region());
  throw ValidationError("standard design " + to_string(kind) +
                        " is not defined for example " + std::to_string(example));
}

}  // namespace ldod
