#ifndef LDOD_STANDARD_DESIGNS_HPP
#define LDOD_STANDARD_DESIGNS_HPP

#include "ldod/region.hpp"

namespace ldod {

enum class StandardDesignKind { face_centred_ccd, spherical_ccd, box_behnken };

StandardDesignKind standard_design_kind_from_string(const std::string& s);
std::string to_string(StandardDesignKind kind);

/// Benchmark response-surface designs for the two case studies, with the
/// exact printed levels (spherical axial levels are stored to four
/// decimals, not recomputed). Example 1 supports all three kinds (24 runs,
/// four centre replicates); example 2 supports the face-centred CCD only
/// (18 runs). Throws ValidationError for unsupported combinations.
Design standard_design(StandardDesignKind kind, int example);

}  // namespace ldod

#endif
