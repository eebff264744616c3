#pragma once

#include <string>
#include <vector>

#include "gnormal/analysis.hpp"
#include "gnormal/forward.hpp"
#include "gnormal/montecarlo.hpp"

namespace gnormal::io {

/// Shortest decimal string that parses back to the same double; '.' decimal
/// separator regardless of locale.
std::string format_double(double v);

/// Header "x,mass,density", ascending in x.
std::string density_csv(const DensityTable& table);
/// Array of {"density", "mass", "x"} objects.
std::string density_json(const DensityTable& table);

/// Header "x,empirical_mass,empirical_density".
std::string histogram_csv(const std::vector<HistogramRow>& rows);

/// Header "N,h,error,rate"; the rate cell is empty when undefined.
std::string density_study_csv(const std::vector<RefinementRow>& rows);
/// Header "N,err_V,order_V,err_W,order_W".
std::string curvature_study_csv(const std::vector<CurvatureRow>& rows);

/// Re-serializes a JSON document in canonical form (sorted keys, two-space
/// indent, trailing newline). Applying it to its own output is the identity.
std::string canonical_json(const std::string& text);

}  // namespace gnormal::io
