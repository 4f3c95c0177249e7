#pragma once

#include "spherecurve/bands.hpp"
#include "spherecurve/graft.hpp"

#include <json.hpp>

#include <string>

namespace spherecurve {

using Json = nlohmann::json;

// Curve JSON: {"kappa1", "kappa2", "n", "v_hat", "w_hat", "q0", "h"}. Unbounded
// curvature is written as the strings "-inf" / "+inf"; "h" carries nonuniform
// segment durations and is omitted when the grid is uniform on [0, 1]. The raw
// form {"gamma": [[x, y, z], ...]} is also accepted on input.
Json curve_to_json(const AdmissibleCurve& c);
AdmissibleCurve curve_from_json(const Json& j);

Json bounds_to_json(const CurvatureBounds& b);
CurvatureBounds bounds_from_json(const Json& j);

Json label_to_json(const ComponentLabel& label);
Json report_to_json(const ValidationReport& r);
Json grafting_to_json(const GraftingFunction& phi);
Json graft_record_to_json(const GraftRecord& r);

// Overrides of the default tolerance profile; unknown keys raise InvalidInput.
ToleranceProfile tolerance_from_json(const Json& j, ToleranceProfile base = {});
Json tolerance_to_json(const ToleranceProfile& tol);

// Rows "k,psi,theta_plus,theta_minus" of a band profile.
std::string band_profile_csv(const AcceptableBand& band);
Json band_to_json(const AcceptableBand& band);

// Serialization with 17 significant digits.
std::string dump_json(const Json& j);

Json read_json_file(const std::string& path);

}  // namespace spherecurve
