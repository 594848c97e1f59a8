#pragma once

#include <string>

#include <json.hpp>

#include "core/baselines.hpp"
#include "core/calibration.hpp"
#include "core/distributions.hpp"
#include "core/threshold.hpp"

namespace gsa {

// Canonical model JSON: fixed field order, floats at 17 significant digits,
// exact round-trip. This is the deployable artifact format.
std::string model_to_json(const CalibratedModel& model);
CalibratedModel model_from_json(const std::string& text);

// %.17g with nan -> "null"
std::string format_double(double v);

nlohmann::ordered_json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j);

nlohmann::ordered_json change_to_json(const Change& c);
Change change_from_json(const nlohmann::json& j);

nlohmann::ordered_json series_spec_to_json(const SeriesSpec& s);
SeriesSpec series_spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json basis_to_json(const BasisSpec& b);
BasisSpec basis_from_json(const nlohmann::json& j);

nlohmann::ordered_json mde_to_json(const MdeSpec& m);
MdeSpec mde_from_json(const nlohmann::json& j);

nlohmann::ordered_json threshold_spec_to_json(const ThresholdSpec& t);
ThresholdSpec threshold_spec_from_json(const nlohmann::json& j);

BasisFamily basis_family_from_string(const std::string& s);
RuleKind rule_from_string(const std::string& s);
ThresholdKind threshold_kind_from_string(const std::string& s);
BaselineKind baseline_kind_from_string(const std::string& s);

}  // namespace gsa
