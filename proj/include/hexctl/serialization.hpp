#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "hexctl/design_optimizer.hpp"
#include "hexctl/scenario.hpp"
#include "hexctl/wrench_model.hpp"

namespace hexctl {

/// R = Rz(yaw) Ry(pitch) Rx(roll), angles in degrees.
Mat3 rotation_from_rpy_deg(double roll, double pitch, double yaw);

nlohmann::json design_to_json(const DesignConfig& cfg);
DesignConfig design_from_json(const nlohmann::json& j);

DesignConfig load_design(const std::filesystem::path& path);
void save_design(const std::filesystem::path& path, const DesignConfig& cfg);

/// Scenario JSON; "design_path" entries resolve relative to base_dir.
Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

void write_log_csv(std::ostream& os, const ScenarioLog& log);
void write_log_csv(const std::filesystem::path& path, const ScenarioLog& log);

void write_front_csv(std::ostream& os, const ParetoFront& front);
void write_front_csv(const std::filesystem::path& path, const ParetoFront& front);

nlohmann::json metrics_to_json(const Metrics& m);

/// Optimizer settings overrides for `hexctl design --config`.
OptimizerSettings optimizer_settings_from_json(const nlohmann::json& j);

}  // namespace hexctl
