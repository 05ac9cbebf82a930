#pragma once

#include <optional>
#include <string>

#include "implosion/monitor.hpp"
#include "implosion/profile.hpp"
#include "json.hpp"

namespace implosion {

struct RunConfig {
    std::string gamma_text;
    double gamma = 0;
    int n = 0;
    int order = 30;
    double ymax = 1e3;
    double rel_tol = 1e-10;
    std::string out_profile = "profile.csv";
    std::string out_report = "report.json";
    bool force = false;
};

nlohmann::json config_json(const RunConfig& config, const Controls& controls);

// Handoff and integration are absent when the report comes from a stored profile.
nlohmann::json report_json(const VerificationReport& report, const nlohmann::json& config,
                           const std::optional<ProfileResult>& run);

}  // namespace implosion
