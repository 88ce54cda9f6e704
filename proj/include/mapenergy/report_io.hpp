#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mapenergy/energy.hpp"
#include "mapenergy/flow.hpp"

namespace mapenergy {

using Json = nlohmann::ordered_json;

Json to_json(const EnergyReport& r);
Json to_json(const ProjectiveReport& r);
Json to_json(const FlowTrace& t);

/// key,value rows; doubles printed with %.17g so reruns compare byte-exact.
std::string to_csv(const EnergyReport& r);
/// one row per sample: t,E1,E2,sup_tau1,sup_tau2,margin,dt
std::string to_csv(const FlowTrace& t);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal line plot (polylines plus axes and labels), no plotting dependency.
std::string render_svg(const std::vector<SvgSeries>& series, const std::string& title,
                       bool log_y = false);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace mapenergy
