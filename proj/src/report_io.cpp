#include "mapenergy/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mapenergy {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

Json to_json(const EnergyReport& r) {
    Json j;
    j["E1"] = r.E1;
    j["E2"] = r.E2;
    j["integral_Q"] = r.integral_Q;
    j["integral_sff"] = r.integral_sff;
    j["bochner_residual"] = r.bochner_residual;
    j["ric_min"] = {{"value", r.ric_min.value}, {"certificate", r.ric_min.certificate}};
    j["margin"] = r.margin;
    j["npc_certified"] = r.npc_certified;
    j["worst_sec"] = r.worst_sec;
    j["equality"] = {{"term_sec", r.equality.term_sec},
                     {"term_ric", r.equality.term_ric},
                     {"term_sff", r.equality.term_sff},
                     {"sup_sff", r.equality.sup_sff},
                     {"rank_constant", r.equality.rank_constant},
                     {"rank", r.equality.rank},
                     {"rigid", r.equality.rigid}};
    j["certificates"] = {{"E1", r.E1_cert},
                         {"E2", r.E2_cert},
                         {"residual", r.residual_cert},
                         {"margin", r.margin_cert}};
    j["equality_band"] = r.equality_band;
    j["violation_band"] = r.violation_band;
    j["residual_by_level"] = r.residual_by_level;
    j["residual_order"] = r.residual_order;
    j["resolution"] = r.resolution;
    j["levels"] = r.levels;
    return j;
}

Json to_json(const ProjectiveReport& r) {
    Json j;
    j["res_decomposition"] = r.res_decomposition;
    j["res_tension"] = r.res_tension;
    j["res_identity"] = r.res_identity;
    j["projective"] = r.projective;
    j["margin2"] = r.margin2;
    j["margin2_cert"] = r.margin2_cert;
    j["verdict"] = to_string(r.verdict);
    j["base"] = to_json(r.base);
    return j;
}

Json to_json(const FlowTrace& t) {
    Json j;
    j["termination"] = t.termination;
    j["steps"] = t.steps;
    j["rejected"] = t.rejected;
    Json samples = Json::array();
    for (const FlowSample& s : t.samples)
        samples.push_back({{"t", s.t},
                           {"E1", s.E1},
                           {"E2", s.E2},
                           {"sup_tau1", s.sup_tau1},
                           {"sup_tau2", s.sup_tau2},
                           {"margin", s.margin},
                           {"dt", s.dt}});
    j["samples"] = std::move(samples);
    return j;
}

std::string to_csv(const EnergyReport& r) {
    std::ostringstream out;
    out << "key,value\n";
    auto row = [&](const char* k, double v) { out << k << ',' << fmt17(v) << '\n'; };
    row("E1", r.E1);
    row("E2", r.E2);
    row("integral_Q", r.integral_Q);
    row("integral_sff", r.integral_sff);
    row("bochner_residual", r.bochner_residual);
    row("ric_min", r.ric_min.value);
    row("ric_min_certificate", r.ric_min.certificate);
    row("margin", r.margin);
    out << "npc_certified," << (r.npc_certified ? 1 : 0) << '\n';
    row("worst_sec", r.worst_sec);
    row("term_sec", r.equality.term_sec);
    row("term_ric", r.equality.term_ric);
    row("term_sff", r.equality.term_sff);
    row("sup_sff", r.equality.sup_sff);
    out << "rank," << r.equality.rank << '\n';
    out << "rank_constant," << (r.equality.rank_constant ? 1 : 0) << '\n';
    out << "rigid," << (r.equality.rigid ? 1 : 0) << '\n';
    row("E1_certificate", r.E1_cert);
    row("E2_certificate", r.E2_cert);
    row("residual_certificate", r.residual_cert);
    row("margin_certificate", r.margin_cert);
    row("equality_band", r.equality_band);
    row("violation_band", r.violation_band);
    row("residual_order", r.residual_order);
    return out.str();
}

std::string to_csv(const FlowTrace& t) {
    std::ostringstream out;
    out << "t,E1,E2,sup_tau1,sup_tau2,margin,dt\n";
    for (const FlowSample& s : t.samples)
        out << fmt17(s.t) << ',' << fmt17(s.E1) << ',' << fmt17(s.E2) << ',' << fmt17(s.sup_tau1)
            << ',' << fmt17(s.sup_tau2) << ',' << fmt17(s.margin) << ',' << fmt17(s.dt) << '\n';
    return out.str();
}

std::string render_svg(const std::vector<SvgSeries>& series, const std::string& title,
                       bool log_y) {
    constexpr int W = 760, H = 480;
    constexpr int ML = 70, MR = 20, MT = 40, MB = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#17becf"};

    auto yval = [&](double y) {
        return log_y ? std::log10(std::max(y, 1e-300)) : y;
    };
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const SvgSeries& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, yval(s.y[i]));
            ymax = std::max(ymax, yval(s.y[i]));
        }
    if (!(xmin < xmax)) { xmin -= 1.0; xmax += 1.0; }
    if (!(ymin < ymax)) { ymin -= 1.0; ymax += 1.0; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (yval(y) - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"16\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xt = xmin + k * (xmax - xmin) / 4;
        const double yt = ymin + k * (ymax - ymin) / 4;
        char xb[32], yb[32];
        std::snprintf(xb, sizeof xb, "%.3g", xt);
        std::snprintf(yb, sizeof yb, "%.3g", log_y ? std::pow(10.0, yt) : yt);
        out << "<text x=\"" << px(xt) << "\" y=\"" << H - MB + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << xb
            << "</text>\n";
        out << "<text x=\"" << ML - 6 << "\" y=\""
            << H - MB - k * (H - MT - MB) / 4.0 + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << yb
            << "</text>\n";
    }
    int ci = 0;
    for (const SvgSeries& s : series) {
        const char* color = palette[ci % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << px(s.x[i]) << ',' << py(s.y[i]);
        }
        out << "\"/>\n";
        out << "<text x=\"" << W - MR - 8 << "\" y=\"" << MT + 16 + 16 * ci
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
            << color << "\">" << s.label << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
    return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw ConfigError("write failed: " + path.string());
}

} // namespace mapenergy
