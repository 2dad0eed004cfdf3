#include "ican/emit.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ican/errors.hpp"

namespace ican {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io-error", "cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("io-error", "write failure: " + path);
}

json row_to_json(const ResultRow& r) {
    json j;
    j["snapshot"] = r.snapshot;
    j["ue_id"] = r.ue_id;
    j["scheme"] = scheme_name(r.scheme);
    j["num_sats"] = r.num_sats;
    j["crlb_m"] = std::isfinite(r.crlb_m) ? json(r.crlb_m) : json(nullptr);
    j["gdop"] = std::isfinite(r.gdop) ? json(r.gdop) : json(nullptr);
    j["serving_sat"] = r.serving_sat;
    j["num_measurable"] = r.num_measurable;
    j["status"] = row_status_name(r.status);
    return j;
}

ResultRow row_from_json(const json& j) {
    ResultRow r;
    r.snapshot = j.at("snapshot").get<int>();
    r.ue_id = j.at("ue_id").get<int>();
    r.scheme = scheme_from_name(j.at("scheme").get<std::string>());
    r.num_sats = j.at("num_sats").get<int>();
    r.crlb_m = j.at("crlb_m").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                        : j.at("crlb_m").get<double>();
    r.gdop = j.at("gdop").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : j.at("gdop").get<double>();
    r.serving_sat = j.at("serving_sat").get<int>();
    r.num_measurable = j.at("num_measurable").get<int>();
    r.status = row_status_from_name(j.at("status").get<std::string>());
    return r;
}

}  // namespace

EmitFormat emit_format_from_name(const std::string& name) {
    if (name == "csv") return EmitFormat::Csv;
    if (name == "json") return EmitFormat::Json;
    if (name == "svg") return EmitFormat::Svg;
    throw Error("invalid-config", "unknown output format: " + name);
}

std::string results_csv_string(const ResultsTable& table) {
    std::ostringstream out;
    out << "snapshot,ue_id,scheme,num_sats,crlb_m,gdop,serving_sat,num_measurable,status\n";
    for (const auto& r : table.rows) {
        out << r.snapshot << ',' << r.ue_id << ',' << scheme_name(r.scheme) << ','
            << r.num_sats << ',' << fmt_double(r.crlb_m) << ',' << fmt_double(r.gdop)
            << ',' << r.serving_sat << ',' << r.num_measurable << ','
            << row_status_name(r.status) << '\n';
    }
    return out.str();
}

void emit_csv(const ResultsTable& table, const std::string& path) {
    write_file(path, results_csv_string(table));

    std::ostringstream act;
    act << "snapshot,ue_id,phase_before,phase_after,action,serving_sat\n";
    for (const auto& a : table.actions) {
        act << a.snapshot << ',' << a.ue_id << ',' << phase_name(a.phase_before) << ','
            << phase_name(a.phase_after) << ',' << action_name(a.action) << ','
            << a.serving_sat << '\n';
    }
    write_file(path + ".actions.csv", act.str());
}

void emit_json(const ResultsTable& table, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    j["fingerprint"] = {{"config_hash", table.config_hash},
                        {"tool_version", table.tool_version}};
    json rows = json::array();
    for (const auto& r : table.rows) rows.push_back(row_to_json(r));
    j["rows"] = std::move(rows);

    json links = json::array();
    for (const auto& l : table.link_summaries) {
        links.push_back({{"snapshot", l.snapshot},
                         {"ue_id", l.ue_id},
                         {"serving_sat", l.serving_sat},
                         {"serving_rsrp_dbm", std::isfinite(l.serving_rsrp_dbm)
                                                  ? json(l.serving_rsrp_dbm)
                                                  : json(nullptr)},
                         {"serving_sinr_db", std::isfinite(l.serving_sinr_db)
                                                 ? json(l.serving_sinr_db)
                                                 : json(nullptr)},
                         {"visible_sats", l.visible_sats}});
    }
    j["link_summaries"] = std::move(links);

    json acts = json::array();
    for (const auto& a : table.actions) {
        acts.push_back({{"snapshot", a.snapshot},
                        {"ue_id", a.ue_id},
                        {"phase_before", std::string(phase_name(a.phase_before))},
                        {"phase_after", std::string(phase_name(a.phase_after))},
                        {"action", std::string(action_name(a.action))},
                        {"serving_sat", a.serving_sat}});
    }
    j["actions"] = std::move(acts);
    write_file(path, j.dump(1) + "\n");
}

namespace {

const char* series_color(std::size_t i) {
    static const char* kPalette[] = {"#1f77b4", "#2ca02c", "#d62728",
                                     "#ff7f0e", "#9467bd", "#8c564b"};
    return kPalette[i % 6];
}

}  // namespace

void emit_svg(const ResultsTable& table, const std::string& path) {
    const Summary summary = summarize(table);

    const double width = 920, height = 560;
    const double ml = 80, mr = 180, mt = 40, mb = 60;
    const double pw = width - ml - mr, ph = height - mt - mb;

    int max_snap = 0;
    double ymin = std::numeric_limits<double>::infinity();
    double ymax = 0.0;
    for (const auto& s : summary.series) {
        for (const auto& p : s.per_snapshot) {
            max_snap = std::max(max_snap, p.snapshot);
            if (p.median > 0.0) {
                ymin = std::min(ymin, p.median);
                ymax = std::max(ymax, p.median);
            }
        }
    }
    if (!(ymax > 0.0)) {
        ymin = 1.0;
        ymax = 10.0;
    }
    const double ylo = std::floor(std::log10(ymin));
    const double yhi = std::ceil(std::log10(ymax * 1.0001));
    const double yspan = std::max(yhi - ylo, 1.0);

    const auto xpos = [&](int snap) {
        return ml + (max_snap > 0 ? pw * snap / max_snap : 0.0);
    };
    const auto ypos = [&](double v) {
        return mt + ph * (1.0 - (std::log10(v) - ylo) / yspan);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << "Median CRLB vs snapshot</text>\n";

    // Axes and decade gridlines.
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
        << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    for (double d = ylo; d <= yhi + 1e-9; d += 1.0) {
        const double y = mt + ph * (1.0 - (d - ylo) / yspan);
        svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">1e"
            << static_cast<int>(d) << "</text>\n";
    }
    for (int snap = 0; snap <= max_snap; snap += std::max(1, (max_snap + 1) / 10)) {
        svg << "<text x=\"" << xpos(snap) << "\" y=\"" << mt + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << snap << "</text>\n";
    }
    svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << "snapshot</text>\n";
    svg << "<text x=\"20\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
        << mt + ph / 2 << ")\" text-anchor=\"middle\">CRLB [m]</text>\n";

    for (std::size_t i = 0; i < summary.series.size(); ++i) {
        const auto& s = summary.series[i];
        std::ostringstream pts;
        for (const auto& p : s.per_snapshot) {
            if (!(p.median > 0.0)) continue;
            pts << xpos(p.snapshot) << ',' << ypos(p.median) << ' ';
        }
        svg << "<polyline fill=\"none\" stroke=\"" << series_color(i)
            << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
        const std::string label = scheme_name(s.scheme) + "-" + std::to_string(s.num_sats);
        const double ly = mt + 20 + 22 * static_cast<double>(i);
        svg << "<line x1=\"" << ml + pw + 16 << "\" y1=\"" << ly << "\" x2=\""
            << ml + pw + 44 << "\" y2=\"" << ly << "\" stroke=\"" << series_color(i)
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << ml + pw + 50 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << label << "</text>\n";
    }
    svg << "</svg>\n";
    write_file(path, svg.str());
}

void emit(const ResultsTable& table, EmitFormat format, const std::string& path) {
    switch (format) {
        case EmitFormat::Csv: emit_csv(table, path); break;
        case EmitFormat::Json: emit_json(table, path); break;
        case EmitFormat::Svg: emit_svg(table, path); break;
    }
}

ResultsTable load_results_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot open results file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("io-error", std::string("bad results JSON: ") + e.what());
    }
    ResultsTable t;
    try {
        if (j.contains("fingerprint")) {
            t.config_hash = j["fingerprint"].value("config_hash", "");
            t.tool_version = j["fingerprint"].value("tool_version", "");
        }
        for (const auto& r : j.at("rows")) t.rows.push_back(row_from_json(r));
    } catch (const json::exception& e) {
        throw Error("io-error", std::string("bad results JSON: ") + e.what());
    }
    return t;
}

ResultsTable load_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot open results file: " + path);
    ResultsTable t;
    std::string line;
    if (!std::getline(in, line)) throw Error("io-error", "empty results CSV: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 9) throw Error("io-error", "malformed results CSV row");
        ResultRow r;
        r.snapshot = std::stoi(f[0]);
        r.ue_id = std::stoi(f[1]);
        r.scheme = scheme_from_name(f[2]);
        r.num_sats = std::stoi(f[3]);
        r.crlb_m = parse_double(f[4]);
        r.gdop = parse_double(f[5]);
        r.serving_sat = std::stoi(f[6]);
        r.num_measurable = std::stoi(f[7]);
        r.status = row_status_from_name(f[8]);
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace ican
