#pragma once

#include <string>

#include "ican/engine.hpp"

namespace ican {

enum class EmitFormat : std::uint8_t { Csv, Json, Svg };

EmitFormat emit_format_from_name(const std::string& name);

// CSV columns: snapshot,ue_id,scheme,num_sats,crlb_m,gdop,serving_sat,
// num_measurable,status. The procedure action log goes to <path>.actions.csv.
void emit_csv(const ResultsTable& table, const std::string& path);

// Rows plus the scenario fingerprint; loadable with load_results_json.
void emit_json(const ResultsTable& table, const std::string& path);

// Median CRLB vs snapshot, one polyline per (scheme, num_sats) series with
// legend labels "<scheme>-<n>".
void emit_svg(const ResultsTable& table, const std::string& path);

void emit(const ResultsTable& table, EmitFormat format, const std::string& path);

ResultsTable load_results_json(const std::string& path);
ResultsTable load_results_csv(const std::string& path);

// CSV serialization of the main results table as a string (used both by
// emit_csv and the byte-identity checks).
std::string results_csv_string(const ResultsTable& table);

}  // namespace ican
