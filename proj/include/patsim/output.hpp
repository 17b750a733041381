#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "patsim/harness.hpp"

namespace patsim {

inline constexpr std::string_view kTraceHeader =
    "t_s,phase,up_beacon,down_beacon,up_comm,down_comm,err_down_comm_rad,pl_down_comm_db,"
    "p_rx_up_beacon_dbm,p_rx_down_beacon_dbm,p_rx_up_comm_dbm,p_rx_down_comm_dbm,scan_index";

/// Shortest form with at most 9 significant digits, '.' decimal separator.
std::string format_float(double v);

std::string trace_csv(std::span<const SlotRecord> trace);

nlohmann::ordered_json config_json(const ScenarioConfig& cfg);
nlohmann::ordered_json histogram_json(const ErrorHistogram& h);

/// Summary of a single mission, laid out like a one-cell comparison.
nlohmann::ordered_json run_summary_json(const ScenarioConfig& cfg, const RunMetrics& m);
nlohmann::ordered_json cell_json(const CellSummary& cell);
nlohmann::ordered_json comparison_json(const ComparisonSummary& s);

/// Writes via a temporary sibling file and rename. Throws std::runtime_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace patsim
