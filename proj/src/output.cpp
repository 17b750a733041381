#include "patsim/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "patsim/config_io.hpp"

namespace patsim {

namespace {

nlohmann::ordered_json number_or_null(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

void append_bool(std::string& out, bool b) { out += b ? '1' : '0'; }

}  // namespace

std::string format_float(double v) {
    if (v == 0.0) {
        return "0";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return {buf, res.ptr};
}

std::string trace_csv(std::span<const SlotRecord> trace) {
    std::string out;
    out.reserve(trace.size() * 120 + kTraceHeader.size() + 1);
    out += kTraceHeader;
    out += '\n';
    for (const auto& r : trace) {
        out += format_float(r.t);
        out += ',';
        out += to_token(r.phase);
        out += ',';
        append_bool(out, r.links.up_beacon);
        out += ',';
        append_bool(out, r.links.down_beacon);
        out += ',';
        append_bool(out, r.links.up_comm);
        out += ',';
        append_bool(out, r.links.down_comm);
        for (double v : {r.err_down_comm, r.pl_down_comm_db, r.p_rx_up_beacon_dbm, r.p_rx_down_beacon_dbm,
                         r.p_rx_up_comm_dbm, r.p_rx_down_comm_dbm}) {
            out += ',';
            out += format_float(v);
        }
        out += ',';
        out += std::to_string(r.scan_index);
        out += '\n';
    }
    return out;
}

nlohmann::ordered_json config_json(const ScenarioConfig& cfg) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (auto key : config_keys()) {
        const ConfigValue v = get_config_value(cfg, key);
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::monostate>) {
                    j[std::string(key)] = nullptr;
                } else {
                    j[std::string(key)] = x;
                }
            },
            v);
    }
    return j;
}

nlohmann::ordered_json histogram_json(const ErrorHistogram& h) {
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (int i = 0; i <= ErrorHistogram::kBins; ++i) {
        edges.push_back(ErrorHistogram::edge(i));
    }
    nlohmann::ordered_json j;
    j["edges_rad"] = std::move(edges);
    j["counts"] = h.counts();
    j["underflow"] = h.underflow();
    j["overflow"] = h.overflow();
    return j;
}

nlohmann::ordered_json run_summary_json(const ScenarioConfig& cfg, const RunMetrics& m) {
    nlohmann::ordered_json run;
    run["link_outages"] = m.link_outage_count;
    run["fine_tracking_outages"] = m.fine_tracking_outage_count;
    run["acquisition_times_s"] = m.acquisition_times;
    run["acq_time_mean_s"] = number_or_null(m.mean_acquisition_time());
    run["err_p50_rad"] = number_or_null(m.error_quantile(0.50));
    run["err_p95_rad"] = number_or_null(m.error_quantile(0.95));
    run["connected_fraction"] = m.connected_fraction;
    nlohmann::ordered_json phases;
    for (auto p : kAllPhases) {
        phases[std::string(to_token(p))] = m.phase_fraction(p);
    }
    run["phase_fractions"] = std::move(phases);
    run["slots"] = m.slots;
    run["pointing_error_histogram"] = histogram_json(m.pointing_error_histogram);

    nlohmann::ordered_json j;
    j["config"] = config_json(cfg);
    j["seeds"] = nlohmann::ordered_json::array({cfg.seed});
    j["run"] = std::move(run);

    CellSummary cell;
    cell.variant = cfg.variant;
    cell.rho = cfg.rho;
    cell.runs.push_back(summarize(cfg.seed, m));
    cell.pooled_errors = m.pointing_error_histogram;
    aggregate(cell);
    j["cells"] = nlohmann::ordered_json::array({cell_json(cell)});
    return j;
}

nlohmann::ordered_json cell_json(const CellSummary& cell) {
    nlohmann::ordered_json j;
    j["variant"] = std::string(to_token(cell.variant));
    j["rho"] = cell.rho;
    j["outages_mean"] = number_or_null(cell.outages_mean);
    j["outages_std"] = number_or_null(cell.outages_std);
    j["acq_time_mean_s"] = number_or_null(cell.acq_time_mean_s);
    j["acq_time_std_s"] = number_or_null(cell.acq_time_std_s);
    j["err_p50_rad"] = number_or_null(cell.err_p50);
    j["err_p95_rad"] = number_or_null(cell.err_p95);
    j["connected_fraction_mean"] = number_or_null(cell.connected_fraction_mean);
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& r : cell.runs) {
        nlohmann::ordered_json rj;
        rj["seed"] = r.seed;
        rj["link_outages"] = r.link_outages;
        rj["fine_tracking_outages"] = r.fine_tracking_outages;
        rj["acquisitions"] = r.acquisitions;
        rj["acq_time_mean_s"] = number_or_null(r.acq_time_mean_s);
        rj["err_p50_rad"] = number_or_null(r.err_p50);
        rj["err_p95_rad"] = number_or_null(r.err_p95);
        rj["connected_fraction"] = r.connected_fraction;
        runs.push_back(std::move(rj));
    }
    j["runs"] = std::move(runs);
    j["pointing_error_histogram"] = histogram_json(cell.pooled_errors);
    return j;
}

nlohmann::ordered_json comparison_json(const ComparisonSummary& s) {
    nlohmann::ordered_json j;
    j["config"] = config_json(s.base);
    j["seeds"] = s.seeds;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : s.cells) {
        cells.push_back(cell_json(c));
    }
    j["cells"] = std::move(cells);
    return j;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

}  // namespace patsim
