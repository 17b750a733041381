#include "patsim/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace patsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "'");
    }
    return value;
}

struct KeyDef {
    std::string_view name;
    std::function<void(ScenarioConfig&, std::string_view key, std::string_view)> set;
    std::function<ConfigValue(const ScenarioConfig&)> get;
};

KeyDef real(std::string_view name, double ScenarioConfig::*field) {
    return {name, [field](ScenarioConfig& c, std::string_view k, std::string_view v) {
                c.*field = parse_number<double>(k, v);
            },
            [field](const ScenarioConfig& c) -> ConfigValue { return c.*field; }};
}

template <typename Sub>
KeyDef real(std::string_view name, Sub ScenarioConfig::*sub, double Sub::*field) {
    return {name, [sub, field](ScenarioConfig& c, std::string_view k, std::string_view v) {
                c.*sub.*field = parse_number<double>(k, v);
            },
            [sub, field](const ScenarioConfig& c) -> ConfigValue { return c.*sub.*field; }};
}

const std::vector<KeyDef>& key_table() {
    using C = ScenarioConfig;
    using devices::CcrArraySpec;
    using devices::FpaSpec;
    using devices::FsmSpec;
    using devices::GimbalSpec;
    using devices::PositioningSpec;
    using devices::QuadcellSpec;
    static const std::vector<KeyDef> table = [] {
        std::vector<KeyDef> t;
        t.push_back(real("link_distance_km", &C::link_distance_km));
        t.push_back(real("gnss_sigma_m", &C::positioning, &PositioningSpec::gnss_sigma_m));
        t.push_back(real("aoa_sigma_rad", &C::positioning, &PositioningSpec::aoa_sigma));

        t.push_back(real("quadcell_fov_rad", &C::quadcell, &QuadcellSpec::fov));
        t.push_back(real("quadcell_nea_coeff_rad", &C::quadcell, &QuadcellSpec::nea_coeff));
        t.push_back(real("quadcell_spot_radius_rad", &C::quadcell, &QuadcellSpec::spot_radius));
        t.push_back(real("quadcell_threshold_dbm", &C::quadcell, &QuadcellSpec::power_threshold_dbm));
        t.push_back(real("fpa_fov_rad", &C::fpa, &FpaSpec::fov));
        t.push_back(real("fpa_nea_coeff_rad", &C::fpa, &FpaSpec::nea_coeff));
        t.push_back(real("fpa_threshold_dbm", &C::fpa, &FpaSpec::power_threshold_dbm));
        t.push_back(real("clcp_rate_hz", &C::clcp_rate_hz));
        t.push_back(real("gimbal_open_loop_sigma_rad", &C::gimbal, &GimbalSpec::open_loop_sigma));
        t.push_back(real("gimbal_closed_loop_sigma_rad", &C::gimbal, &GimbalSpec::closed_loop_sigma));
        t.push_back(real("fsm_residual_sigma_rad", &C::fsm, &FsmSpec::residual_sigma));
        t.push_back(real("fsm_range_rad", &C::fsm, &FsmSpec::range));

        t.push_back(real("visibility_km", &C::atmosphere, &channel::AtmosphereSpec::visibility_km));
        t.push_back(real("beam_wander_sigma_rad", &C::atmosphere, &channel::AtmosphereSpec::beam_wander_sigma));
        t.push_back(real("gg_alpha", &C::turbulence, &channel::TurbulenceParams::alpha));
        t.push_back(real("gg_beta", &C::turbulence, &channel::TurbulenceParams::beta));
        t.push_back({"rytov_variance",
                     [](C& c, std::string_view k, std::string_view v) {
                         if (v == "none") {
                             c.rytov_variance.reset();
                         } else {
                             c.rytov_variance = parse_number<double>(k, v);
                         }
                     },
                     [](const C& c) -> ConfigValue {
                         if (c.rytov_variance) {
                             return *c.rytov_variance;
                         }
                         return std::monostate{};
                     }});
        t.push_back({"wavelength_nm",
                     [](C& c, std::string_view k, std::string_view v) {
                         const double nm = parse_number<double>(k, v);
                         c.comm_beam.wavelength_nm = nm;
                         c.beacon_beam.wavelength_nm = nm;
                     },
                     [](const C& c) -> ConfigValue { return c.comm_beam.wavelength_nm; }});
        t.push_back(real("comm_divergence_rad", &C::comm_beam, &channel::BeamSpec::divergence_full));
        t.push_back(real("beacon_divergence_rad", &C::beacon_beam, &channel::BeamSpec::divergence_full));
        t.push_back(real("comm_tx_power_dbm", &C::comm_beam, &channel::BeamSpec::tx_power_dbm));
        t.push_back(real("beacon_tx_power_dbm", &C::beacon_beam, &channel::BeamSpec::tx_power_dbm));
        t.push_back(real("gateway_aperture_m", &C::gateway_aperture_m));
        t.push_back(real("aircraft_aperture_m", &C::aircraft_aperture_m));
        t.push_back(real("comm_threshold_dbm", &C::comm_threshold_dbm));
        t.push_back(real("rho", &C::rho));
        t.push_back({"ccr_count",
                     [](C& c, std::string_view k, std::string_view v) { c.ccr.count = parse_number<int>(k, v); },
                     [](const C& c) -> ConfigValue { return static_cast<long long>(c.ccr.count); }});
        t.push_back(real("ccr_ring_radius_m", &C::ccr, &CcrArraySpec::ring_radius_m));
        t.push_back(real("ccr_gain_db", &C::ccr, &CcrArraySpec::per_ccr_gain_db));

        static std::deque<std::string> names;  // owns the generated key names
        for (auto [prefix, member] : {std::pair{"disturbance_", &C::aircraft_disturbance},
                                      std::pair{"gateway_disturbance_", &C::gateway_disturbance}}) {
            auto add = [&](const char* suffix, double DisturbanceSpec::*field) {
                names.push_back(std::string(prefix) + suffix);
                t.push_back(real(names.back(), member, field));
            };
            add("gm_sigma_rad", &DisturbanceSpec::gm_sigma);
            add("gm_tau_s", &DisturbanceSpec::gm_tau);
            add("jump_rate_hz", &DisturbanceSpec::jump_rate);
            add("jump_min_rad", &DisturbanceSpec::jump_min);
            add("jump_max_rad", &DisturbanceSpec::jump_max);
        }

        t.push_back(real("scan_overlap", &C::scan_overlap));
        t.push_back({"max_scan_repeats",
                     [](C& c, std::string_view k, std::string_view v) {
                         c.max_scan_repeats = parse_number<int>(k, v);
                     },
                     [](const C& c) -> ConfigValue { return static_cast<long long>(c.max_scan_repeats); }});
        t.push_back({"variant",
                     [](C& c, std::string_view k, std::string_view v) {
                         const auto parsed = variant_from_token(v);
                         if (!parsed) {
                             throw ConfigError(std::string(k), "unknown variant '" + std::string(v) + "'");
                         }
                         c.variant = *parsed;
                     },
                     [](const C& c) -> ConfigValue { return std::string(to_token(c.variant)); }});
        t.push_back(real("mission_duration_s", &C::mission_duration_s));
        t.push_back(real("slot_dt_s", &C::slot_dt_s));
        t.push_back({"seed",
                     [](C& c, std::string_view k, std::string_view v) {
                         c.seed = parse_number<std::uint64_t>(k, v);
                     },
                     [](const C& c) -> ConfigValue { return c.seed; }});
        return t;
    }();
    return table;
}

const KeyDef& find_key(std::string_view key) {
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) { return d.name == key; });
    if (it == table.end()) {
        throw ConfigError(std::string(key), "unknown key");
    }
    return *it;
}

std::string format_value(const ConfigValue& v) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "none"; }
        std::string operator()(double d) const {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            return buf;
        }
        std::string operator()(long long i) const { return std::to_string(i); }
        std::string operator()(std::uint64_t u) const { return std::to_string(u); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> k;
        for (const auto& d : key_table()) {
            k.push_back(d.name);
        }
        return k;
    }();
    return keys;
}

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
    find_key(key).set(cfg, key, value);
}

ConfigValue get_config_value(const ScenarioConfig& cfg, std::string_view key) { return find_key(key).get(cfg); }

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!seen.emplace(key).second) {
            throw ConfigError(std::string(key), "duplicate key on line " + std::to_string(line_no));
        }
        set_config_value(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot read config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string echo_config(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& d : key_table()) {
        const ConfigValue v = d.get(cfg);
        if (std::holds_alternative<std::monostate>(v)) {
            continue;
        }
        out += d.name;
        out += " = ";
        out += format_value(v);
        out += '\n';
    }
    return out;
}

}  // namespace patsim
