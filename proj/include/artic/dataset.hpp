#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "artic/common.hpp"
#include "artic/types.hpp"

namespace artic {

/// One named measurement channel at its native sampling.
struct Channel {
    std::vector<double> t;
    std::vector<double> values;

    std::size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }

    double native_rate() const {
        if (t.size() < 2) throw invalid_parameter_error("Channel: need at least 2 samples for a rate");
        return (static_cast<double>(t.size()) - 1.0) / (t.back() - t.front());
    }

    void validate(const std::string& name) const {
        if (t.size() != values.size())
            throw invalid_parameter_error("Channel " + name + ": time/value length mismatch");
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (!std::isfinite(t[i]) || !std::isfinite(values[i]))
                throw invalid_parameter_error("Channel " + name + ": non-finite entry at index " +
                                              std::to_string(i));
            if (i > 0 && !(t[i] > t[i - 1]))
                throw invalid_parameter_error("Channel " + name +
                                              ": time stamps not strictly increasing at index " +
                                              std::to_string(i));
        }
    }

    /// Linear interpolation inside the channel span; exact at grid points.
    double interpolate(double time) const {
        if (empty()) throw invalid_parameter_error("Channel: empty");
        const double tol = 1e-9;
        if (time < t.front() - tol || time > t.back() + tol)
            throw invalid_parameter_error("Channel: interpolation outside span");
        time = std::clamp(time, t.front(), t.back());
        auto it = std::upper_bound(t.begin(), t.end(), time);
        if (it == t.begin()) return values.front();
        if (it == t.end()) return values.back();
        const auto hi = static_cast<std::size_t>(it - t.begin());
        const std::size_t lo = hi - 1;
        if (std::abs(t[lo] - time) < tol) return values[lo];
        if (std::abs(t[hi] - time) < tol) return values[hi];
        const double w = (time - t[lo]) / (t[hi] - t[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
    }
};

/// Linear resampling onto a uniform grid covering the channel span.
/// No extrapolation: the grid never leaves [t_front, t_back].
inline Channel resample(const Channel& ch, double target_rate) {
    if (ch.empty()) throw invalid_parameter_error("resample: empty channel");
    if (ch.size() >= 2) {
        const double native = ch.native_rate();
        if (!(target_rate >= 1.0) || !(target_rate <= native * 10.0))
            throw invalid_parameter_error("resample: target rate must lie in [1, 10x native]");
    }
    Channel out;
    const double t0 = ch.t.front();
    const double span = ch.t.back() - t0;
    const auto n = static_cast<std::size_t>(std::floor(span * target_rate + 1e-9)) + 1;
    out.t.reserve(n);
    out.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double time = t0 + static_cast<double>(i) / target_rate;
        out.t.push_back(time);
        out.values.push_back(ch.interpolate(time));
    }
    return out;
}

/// Named multi-rate channels plus free-form metadata. The contract for
/// identification and validation requires the three input channels and the
/// twelve output channels by canonical name.
struct MeasurementDataset {
    std::map<std::string, Channel> channels;
    nlohmann::json metadata;

    bool has(const std::string& name) const { return channels.count(name) > 0; }

    const Channel& channel(const std::string& name) const {
        auto it = channels.find(name);
        if (it == channels.end())
            throw invalid_parameter_error("dataset: missing channel '" + name + "'");
        return it->second;
    }

    void add(const std::string& name, Channel ch) {
        ch.validate(name);
        channels[name] = std::move(ch);
    }

    void require_identification_channels() const {
        for (const auto& name : input_channel_names()) channel(name);
        for (const auto& name : OutputVector::names()) channel(name);
    }

    /// True when every channel shares one identical time grid.
    bool uniform_grid() const {
        if (channels.empty()) return true;
        const auto& ref = channels.begin()->second.t;
        for (const auto& [name, ch] : channels) {
            if (ch.t.size() != ref.size()) return false;
            for (std::size_t i = 0; i < ref.size(); ++i) {
                if (ch.t[i] != ref[i]) return false;
            }
        }
        return true;
    }

    /// Overlapping time span of all channels.
    std::pair<double, double> common_span() const {
        if (channels.empty()) throw invalid_parameter_error("dataset: no channels");
        double t0 = -std::numeric_limits<double>::infinity();
        double t1 = std::numeric_limits<double>::infinity();
        for (const auto& [name, ch] : channels) {
            if (ch.empty()) throw invalid_parameter_error("dataset: channel '" + name + "' empty");
            t0 = std::max(t0, ch.t.front());
            t1 = std::min(t1, ch.t.back());
        }
        if (!(t1 > t0)) throw invalid_parameter_error("dataset: channels do not overlap in time");
        return {t0, t1};
    }

    /// All channels linearly interpolated onto one uniform grid at `rate`
    /// over the overlapping span.
    MeasurementDataset resampled(double rate) const {
        const auto [t0, t1] = common_span();
        const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9)) + 1;
        MeasurementDataset out;
        out.metadata = metadata;
        for (const auto& [name, ch] : channels) {
            Channel resampled_ch;
            resampled_ch.t.reserve(n);
            resampled_ch.values.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double time = t0 + static_cast<double>(i) / rate;
                resampled_ch.t.push_back(time);
                resampled_ch.values.push_back(ch.interpolate(time));
            }
            out.channels[name] = std::move(resampled_ch);
        }
        return out;
    }

    /// Input trajectory from the delta/v_x2/a_x2 channels, built on the
    /// steer channel's grid (the other two interpolated where needed).
    InputTrajectory input_trajectory() const {
        const Channel& delta = channel("delta");
        const Channel& v = channel("v_x2");
        const Channel& a = channel("a_x2");
        std::vector<InputSample> samples;
        samples.reserve(delta.size());
        const double t0 = std::max({delta.t.front(), v.t.front(), a.t.front()});
        const double t1 = std::min({delta.t.back(), v.t.back(), a.t.back()});
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double time = delta.t[i];
            if (time < t0 || time > t1) continue;
            samples.push_back({time, delta.values[i], v.interpolate(time), a.interpolate(time)});
        }
        return InputTrajectory(std::move(samples));
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double(const std::string& text, std::size_t line_no, const std::string& path) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw parse_error(path + ":" + std::to_string(line_no) + ": malformed number '" + text + "'");
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Loads the wide (single-grid) or long (multi-rate) CSV dataset format;
/// a sidecar <path>.meta.json is picked up when present.
inline MeasurementDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open dataset file '" + path.string() + "'");
    const std::string path_str = path.string();

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw parse_error(path_str + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = detail::split_csv_line(line);

    MeasurementDataset ds;
    if (header.size() >= 2 && header[0] == "t") {
        // Wide format: one shared grid.
        std::vector<Channel> cols(header.size() - 1);
        std::vector<double> grid;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const std::vector<std::string> fields = detail::split_csv_line(line);
            if (fields.size() != header.size())
                throw parse_error(path_str + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
            const double time = detail::parse_double(fields[0], line_no, path_str);
            if (!grid.empty() && !(time > grid.back()))
                throw parse_error(path_str + ":" + std::to_string(line_no) +
                                  ": time stamps not strictly increasing");
            grid.push_back(time);
            for (std::size_t c = 0; c < cols.size(); ++c)
                cols[c].values.push_back(detail::parse_double(fields[c + 1], line_no, path_str));
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            cols[c].t = grid;
            ds.add(header[c + 1], std::move(cols[c]));
        }
    } else if (header.size() == 3 && header[0] == "channel" && header[1] == "t" &&
               header[2] == "value") {
        // Long format: channel,t,value rows, mixed rates allowed.
        std::map<std::string, std::size_t> last_line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const std::vector<std::string> fields = detail::split_csv_line(line);
            if (fields.size() != 3)
                throw parse_error(path_str + ":" + std::to_string(line_no) + ": expected 3 fields");
            Channel& ch = ds.channels[fields[0]];
            const double time = detail::parse_double(fields[1], line_no, path_str);
            if (!ch.t.empty() && !(time > ch.t.back()))
                throw parse_error(path_str + ":" + std::to_string(line_no) + ": channel '" +
                                  fields[0] + "' time stamps not strictly increasing");
            ch.t.push_back(time);
            ch.values.push_back(detail::parse_double(fields[2], line_no, path_str));
            last_line[fields[0]] = line_no;
        }
        for (auto& [name, ch] : ds.channels) ch.validate(name);
    } else {
        throw parse_error(path_str + ":1: unrecognized header (expected wide 't,...' or long "
                          "'channel,t,value')");
    }

    const std::filesystem::path meta_path = path.string() + ".meta.json";
    if (std::filesystem::exists(meta_path)) {
        std::ifstream meta_in(meta_path);
        ds.metadata = nlohmann::json::parse(meta_in, nullptr, true, true);
    }
    return ds;
}

/// Writes the wide format when all channels share one grid, the long format
/// otherwise. Metadata goes to a <path>.meta.json sidecar.
inline void save_dataset(const MeasurementDataset& ds, const std::filesystem::path& path) {
    if (ds.channels.empty()) throw invalid_parameter_error("save_dataset: no channels");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw parse_error("cannot open '" + path.string() + "' for writing");

    // Canonical column order first, extras alphabetically after.
    std::vector<std::string> order;
    for (const auto& name : input_channel_names())
        if (ds.has(name)) order.push_back(name);
    for (const auto& name : OutputVector::names())
        if (ds.has(name)) order.push_back(name);
    for (const auto& [name, ch] : ds.channels)
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);

    if (ds.uniform_grid()) {
        out << "t";
        for (const auto& name : order) out << "," << name;
        out << "\n";
        const auto& grid = ds.channels.begin()->second.t;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << detail::format_double(grid[i]);
            for (const auto& name : order)
                out << "," << detail::format_double(ds.channel(name).values[i]);
            out << "\n";
        }
    } else {
        out << "channel,t,value\n";
        for (const auto& name : order) {
            const Channel& ch = ds.channel(name);
            for (std::size_t i = 0; i < ch.size(); ++i)
                out << name << "," << detail::format_double(ch.t[i]) << ","
                    << detail::format_double(ch.values[i]) << "\n";
        }
    }
    out.flush();
    if (!out) throw parse_error("failed writing '" + path.string() + "'");

    if (!ds.metadata.is_null()) {
        std::ofstream meta(path.string() + ".meta.json", std::ios::trunc);
        meta << ds.metadata.dump(2) << "\n";
    }
}

}  // namespace artic
