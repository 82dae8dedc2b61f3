#ifndef EIGENSPOT_IO_HPP
#define EIGENSPOT_IO_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eigenspot/detector.hpp"
#include "eigenspot/errors.hpp"
#include "eigenspot/evaluation.hpp"
#include "eigenspot/matrix.hpp"
#include "eigenspot/simulator.hpp"

namespace eigenspot {

enum class MatrixFileFormat { wide_csv, long_csv };

namespace io {

/// Canonical number formatting: shortest representation that round-trips
/// (never more than 17 significant digits).
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_count(std::string_view field, const std::string& where) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(where + ": cannot parse count '" + std::string(field) + "'");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ParseError(where + ": count '" + std::string(field) + "' is negative or not finite");
    }
    return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Wide format: header row of period labels (first field is a corner label),
/// one row per region with the region label first.
inline CountMatrix parse_wide_csv(std::istream& in) {
    const auto lines = read_lines(in);
    if (lines.size() < 2) throw ParseError("wide CSV needs a header and at least one data row");
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2) throw ParseError("wide CSV header needs at least one period column");
    std::vector<std::string> period_labels(header.begin() + 1, header.end());
    const std::size_t m = period_labels.size();

    std::vector<std::string> region_labels;
    std::vector<double> values;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != m + 1) {
            throw ParseError("row " + std::to_string(r + 1) + ": expected " +
                             std::to_string(m + 1) + " fields, found " +
                             std::to_string(fields.size()));
        }
        region_labels.push_back(fields[0]);
        for (std::size_t j = 0; j < m; ++j) {
            values.push_back(parse_count(
                fields[j + 1], "row " + std::to_string(r + 1) + " column " + std::to_string(j + 2)));
        }
    }
    if (region_labels.empty()) throw ParseError("wide CSV has no data rows");
    const std::size_t n = region_labels.size();
    return CountMatrix(n, m, std::move(values), std::move(region_labels),
                       std::move(period_labels));
}

/// Long format: region,period,count triples in any row order. The full
/// region x period grid must be covered exactly once; missing cells are an
/// error unless `fill_missing_zero`. Label order follows first appearance.
inline CountMatrix parse_long_csv(std::istream& in, bool fill_missing_zero = false) {
    const auto lines = read_lines(in);
    if (lines.size() < 2) throw ParseError("long CSV needs a header and at least one data row");
    {
        const auto header = split_csv_line(lines[0]);
        if (header.size() != 3 || lower(header[0]) != "region" || lower(header[1]) != "period" ||
            lower(header[2]) != "count") {
            throw ParseError("long CSV header must be region,period,count");
        }
    }

    std::vector<std::string> region_labels, period_labels;
    std::map<std::string, std::size_t> region_index, period_index;
    struct Entry {
        double value;
        std::size_t line_no;
    };
    std::map<std::pair<std::size_t, std::size_t>, Entry> entries;

    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != 3) {
            throw ParseError("row " + std::to_string(r + 1) + ": expected 3 fields, found " +
                             std::to_string(fields.size()));
        }
        auto [rit, rnew] = region_index.try_emplace(fields[0], region_labels.size());
        if (rnew) region_labels.push_back(fields[0]);
        auto [pit, pnew] = period_index.try_emplace(fields[1], period_labels.size());
        if (pnew) period_labels.push_back(fields[1]);
        const double v = parse_count(fields[2], "row " + std::to_string(r + 1));
        const auto key = std::make_pair(rit->second, pit->second);
        const auto [eit, fresh] = entries.try_emplace(key, Entry{v, r + 1});
        if (!fresh) {
            throw ParseError("duplicate cell (" + fields[0] + "," + fields[1] + ") at row " +
                             std::to_string(r + 1) + " (first seen at row " +
                             std::to_string(eit->second.line_no) + ")");
        }
    }
    if (entries.empty()) throw ParseError("long CSV has no data rows");

    const std::size_t n = region_labels.size(), m = period_labels.size();
    std::vector<double> values(n * m, 0.0);
    if (!fill_missing_zero && entries.size() != n * m) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (!entries.count({i, j})) {
                    throw ParseError("missing cell (" + region_labels[i] + "," +
                                     period_labels[j] +
                                     "); pass --fill-missing-zero to default absent cells to 0");
                }
            }
        }
    }
    for (const auto& [key, e] : entries) values[key.first * m + key.second] = e.value;
    return CountMatrix(n, m, std::move(values), std::move(region_labels),
                       std::move(period_labels));
}

inline MatrixFileFormat sniff_format(std::istream& in) {
    std::string first_line;
    std::getline(in, first_line);
    in.clear();
    in.seekg(0);
    if (!first_line.empty() && first_line.back() == '\r') first_line.pop_back();
    const auto fields = split_csv_line(first_line);
    if (fields.size() == 3 && lower(fields[0]) == "region" && lower(fields[1]) == "period" &&
        lower(fields[2]) == "count") {
        return MatrixFileFormat::long_csv;
    }
    return MatrixFileFormat::wide_csv;
}

inline CountMatrix read_matrix_csv(const std::filesystem::path& path,
                                   bool fill_missing_zero = false) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        if (sniff_format(in) == MatrixFileFormat::long_csv) {
            return parse_long_csv(in, fill_missing_zero);
        }
        return parse_wide_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline void write_wide_csv(std::ostream& out, const CountMatrix& mat) {
    out << "region";
    for (std::size_t j = 0; j < mat.n_periods(); ++j) out << ',' << mat.period_label(j);
    out << '\n';
    for (std::size_t i = 0; i < mat.n_regions(); ++i) {
        out << mat.region_label(i);
        for (std::size_t j = 0; j < mat.n_periods(); ++j) out << ',' << format_double(mat(i, j));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// provenance digests
// ---------------------------------------------------------------------------

/// FNV-1a 64-bit over raw bytes; provenance marker, not a security feature.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string digest_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string() + " for digest");
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return std::string("fnv1a64:") + hex;
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json chart_to_json(const ControlChartResult& c) {
    json j;
    j["deviations"] = c.deviations;
    j["z_scores"] = c.z_scores;
    j["p_values"] = c.p_values;
    j["degenerate"] = c.degenerate;
    return j;
}

/// ReportFile document; labels come from the parsed baseline matrix.
inline json report_to_json(const HotspotReport& r, const CountMatrix& labels,
                           const std::string& baseline_digest, const std::string& cases_digest) {
    json j;
    j["method"] = to_string(r.method);
    j["alpha"] = r.alpha;
    j["tail"] = to_string(r.tail);
    j["matrix_shape"] = {{"n_regions", r.n_regions}, {"n_periods", r.n_periods}};
    j["input_digests"] = {{"baseline", baseline_digest}, {"cases", cases_digest}};

    json spatial = json::array();
    for (std::size_t i : r.spatial_components) {
        json e;
        e["index"] = i;
        e["label"] = labels.region_label(i);
        if (r.spatial_chart) e["p_value"] = r.spatial_chart->p_values[i];
        spatial.push_back(std::move(e));
    }
    j["spatial_components"] = std::move(spatial);

    json temporal = json::array();
    for (std::size_t k : r.temporal_components) {
        json e;
        e["index"] = k;
        e["label"] = labels.period_label(k);
        if (r.temporal_chart) e["p_value"] = r.temporal_chart->p_values[k];
        temporal.push_back(std::move(e));
    }
    j["temporal_components"] = std::move(temporal);

    json cells = json::array();
    for (const auto& cell : r.cells) {
        json e;
        e["region"] = labels.region_label(cell.first);
        e["period"] = labels.period_label(cell.second);
        e["region_index"] = cell.first;
        e["period_index"] = cell.second;
        e["score"] = r.cell_scores.at(cell);
        cells.push_back(std::move(e));
    }
    j["cells"] = std::move(cells);

    json diag;
    if (r.method == Method::eigenspot) {
        diag["spatial"] = chart_to_json(*r.spatial_chart);
        diag["temporal"] = chart_to_json(*r.temporal_chart);
    } else {
        json grid = json::array();
        for (std::size_t i = 0; i < r.n_regions; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < r.n_periods; ++k) {
                row.push_back(r.cell_p_values[i * r.n_periods + k]);
            }
            grid.push_back(std::move(row));
        }
        diag["cell_p_values"] = std::move(grid);
    }
    j["diagnostics"] = std::move(diag);
    return j;
}

inline void write_report_csv(std::ostream& out, const HotspotReport& r,
                             const CountMatrix& labels) {
    out << "region,period,region_index,period_index,score\n";
    for (const auto& cell : r.cells) {
        out << labels.region_label(cell.first) << ',' << labels.period_label(cell.second) << ','
            << cell.first << ',' << cell.second << ',' << format_double(r.cell_scores.at(cell))
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// simulator dataset sidecar
// ---------------------------------------------------------------------------

inline json dataset_meta_json(const SimulatedDataset& ds) {
    const auto& c = ds.config_echo;
    json j;
    j["config"] = {{"n_regions", c.n_regions},
                   {"n_periods", c.n_periods},
                   {"growth_rate", c.growth_rate},
                   {"hotspot_size", c.hotspot_size},
                   {"hotspot_impact", c.hotspot_impact},
                   {"seed", c.seed},
                   {"per_region_lambda", c.per_region_lambda},
                   {"baseline_source",
                    c.external_baseline ? json("external") : json("synthetic")},
                   {"baseline_seed", c.synthetic.seed},
                   {"rng", "xoshiro256++ / splitmix64"}};
    if (c.hotspot_origin) {
        j["config"]["hotspot_origin"] = {c.hotspot_origin->first, c.hotspot_origin->second};
    } else {
        j["config"]["hotspot_origin"] = "random";
    }
    j["lambda_hat"] = ds.lambda_hat;
    if (ds.origin_used) {
        j["origin_used"] = {ds.origin_used->first, ds.origin_used->second};
    } else {
        j["origin_used"] = nullptr;
    }
    json mask = json::array();
    for (std::size_t i = 0; i < ds.injection_mask.n_regions; ++i) {
        for (std::size_t k = 0; k < ds.injection_mask.n_periods; ++k) {
            if (ds.injection_mask.at(i, k)) mask.push_back({i, k});
        }
    }
    j["injection_mask"] = std::move(mask);
    return j;
}

// ---------------------------------------------------------------------------
// study outputs and external verdicts
// ---------------------------------------------------------------------------

inline void write_study_table_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
    out << "method,impact,size,mean_accuracy,stderr\n";
    for (const auto& row : rows) {
        for (const auto& m : row.methods) {
            out << m.method_name << ',' << format_double(row.setting.hotspot_impact) << ','
                << row.setting.hotspot_size << ',' << format_double(m.mean_accuracy) << ','
                << format_double(m.std_error) << '\n';
        }
    }
}

inline json study_detail_json(const StudyConfig& cfg, const std::vector<StudyRow>& rows) {
    json j;
    j["replicates"] = cfg.replicates;
    j["master_seed"] = cfg.master_seed;
    j["sweep"] = {{"z_lo", cfg.sweep.z_lo},
                  {"z_hi", cfg.sweep.z_hi},
                  {"z_step", cfg.sweep.z_step},
                  {"tail", to_string(cfg.sweep.tail)},
                  {"alphas", cfg.sweep.alphas()}};
    json settings = json::array();
    for (const auto& row : rows) {
        json s;
        s["size"] = row.setting.hotspot_size;
        s["impact"] = row.setting.hotspot_impact;
        json methods = json::array();
        for (const auto& m : row.methods) {
            json mj;
            mj["name"] = m.method_name;
            mj["mean_accuracy"] = m.mean_accuracy;
            mj["std_error"] = m.std_error;
            mj["per_replicate_mean"] = m.per_replicate_mean;
            mj["per_replicate_per_alpha"] = m.per_replicate_per_alpha;
            methods.push_back(std::move(mj));
        }
        // paired comparison between the first two methods on the same data
        if (row.methods.size() >= 2) {
            try {
                const auto t = paired_t_test(row.methods[0].per_replicate_mean,
                                             row.methods[1].per_replicate_mean);
                s["paired_t_first_vs_second"] = {
                    {"statistic", t.statistic}, {"p_value", t.p_value}, {"dof", t.dof[0]}};
            } catch (const Error&) {
                s["paired_t_first_vs_second"] = nullptr;
            }
        }
        s["methods"] = std::move(methods);
        settings.push_back(std::move(s));
    }
    j["settings"] = std::move(settings);
    return j;
}

/// Per-dataset external verdict file: region,period,flag rows covering the
/// full grid exactly once, labels matching the dataset grid.
inline CellMask read_verdict_csv(const std::filesystem::path& path, const CountMatrix& grid) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open verdict file " + path.string());
    const auto lines = read_lines(in);
    if (lines.size() < 2) throw ParseError(path.string() + ": needs a header and data rows");
    {
        const auto header = split_csv_line(lines[0]);
        if (header.size() != 3 || lower(header[0]) != "region" || lower(header[1]) != "period" ||
            lower(header[2]) != "flag") {
            throw ParseError(path.string() + ": header must be region,period,flag");
        }
    }
    std::map<std::string, std::size_t> region_index, period_index;
    for (std::size_t i = 0; i < grid.n_regions(); ++i) region_index[grid.region_label(i)] = i;
    for (std::size_t k = 0; k < grid.n_periods(); ++k) period_index[grid.period_label(k)] = k;

    CellMask mask(grid.n_regions(), grid.n_periods());
    std::vector<std::uint8_t> seen(grid.n_regions() * grid.n_periods(), 0);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].empty()) continue;
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != 3) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) +
                             ": expected 3 fields");
        }
        const auto rit = region_index.find(fields[0]);
        if (rit == region_index.end()) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) +
                             ": unknown region '" + fields[0] + "'");
        }
        const auto pit = period_index.find(fields[1]);
        if (pit == period_index.end()) {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) +
                             ": unknown period '" + fields[1] + "'");
        }
        std::uint8_t& s = seen[rit->second * grid.n_periods() + pit->second];
        if (s) {
            throw ParseError(path.string() + ": duplicate cell (" + fields[0] + "," + fields[1] +
                             ") at row " + std::to_string(r + 1));
        }
        s = 1;
        if (fields[2] == "1") {
            mask.set(rit->second, pit->second);
        } else if (fields[2] != "0") {
            throw ParseError(path.string() + ": row " + std::to_string(r + 1) +
                             ": flag must be 0 or 1, found '" + fields[2] + "'");
        }
    }
    for (std::size_t i = 0; i < grid.n_regions(); ++i) {
        for (std::size_t k = 0; k < grid.n_periods(); ++k) {
            if (!seen[i * grid.n_periods() + k]) {
                throw ParseError(path.string() + ": missing cell (" + grid.region_label(i) + "," +
                                 grid.period_label(k) + ")");
            }
        }
    }
    return mask;
}

}  // namespace io
}  // namespace eigenspot

#endif
