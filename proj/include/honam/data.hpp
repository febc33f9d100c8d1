#pragma once

// Tabular data handling: schema, CSV ingestion, preprocessing, splitting and
// the synthetic generators.
//
// Preprocessing is fitted on the training partition only and runs, per
// feature column:  ordinal-encode (categorical) or standard-scale
// (continuous), then map through a quantile transform onto standard-normal
// scores. The quantile references are fitted on values jittered once with
// N(0, (1e-3 * column std)^2) noise; transform itself adds no noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <nlohmann/json.hpp>

#include "honam/errors.hpp"
#include "honam/matrix.hpp"
#include "honam/model.hpp"
#include "honam/random.hpp"

namespace honam {

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

enum class ColumnKind { continuous, categorical, target };

inline const char* to_string(ColumnKind k) {
    switch (k) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::target: return "target";
    }
    return "?";
}

inline ColumnKind column_kind_from_string(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "target") return ColumnKind::target;
    throw ConfigError("unknown column kind '" + s + "'");
}

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    bool is_protected = false;
    /// Target only: text values mapped to class 1 (all others to 0).
    std::vector<std::string> positive_values;
};

struct Schema {
    std::vector<ColumnSpec> columns;
    Task task = Task::regression;
    /// Predicted class treated as the favourable outcome in fairness audits.
    int favorable_class = 0;

    void validate() const {
        std::size_t targets = 0;
        std::set<std::string> names;
        for (const auto& c : columns) {
            if (c.name.empty()) throw ConfigError("schema: column with empty name");
            if (!names.insert(c.name).second) throw ConfigError("schema: duplicate column '" + c.name + "'");
            if (c.kind == ColumnKind::target) ++targets;
            if (c.is_protected && c.kind != ColumnKind::categorical) {
                throw ConfigError("schema: protected column '" + c.name + "' must be categorical");
            }
            if (!c.positive_values.empty() && c.kind != ColumnKind::target) {
                throw ConfigError("schema: positive_values only allowed on the target column");
            }
        }
        if (targets != 1) throw ConfigError("schema: exactly one target column required, found " + std::to_string(targets));
        if (feature_count() == 0) throw ConfigError("schema: no feature columns");
        if (favorable_class != 0 && favorable_class != 1) throw ConfigError("schema: favorable_class must be 0 or 1");
    }

    std::size_t feature_count() const {
        return static_cast<std::size_t>(std::count_if(columns.begin(), columns.end(),
                                                      [](const ColumnSpec& c) { return c.kind != ColumnKind::target; }));
    }

    /// Feature columns in declaration order (the model's feature order).
    std::vector<ColumnSpec> features() const {
        std::vector<ColumnSpec> out;
        for (const auto& c : columns) {
            if (c.kind != ColumnKind::target) out.push_back(c);
        }
        return out;
    }

    const ColumnSpec& target() const {
        for (const auto& c : columns) {
            if (c.kind == ColumnKind::target) return c;
        }
        throw ConfigError("schema: no target column");
    }

    /// Index among feature columns, or nullopt.
    std::optional<std::size_t> feature_index(const std::string& name) const {
        std::size_t i = 0;
        for (const auto& c : columns) {
            if (c.kind == ColumnKind::target) continue;
            if (c.name == name) return i;
            ++i;
        }
        return std::nullopt;
    }

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : columns) {
            nlohmann::json j{{"name", c.name}, {"kind", to_string(c.kind)}};
            if (c.is_protected) j["protected"] = true;
            if (!c.positive_values.empty()) j["positive_values"] = c.positive_values;
            cols.push_back(j);
        }
        return {{"task", to_string(task)}, {"columns", cols}, {"favorable_class", favorable_class}};
    }

    static Schema from_json(const nlohmann::json& j) {
        Schema s;
        try {
            s.task = task_from_string(j.at("task").get<std::string>());
            for (const auto& c : j.at("columns")) {
                ColumnSpec spec;
                spec.name = c.at("name").get<std::string>();
                spec.kind = column_kind_from_string(c.at("kind").get<std::string>());
                spec.is_protected = c.value("protected", false);
                if (c.contains("positive_values")) spec.positive_values = c.at("positive_values").get<std::vector<std::string>>();
                s.columns.push_back(std::move(spec));
            }
            s.favorable_class = j.value("favorable_class", 0);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("schema: ") + e.what());
        }
        s.validate();
        return s;
    }

    static Schema load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open schema '" + path + "'");
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("schema '" + path + "': " + e.what());
        }
    }

    /// Fingerprint of the canonical JSON form.
    std::uint64_t hash() const {
        const std::string s = to_json().dump();
        return fnv1a64(s.data(), s.size());
    }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Untyped CSV contents.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline bool is_missing_token(const std::string& s) {
    static const std::set<std::string> tokens{"", "NA", "N/A", "na", "n/a", "NaN", "nan", "?", "null", "NULL"};
    return tokens.count(trim(s)) != 0;
}

}  // namespace detail

/// Shortest text that reads back as exactly the same double.
inline std::string format_double(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw ContractError("CSV: missing header row");
    for (auto& h : detail::split_csv_line(line)) t.header.push_back(detail::trim(h));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != t.header.size()) {
            throw ParseError("CSV line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " cells, found " + std::to_string(cells.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open CSV '" + path + "'");
    return parse_csv(in);
}

inline void write_csv(const CsvTable& t, std::ostream& out) {
    for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << detail::csv_escape(t.header[i]);
    out << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << detail::csv_escape(r[i]);
        out << "\n";
    }
}

inline void write_csv(const CsvTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    write_csv(t, out);
}

/// One typed feature column. Exactly one of numeric/text is populated.
struct RawColumn {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::vector<std::optional<double>> numeric;
    std::vector<std::optional<std::string>> text;
};

/// Typed table restricted to schema columns; rows with a missing target are
/// dropped and counted.
struct RawTable {
    std::vector<RawColumn> features;
    std::vector<double> target;
    std::size_t rejected_rows = 0;

    std::size_t rows() const { return target.size(); }

    RawTable select_rows(std::span<const std::size_t> idx) const {
        RawTable out;
        out.features.reserve(features.size());
        for (const auto& c : features) {
            RawColumn nc{c.name, c.kind, {}, {}};
            for (auto i : idx) {
                if (c.kind == ColumnKind::categorical) {
                    nc.text.push_back(c.text.at(i));
                } else {
                    nc.numeric.push_back(c.numeric.at(i));
                }
            }
            out.features.push_back(std::move(nc));
        }
        for (auto i : idx) out.target.push_back(target.at(i));
        return out;
    }
};

inline RawTable typed_table(const CsvTable& csv, const Schema& schema) {
    schema.validate();
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < csv.header.size(); ++i) pos[csv.header[i]] = i;
    for (const auto& c : schema.columns) {
        if (!pos.count(c.name)) throw ConfigError("schema column '" + c.name + "' not present in CSV header");
    }
    const ColumnSpec& tspec = schema.target();
    const std::size_t tcol = pos.at(tspec.name);

    RawTable out;
    for (const auto& c : schema.features()) out.features.push_back({c.name, c.kind, {}, {}});

    auto parse_number = [](const std::string& cell, std::size_t row, const std::string& col) -> double {
        const std::string s = detail::trim(cell);
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) {
            throw ParseError("CSV row " + std::to_string(row) + ", column '" + col + "': cannot parse '" + cell +
                             "' as a number");
        }
        return v;
    };

    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const std::size_t rowno = r + 1;
        const std::string& tcell = row[tcol];
        if (detail::is_missing_token(tcell)) {
            ++out.rejected_rows;
            continue;
        }
        double y;
        if (!tspec.positive_values.empty()) {
            const std::string v = detail::trim(tcell);
            y = std::find(tspec.positive_values.begin(), tspec.positive_values.end(), v) != tspec.positive_values.end()
                    ? 1.0
                    : 0.0;
        } else {
            y = parse_number(tcell, rowno, tspec.name);
            if (schema.task == Task::binary_classification && y != 0.0 && y != 1.0) {
                throw ParseError("CSV row " + std::to_string(rowno) + ", column '" + tspec.name +
                                 "': binary target must be 0 or 1");
            }
        }
        out.target.push_back(y);
        for (auto& col : out.features) {
            const std::string& cell = row[pos.at(col.name)];
            if (col.kind == ColumnKind::categorical) {
                col.text.push_back(detail::is_missing_token(cell) ? std::nullopt
                                                                  : std::optional<std::string>(detail::trim(cell)));
            } else {
                col.numeric.push_back(detail::is_missing_token(cell)
                                          ? std::nullopt
                                          : std::optional<double>(parse_number(cell, rowno, col.name)));
            }
        }
    }
    return out;
}

inline RawTable load_csv(const std::string& path, const Schema& schema) { return typed_table(read_csv(path), schema); }

// ---------------------------------------------------------------------------
// Preprocessing
// ---------------------------------------------------------------------------

inline constexpr const char* kMissingCategory = "<missing>";

/// Fitted per-column transform.
struct ColumnTransform {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
    std::map<std::string, double> codes;  // categorical
    double reserved_code = 0.0;           // unseen categories
    double mean = 0.0;                    // continuous: imputation + scaling
    double std = 1.0;
    bool degenerate = false;              // zero variance: maps to 0
    std::vector<double> references;       // sorted quantile references

    /// Encoded/scaled value before the quantile map.
    double encode_text(const std::optional<std::string>& v) const {
        const auto it = codes.find(v ? *v : std::string(kMissingCategory));
        return it == codes.end() ? reserved_code : it->second;
    }
    double encode_number(const std::optional<double>& v) const {
        const double x = v ? *v : mean;
        return (x - mean) / std;
    }

    /// Quantile map onto standard-normal scores. Tied references are
    /// resolved to the midpoint of their level range.
    double quantile_map(double v) const {
        if (degenerate) return 0.0;
        const auto& r = references;
        const std::size_t q = r.size();
        constexpr double kBound = 1e-7;
        const auto lo = static_cast<std::size_t>(std::lower_bound(r.begin(), r.end(), v) - r.begin());
        const auto hi = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), v) - r.begin());
        const double step = 1.0 / static_cast<double>(q - 1);
        double level;
        if (lo < hi) {
            level = 0.5 * static_cast<double>(lo + hi - 1) * step;
        } else if (hi == 0) {
            level = 0.0;
        } else if (lo == q) {
            level = 1.0;
        } else {
            const std::size_t a = hi - 1;
            level = (static_cast<double>(a) + (v - r[a]) / (r[hi] - r[a])) * step;
        }
        level = std::clamp(level, kBound, 1.0 - kBound);
        static const boost::math::normal_distribution<double> unit_normal;
        return boost::math::quantile(unit_normal, level);
    }
};

struct Preprocessor {
    std::vector<ColumnTransform> columns;
    double noise_fraction = 1e-3;
    std::size_t max_quantiles = 1000;
    /// Regression targets are standardised with these (classification: 0/1).
    double target_mean = 0.0;
    double target_std = 1.0;
    std::vector<std::string> warnings;

    std::size_t m() const { return columns.size(); }

    Matrix transform(const RawTable& t) const {
        if (t.features.size() != columns.size()) {
            throw ContractError("preprocessor: table has " + std::to_string(t.features.size()) +
                                " feature columns, expected " + std::to_string(columns.size()));
        }
        Matrix out(t.rows(), columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const auto& ct = columns[j];
            const auto& col = t.features[j];
            if (col.name != ct.name) throw ContractError("preprocessor: column '" + col.name + "' where '" + ct.name + "' expected");
            for (std::size_t i = 0; i < t.rows(); ++i) {
                const double enc = ct.kind == ColumnKind::categorical ? ct.encode_text(col.text[i]) : ct.encode_number(col.numeric[i]);
                out(i, j) = ct.quantile_map(enc);
            }
        }
        return out;
    }

    std::vector<double> transform_target(std::span<const double> y) const {
        std::vector<double> out(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = (y[i] - target_mean) / target_std;
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json cols = nlohmann::json::array();
        for (const auto& c : columns) {
            cols.push_back({{"name", c.name},
                            {"kind", to_string(c.kind)},
                            {"codes", c.codes},
                            {"reserved_code", c.reserved_code},
                            {"mean", c.mean},
                            {"std", c.std},
                            {"degenerate", c.degenerate},
                            {"references", c.references}});
        }
        return {{"columns", cols},
                {"noise_fraction", noise_fraction},
                {"max_quantiles", max_quantiles},
                {"target_mean", target_mean},
                {"target_std", target_std}};
    }

    static Preprocessor from_json(const nlohmann::json& j) {
        Preprocessor p;
        try {
            for (const auto& c : j.at("columns")) {
                ColumnTransform ct;
                ct.name = c.at("name").get<std::string>();
                ct.kind = column_kind_from_string(c.at("kind").get<std::string>());
                ct.codes = c.at("codes").get<std::map<std::string, double>>();
                ct.reserved_code = c.at("reserved_code").get<double>();
                ct.mean = c.at("mean").get<double>();
                ct.std = c.at("std").get<double>();
                ct.degenerate = c.at("degenerate").get<bool>();
                ct.references = c.at("references").get<std::vector<double>>();
                p.columns.push_back(std::move(ct));
            }
            p.noise_fraction = j.at("noise_fraction").get<double>();
            p.max_quantiles = j.at("max_quantiles").get<std::size_t>();
            p.target_mean = j.at("target_mean").get<double>();
            p.target_std = j.at("target_std").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw LoadError(std::string("preprocessor: ") + e.what());
        }
        return p;
    }
};

namespace detail {

inline double mean_of(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double std_of(std::span<const double> v, double mu) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size()));
}

/// Linear-interpolated order statistics at `q` evenly spaced levels.
inline std::vector<double> quantile_references(std::vector<double> sorted, std::size_t q) {
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> refs(q);
    const double last = static_cast<double>(sorted.size() - 1);
    for (std::size_t i = 0; i < q; ++i) {
        const double pos = q == 1 ? 0.0 : last * static_cast<double>(i) / static_cast<double>(q - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        refs[i] = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    return refs;
}

}  // namespace detail

/// Fits on the training partition only.
inline Preprocessor fit_preprocessor(const RawTable& train, const Schema& schema, std::uint64_t noise_seed) {
    if (train.rows() == 0) throw ContractError("fit_preprocessor: empty training partition");
    const auto specs = schema.features();
    if (specs.size() != train.features.size()) throw ContractError("fit_preprocessor: table does not match schema");
    Preprocessor p;
    Rng rng(noise_seed);
    const std::size_t n = train.rows();
    for (std::size_t j = 0; j < train.features.size(); ++j) {
        const auto& col = train.features[j];
        ColumnTransform ct;
        ct.name = col.name;
        ct.kind = col.kind;
        std::vector<double> enc(n);
        if (col.kind == ColumnKind::categorical) {
            std::set<std::string> levels;
            for (const auto& v : col.text) levels.insert(v ? *v : std::string(kMissingCategory));
            double code = 0.0;
            for (const auto& l : levels) ct.codes[l] = code++;
            ct.reserved_code = code;
            for (std::size_t i = 0; i < n; ++i) enc[i] = ct.encode_text(col.text[i]);
        } else {
            std::vector<double> present;
            for (const auto& v : col.numeric) {
                if (v) present.push_back(*v);
            }
            ct.mean = detail::mean_of(present);
            const double sd = detail::std_of(present, ct.mean);
            if (sd > 0.0) {
                ct.std = sd;
            } else {
                ct.degenerate = true;
                p.warnings.push_back("column '" + col.name + "' has zero variance; transformed to constant 0");
            }
            for (std::size_t i = 0; i < n; ++i) enc[i] = ct.encode_number(col.numeric[i]);
        }
        const double spread = detail::std_of(enc, detail::mean_of(enc));
        if (spread == 0.0) {
            ct.degenerate = true;
        } else {
            std::normal_distribution<double> noise(0.0, p.noise_fraction * spread);
            for (auto& v : enc) v += noise(rng);
            ct.references = detail::quantile_references(std::move(enc), std::min(p.max_quantiles, n));
            if (ct.references.size() < 2) ct.degenerate = true;
        }
        p.columns.push_back(std::move(ct));
    }
    if (schema.task == Task::regression) {
        p.target_mean = detail::mean_of(train.target);
        const double sd = detail::std_of(train.target, p.target_mean);
        p.target_std = sd > 0.0 ? sd : 1.0;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitIndices {
    std::vector<std::size_t> train, valid, test;
};

/// Seeded shuffle, then a contiguous 60/20/20 cut.
inline SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
    if (n < 10) throw ContractError("split: need at least 10 rows, have " + std::to_string(n));
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(n)));
    const auto n_valid = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
    SplitIndices s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.valid.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                   idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), idx.end());
    return s;
}

/// Preprocessed train/validation/test partitions.
struct DatasetBundle {
    Schema schema;
    Preprocessor preprocessor;
    std::uint64_t split_seed = 0;
    SplitIndices split;
    Matrix train_x, valid_x, test_x;
    std::vector<double> train_y, valid_y, test_y;
};

/// Splits `raw`, fits the preprocessor on the training rows and transforms
/// all three partitions.
inline DatasetBundle make_bundle(const RawTable& raw, const Schema& schema, std::uint64_t split_seed,
                                 std::uint64_t noise_seed) {
    DatasetBundle b;
    b.schema = schema;
    b.split_seed = split_seed;
    b.split = split_indices(raw.rows(), split_seed);
    const RawTable tr = raw.select_rows(b.split.train);
    const RawTable va = raw.select_rows(b.split.valid);
    const RawTable te = raw.select_rows(b.split.test);
    b.preprocessor = fit_preprocessor(tr, schema, noise_seed);
    b.train_x = b.preprocessor.transform(tr);
    b.valid_x = b.preprocessor.transform(va);
    b.test_x = b.preprocessor.transform(te);
    b.train_y = b.preprocessor.transform_target(tr.target);
    b.valid_y = b.preprocessor.transform_target(va.target);
    b.test_y = b.preprocessor.transform_target(te.target);
    return b;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// The 100 support points of the synthetic classification set and the
/// positive rate drawn for each.
struct SynthClassificationPoints {
    std::vector<double> x;
    std::vector<double> p;
};

inline SynthClassificationPoints synth_classification_points(std::uint64_t seed) {
    Rng rng(seed);
    SynthClassificationPoints pts;
    pts.x = uniform_draws(rng, 100, -1.0, 1.0);
    pts.p = uniform_draws(rng, 100, 0.1, 0.9);
    return pts;
}

/// 100 points in [-1,1], each with 100 Bernoulli(p) labels, p ~ U[0.1,0.9]:
/// 10 000 rows with columns x,label.
inline CsvTable gen_synth_classification(std::uint64_t seed) {
    const auto pts = synth_classification_points(seed);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    CsvTable t{{"x", "label"}, {}};
    t.rows.reserve(10000);
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        std::bernoulli_distribution coin(pts.p[i]);
        for (int j = 0; j < 100; ++j) t.rows.push_back({format_double(pts.x[i]), coin(rng) ? "1" : "0"});
    }
    return t;
}

inline Schema synth_classification_schema() {
    Schema s;
    s.task = Task::binary_classification;
    s.columns = {{"x", ColumnKind::continuous, false, {}}, {"label", ColumnKind::target, false, {}}};
    return s;
}

/// 100 rows, x and y both U[-1,1].
inline CsvTable gen_synth_regression(std::uint64_t seed) {
    Rng rng(seed);
    CsvTable t{{"x", "y"}, {}};
    for (int i = 0; i < 100; ++i) {
        const auto xy = uniform_draws(rng, 2, -1.0, 1.0);
        t.rows.push_back({format_double(xy[0]), format_double(xy[1])});
    }
    return t;
}

inline Schema synth_regression_schema() {
    Schema s;
    s.task = Task::regression;
    s.columns = {{"x", ColumnKind::continuous, false, {}}, {"y", ColumnKind::target, false, {}}};
    return s;
}

/// x1, x2, x3 ~ N(0,1); y = x1 x2 + 0.5 x3. Additive models capture only
/// the 0.5 x3 part (R^2 = 0.2).
inline CsvTable gen_interaction_regression(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    CsvTable t{{"x1", "x2", "x3", "y"}, {}};
    t.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = normal_draws(rng, 3, 0.0, 1.0);
        const double y = x[0] * x[1] + 0.5 * x[2];
        t.rows.push_back({format_double(x[0]), format_double(x[1]), format_double(x[2]), format_double(y)});
    }
    return t;
}

inline Schema interaction_regression_schema() {
    Schema s;
    s.task = Task::regression;
    s.columns = {{"x1", ColumnKind::continuous, false, {}},
                 {"x2", ColumnKind::continuous, false, {}},
                 {"x3", ColumnKind::continuous, false, {}},
                 {"y", ColumnKind::target, false, {}}};
    return s;
}

/// Recidivism-style data with bias planted in the protected columns: the
/// label logit rises by 1.5 for race "African-American" and by 0.4 for sex
/// "Male". Race and sex are drawn independently of age and priors.
inline CsvTable gen_biased_classification(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> races{"African-American", "Caucasian", "Hispanic",
                                                "Asian", "Native American", "Other"};
    static const std::vector<double> race_weights{0.45, 0.30, 0.12, 0.04, 0.03, 0.06};
    Rng rng(seed);
    std::discrete_distribution<std::size_t> race_dist(race_weights.begin(), race_weights.end());
    std::bernoulli_distribution male(0.8);
    std::uniform_real_distribution<double> age_dist(18.0, 70.0);
    std::poisson_distribution<int> priors_dist(3.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    CsvTable t{{"age", "priors_count", "sex", "race", "high_risk"}, {}};
    t.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double age = std::round(age_dist(rng));
        const int priors = priors_dist(rng);
        const bool is_male = male(rng);
        const std::size_t race = race_dist(rng);
        const double logit = -0.9 + 0.35 * priors - 0.04 * (age - 35.0) + (race == 0 ? 1.5 : 0.0) +
                             (is_male ? 0.4 : 0.0);
        const bool y = u01(rng) < 1.0 / (1.0 + std::exp(-logit));
        t.rows.push_back({format_double(age), std::to_string(priors), is_male ? "Male" : "Female", races[race],
                          y ? "1" : "0"});
    }
    return t;
}

inline Schema biased_classification_schema() {
    Schema s;
    s.task = Task::binary_classification;
    s.columns = {{"age", ColumnKind::continuous, false, {}},
                 {"priors_count", ColumnKind::continuous, false, {}},
                 {"sex", ColumnKind::categorical, true, {}},
                 {"race", ColumnKind::categorical, true, {}},
                 {"high_risk", ColumnKind::target, false, {}}};
    return s;
}

}  // namespace honam
