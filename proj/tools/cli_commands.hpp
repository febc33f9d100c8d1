#pragma once

// Subcommands of the `honam` tool. Kept in a header so the test suite can
// drive them in-process through run().

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "honam/honam.hpp"

namespace honam::cli {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr const char* kOutDirEnv = "HONAM_OUT_DIR";

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

inline fs::path resolve_out_dir(const std::string& flag) {
    const char* env = std::getenv(kOutDirEnv);
    fs::path dir = (env && *env) ? fs::path(env) : fs::path(flag);
    if (dir.empty()) throw ConfigError("no output directory given (--out or " + std::string(kOutDirEnv) + ")");
    fs::create_directories(dir);
    return dir;
}

/// File outputs keep their name but move under HONAM_OUT_DIR when it is set.
inline fs::path resolve_out_file(const std::string& flag) {
    if (flag.empty()) throw ConfigError("no output file given (--out)");
    fs::path p(flag);
    const char* env = std::getenv(kOutDirEnv);
    if (env && *env) p = fs::path(env) / p.filename();
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline std::string file_hash(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return hex64(fnv1a64(bytes.data(), bytes.size()));
}

inline void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open '" + p.string() + "' for writing");
    out << s;
    if (!out) throw ConfigError("failed writing '" + p.string() + "'");
}

/// Everything needed to re-run a command. No timestamps, so identical runs
/// produce identical manifests.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::map<std::string, std::string> inputs;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::vector<fs::path> artifacts;

    void write(const fs::path& path) const {
        json art = json::object();
        for (const auto& a : artifacts) art[a.filename().string()] = file_hash(a);
        json in = json::object();
        for (const auto& [k, v] : inputs) in[k] = v;
        const json j{{"command", command}, {"argv", argv},   {"inputs", in},
                     {"seeds", seeds},     {"out", out},     {"artifact_fnv1a64", art}};
        write_text(path, j.dump(2) + "\n");
    }
};

/// Schema, preprocessor and provenance stored in each model file.
struct ModelMetadata {
    Schema schema;
    Preprocessor preprocessor;
    std::uint64_t split_seed = 0;
    std::uint64_t seed = 0;
    json config = json::object();
    json test_metrics = json::object();

    std::string dump() const {
        return json{{"schema", schema.to_json()},
                    {"preprocessor", preprocessor.to_json()},
                    {"split_seed", split_seed},
                    {"seed", seed},
                    {"config", config},
                    {"test_metrics", test_metrics}}
            .dump();
    }

    static ModelMetadata parse(const std::string& s) {
        ModelMetadata m;
        try {
            const json j = json::parse(s);
            m.schema = Schema::from_json(j.at("schema"));
            m.preprocessor = Preprocessor::from_json(j.at("preprocessor"));
            m.split_seed = j.at("split_seed").get<std::uint64_t>();
            m.seed = j.at("seed").get<std::uint64_t>();
            m.config = j.value("config", json::object());
            m.test_metrics = j.value("test_metrics", json::object());
        } catch (const json::exception& e) {
            throw LoadError(std::string("model metadata unreadable: ") + e.what());
        } catch (const ConfigError& e) {
            throw LoadError(std::string("model metadata unreadable: ") + e.what());
        }
        return m;
    }
};

using MetricList = std::vector<std::pair<std::string, std::optional<double>>>;

/// Task metrics over raw model outputs (logits for classification).
inline MetricList task_metrics(Task task, std::span<const double> y, std::span<const double> out, std::size_t p) {
    MetricList ms;
    if (task == Task::regression) {
        auto guarded = [&](auto fn) -> std::optional<double> {
            try {
                return fn();
            } catch (const ContractError&) {
                return std::nullopt;
            }
        };
        ms.emplace_back("r2", r_squared(y, out));
        ms.emplace_back("adj_r2", guarded([&] { return adjusted_r_squared(y, out, p); }));
        ms.emplace_back("r_abs", r_absolute(y, out));
        ms.emplace_back("adj_r_abs", guarded([&] { return adjusted_r_absolute(y, out, p); }));
        ms.emplace_back("mse", mean_squared_error(y, out));
    } else {
        ms.emplace_back("auroc", auroc(y, out));
        ms.emplace_back("auprc", auprc(y, out));
        ms.emplace_back("log_loss", log_loss_from_logits(y, out));
    }
    return ms;
}

inline json metrics_json(const MetricList& ms) {
    json j = json::object();
    for (const auto& [k, v] : ms) j[k] = v ? json(*v) : json(nullptr);
    return j;
}

inline std::string metric_text(const std::optional<double>& v) { return v ? format_double(*v) : "undefined"; }

/// Lines present in only one of the two schemas, prefixed '-' (model) or
/// '+' (data).
inline std::string schema_diff(const Schema& model_schema, const Schema& data_schema) {
    auto lines = [](const Schema& s) {
        std::vector<std::string> out{"task: " + std::string(to_string(s.task)),
                                     "favorable_class: " + std::to_string(s.favorable_class)};
        for (const auto& c : s.columns) {
            std::string l = "column " + c.name + ": " + to_string(c.kind);
            if (c.is_protected) l += " protected";
            for (const auto& v : c.positive_values) l += " +" + v;
            out.push_back(l);
        }
        return out;
    };
    const auto a = lines(model_schema), b = lines(data_schema);
    const std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::string d;
    for (const auto& l : a) {
        if (!sb.count(l)) d += "  - " + l + "\n";
    }
    for (const auto& l : b) {
        if (!sa.count(l)) d += "  + " + l + "\n";
    }
    if (d.empty()) d = "  (column order differs)\n";
    return d;
}

struct LoadedModel {
    HonamModel model;
    ModelMetadata meta;
};

inline LoadedModel load_with_metadata(const std::string& path) {
    LoadedModel l{load_model(path), {}};
    l.meta = ModelMetadata::parse(l.model.metadata());
    if (l.meta.schema.hash() != l.model.schema_hash()) throw LoadError("model metadata does not match its schema hash");
    return l;
}

/// Checks a user-supplied schema against the model's and returns the one to
/// read data with.
inline Schema checked_schema(const LoadedModel& l, const std::string& schema_path) {
    if (schema_path.empty()) return l.meta.schema;
    const Schema s = Schema::load(schema_path);
    if (s.task != l.model.task()) {
        throw ContractError(std::string("task mismatch: model is ") + to_string(l.model.task()) +
                            ", data schema is " + to_string(s.task));
    }
    if (s.hash() != l.model.schema_hash()) {
        throw ContractError("schema mismatch between model and data:\n" + schema_diff(l.meta.schema, s));
    }
    return s;
}

/// Raw and transformed rows selected from a data file.
struct EvalData {
    RawTable raw;
    Matrix x;
    std::vector<double> y;
};

inline EvalData eval_rows(const LoadedModel& l, const Schema& schema, const std::string& data_path,
                          const std::string& split) {
    const RawTable all = load_csv(data_path, schema);
    EvalData d;
    if (split == "all") {
        d.raw = all;
    } else if (split == "test" || split == "valid" || split == "train") {
        const auto s = split_indices(all.rows(), l.meta.split_seed);
        const auto& idx = split == "test" ? s.test : split == "valid" ? s.valid : s.train;
        d.raw = all.select_rows(idx);
    } else {
        throw ConfigError("unknown split '" + split + "' (use all, train, valid or test)");
    }
    d.x = l.meta.preprocessor.transform(d.raw);
    d.y = schema.task == Task::regression ? l.meta.preprocessor.transform_target(d.raw.target) : d.raw.target;
    return d;
}

inline std::size_t feature_or_throw(const Schema& s, const std::string& name) {
    const auto i = s.feature_index(name);
    if (!i) throw ConfigError("unknown feature '" + name + "'");
    return *i;
}

inline std::string safe_name(std::string s) {
    for (auto& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return s;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string data, schema, config, out;
    std::optional<std::size_t> order;
    std::optional<std::string> unit;
    std::optional<std::size_t> epochs;
    std::vector<std::uint64_t> seeds{0};
    std::optional<std::uint64_t> split_seed;
    std::size_t jobs = 0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    MetricList metrics;
    TrainHistory history;
    std::vector<char> model_bytes;
};

inline int cmd_train(const TrainArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const Schema schema = Schema::load(a.schema);
    RunConfig cfg = a.config.empty() ? RunConfig{} : RunConfig::load(a.config);
    if (a.order) cfg.order = *a.order;
    if (a.unit) cfg.net.unit = unit_kind_from_string(*a.unit);
    if (a.epochs) cfg.train.epochs = *a.epochs;
    cfg.validate();
    if (a.seeds.empty()) throw ConfigError("--seeds: need at least one seed");
    const std::set<std::uint64_t> distinct(a.seeds.begin(), a.seeds.end());
    if (distinct.size() != a.seeds.size()) throw ConfigError("--seeds: duplicate seed");

    const RawTable raw = load_csv(a.data, schema);
    const fs::path dir = resolve_out_dir(a.out);

    auto run_seed = [&](std::uint64_t seed) {
        const std::uint64_t split_seed = a.split_seed.value_or(seed);
        const DatasetBundle bundle = make_bundle(raw, schema, split_seed, split_seed);
        Rng rng(seed);
        HonamModel model = HonamModel::init(cfg.model_config(schema.feature_count(), schema.task), rng);
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        SeedResult r;
        r.seed = seed;
        r.history = train(model, bundle, tc);
        const auto pred = model.predict(bundle.test_x);
        r.metrics = task_metrics(schema.task, bundle.test_y, pred, schema.feature_count());
        ModelMetadata meta{schema, bundle.preprocessor, split_seed, seed, cfg.to_json(), metrics_json(r.metrics)};
        model.set_metadata(meta.dump());
        model.set_schema_hash(schema.hash());
        r.model_bytes = serialize_model(model);
        return r;
    };

    std::size_t jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    std::vector<SeedResult> results;
    for (std::size_t begin = 0; begin < a.seeds.size(); begin += jobs) {
        std::vector<std::future<SeedResult>> pending;
        for (std::size_t i = begin; i < std::min(a.seeds.size(), begin + jobs); ++i) {
            pending.push_back(std::async(std::launch::async, run_seed, a.seeds[i]));
        }
        for (auto& f : pending) results.push_back(f.get());
    }

    RunManifest man{"train", argv, {{"data", a.data}, {"schema", a.schema}}, a.seeds, dir.string(), {}};
    if (!a.config.empty()) man.inputs["config"] = a.config;

    std::map<std::string, std::vector<double>> per_metric;
    std::vector<std::string> metric_order;
    std::ostringstream per_seed;
    per_seed << "seed,metric,value\n";
    for (const auto& r : results) {
        const fs::path model_path = dir / ("model_seed" + std::to_string(r.seed) + ".honam");
        write_text(model_path, std::string(r.model_bytes.begin(), r.model_bytes.end()));
        std::ostringstream hist;
        write_history_csv(r.history, hist);
        const fs::path hist_path = dir / ("history_seed" + std::to_string(r.seed) + ".csv");
        write_text(hist_path, hist.str());
        man.artifacts.push_back(model_path);
        man.artifacts.push_back(hist_path);
        out << "seed " << r.seed << ": best epoch " << r.history.best_epoch;
        for (const auto& [name, v] : r.metrics) {
            out << ", test " << name << ' ' << metric_text(v);
            per_seed << r.seed << ',' << name << ',' << (v ? format_double(*v) : "") << '\n';
            if (!per_metric.count(name)) metric_order.push_back(name);
            auto& bucket = per_metric[name];
            if (v) bucket.push_back(*v);
        }
        out << '\n';
    }

    std::ostringstream summary;
    summary << "metric,mean,std,seeds\n";
    for (const auto& name : metric_order) {
        const auto s = summarize(per_metric[name]);
        summary << name << ',' << (s.count ? format_double(s.mean) : "") << ','
                << (s.std ? format_double(*s.std) : "") << ',' << s.count << '\n';
        out << name << ": " << (s.count ? format_double(s.mean) : "undefined");
        if (s.std) out << " +/- " << format_double(*s.std);
        out << '\n';
    }
    const fs::path metrics_path = dir / "metrics.csv";
    const fs::path per_seed_path = dir / "metrics_per_seed.csv";
    write_text(metrics_path, summary.str());
    write_text(per_seed_path, per_seed.str());
    man.artifacts.push_back(metrics_path);
    man.artifacts.push_back(per_seed_path);
    man.write(dir / "run_manifest.json");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model, data, schema, split = "test", out;
};

inline int cmd_eval(const EvalArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const LoadedModel l = load_with_metadata(a.model);
    const Schema schema = checked_schema(l, a.schema);
    const EvalData d = eval_rows(l, schema, a.data, a.split);
    const auto pred = l.model.predict(d.x);
    const auto ms = task_metrics(schema.task, d.y, pred, schema.feature_count());
    std::ostringstream csv;
    csv << "metric,value\n";
    for (const auto& [name, v] : ms) {
        out << name << ' ' << metric_text(v) << '\n';
        csv << name << ',' << (v ? format_double(*v) : "") << '\n';
    }
    if (!a.out.empty() || std::getenv(kOutDirEnv)) {
        const fs::path dir = resolve_out_dir(a.out);
        const fs::path p = dir / "eval_metrics.csv";
        write_text(p, csv.str());
        RunManifest man{"eval", argv, {{"model", a.model}, {"data", a.data}}, {l.meta.seed}, dir.string(), {p}};
        if (!a.schema.empty()) man.inputs["schema"] = a.schema;
        man.write(dir / "run_manifest.json");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// interpret
// ---------------------------------------------------------------------------

struct InterpretArgs {
    std::string model, feature, pair, data, out, format = "csv";
    std::optional<std::size_t> row;
    std::size_t grid = 100;
};

inline int cmd_interpret(const InterpretArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const int modes = int(!a.feature.empty()) + int(!a.pair.empty()) + int(a.row.has_value());
    if (modes != 1) throw ConfigError("interpret: give exactly one of --feature, --pair or --row");
    if (a.format != "csv" && a.format != "svg") throw ConfigError("interpret: --format must be csv or svg");
    const LoadedModel l = load_with_metadata(a.model);
    const Schema& schema = l.meta.schema;
    const fs::path dir = resolve_out_dir(a.out);
    RunManifest man{"interpret", argv, {{"model", a.model}}, {l.meta.seed}, dir.string(), {}};

    std::ostringstream body;
    fs::path path;
    if (!a.feature.empty()) {
        const auto curve = shape_curve(l.model, l.meta.preprocessor, feature_or_throw(schema, a.feature), a.grid);
        a.format == "csv" ? write_shape_csv(curve, body) : write_shape_svg(curve, body);
        path = dir / ("shape_" + safe_name(a.feature) + "." + a.format);
    } else if (!a.pair.empty()) {
        const auto comma = a.pair.find(',');
        if (comma == std::string::npos) throw ConfigError("interpret: --pair expects NAME,NAME");
        const std::string fa = a.pair.substr(0, comma), fb = a.pair.substr(comma + 1);
        const auto s = pair_surface(l.model, l.meta.preprocessor, feature_or_throw(schema, fa),
                                    feature_or_throw(schema, fb), a.grid);
        a.format == "csv" ? write_pair_csv(s, body) : write_pair_svg(s, body);
        path = dir / ("pair_" + safe_name(fa) + "_" + safe_name(fb) + "." + a.format);
    } else {
        if (a.data.empty()) throw ConfigError("interpret: --row needs --data");
        if (a.format != "csv") throw ConfigError("interpret: row reports are CSV only");
        man.inputs["data"] = a.data;
        const RawTable all = load_csv(a.data, schema);
        if (*a.row >= all.rows()) {
            throw ConfigError("interpret: row " + std::to_string(*a.row) + " out of range (" +
                              std::to_string(all.rows()) + " rows)");
        }
        const std::vector<std::size_t> pick{*a.row};
        const Matrix x = l.meta.preprocessor.transform(all.select_rows(pick));
        const auto report = l.model.local_contributions(x.row(0), l.model.order());
        std::vector<std::string> names;
        for (const auto& c : schema.features()) names.push_back(c.name);
        write_contributions_csv(report, names, body);
        const double pred = l.model.predict(x).front();
        out << "bias " << format_double(report.bias) << ", total " << format_double(report.total) << ", prediction "
            << format_double(pred) << '\n';
        path = dir / ("row_" + std::to_string(*a.row) + ".csv");
    }
    write_text(path, body.str());
    out << "wrote " << path.string() << '\n';
    man.artifacts.push_back(path);
    man.write(dir / "run_manifest.json");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// ablate
// ---------------------------------------------------------------------------

struct AblateArgs {
    std::string model, data, out, out_model, split = "test";
    std::vector<std::string> features;
    double threshold = 0.5;
};

struct FairnessRow {
    std::string model, metric;
    std::optional<double> value;
};

/// Task metrics plus disparate impact for every pair of levels of every
/// protected column.
inline std::vector<FairnessRow> fairness_rows(const std::string& label, const HonamModel& model, const Schema& schema,
                                              const EvalData& d, double threshold) {
    std::vector<FairnessRow> rows;
    const auto pred = model.predict(d.x);
    for (const auto& [name, v] : task_metrics(schema.task, d.y, pred, schema.feature_count())) {
        rows.push_back({label, name, v});
    }
    if (schema.task != Task::binary_classification) return rows;
    std::vector<double> prob(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) prob[i] = sigmoid(pred[i]);
    for (const auto& col : d.raw.features) {
        const auto idx = schema.feature_index(col.name);
        if (!idx || !schema.features()[*idx].is_protected) continue;
        std::vector<std::string> groups;
        for (const auto& v : col.text) groups.push_back(v ? *v : kMissingCategory);
        const std::set<std::string> levels(groups.begin(), groups.end());
        for (auto ia = levels.begin(); ia != levels.end(); ++ia) {
            for (auto ib = std::next(ia); ib != levels.end(); ++ib) {
                rows.push_back({label, "di:" + col.name + ":" + *ia + "|" + *ib,
                                disparate_impact(prob, groups, *ia, *ib, threshold, schema.favorable_class)});
            }
        }
    }
    return rows;
}

inline int cmd_ablate(const AblateArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const LoadedModel l = load_with_metadata(a.model);
    const Schema& schema = l.meta.schema;
    std::set<std::size_t> drop;
    for (const auto& f : a.features) drop.insert(feature_or_throw(schema, f));
    if (a.data.empty()) throw ConfigError("ablate: --data is required for the before/after report");
    const EvalData d = eval_rows(l, schema, a.data, a.split);

    HonamModel ablated = l.model.clone();
    ablated.ablate(drop);

    const fs::path dir = resolve_out_dir(a.out);
    const fs::path model_path = a.out_model.empty() ? dir / "model_ablated.honam" : resolve_out_file(a.out_model);

    auto rows = fairness_rows("biased", l.model, schema, d, a.threshold);
    const auto after = fairness_rows("unbiased", ablated, schema, d, a.threshold);
    rows.insert(rows.end(), after.begin(), after.end());
    std::ostringstream csv;
    csv << "model,metric,value\n";
    for (const auto& r : rows) {
        csv << r.model << ',' << detail::csv_escape(r.metric) << ',' << (r.value ? format_double(*r.value) : "")
            << '\n';
    }
    out << std::left << std::setw(48) << "metric" << std::setw(14) << "biased" << "unbiased\n";
    const std::size_t half = rows.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        out << std::setw(48) << rows[i].metric << std::setw(14) << metric_text(rows[i].value)
            << metric_text(rows[half + i].value) << '\n';
    }

    save_model(ablated, model_path.string());
    const fs::path report = dir / "fairness_report.csv";
    write_text(report, csv.str());
    RunManifest man{"ablate", argv, {{"model", a.model}, {"data", a.data}}, {l.meta.seed}, dir.string(),
                    {model_path, report}};
    man.write(dir / "run_manifest.json");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string kind, out, schema_out;
    std::uint64_t seed = 0;
    std::optional<std::size_t> rows;
};

inline int cmd_synth(const SynthArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    CsvTable t;
    Schema s;
    if (a.kind == "classification") {
        if (a.rows) throw ConfigError("synth: classification size is fixed at 10000 rows");
        t = gen_synth_classification(a.seed);
        s = synth_classification_schema();
    } else if (a.kind == "regression") {
        if (a.rows) throw ConfigError("synth: regression size is fixed at 100 rows");
        t = gen_synth_regression(a.seed);
        s = synth_regression_schema();
    } else if (a.kind == "interaction") {
        t = gen_interaction_regression(a.rows.value_or(5000), a.seed);
        s = interaction_regression_schema();
    } else if (a.kind == "biased") {
        t = gen_biased_classification(a.rows.value_or(5000), a.seed);
        s = biased_classification_schema();
    } else {
        throw ConfigError("synth: unknown kind '" + a.kind + "'");
    }
    const fs::path path = resolve_out_file(a.out);
    std::ostringstream body;
    write_csv(t, body);
    write_text(path, body.str());
    RunManifest man{"synth", argv, {{"kind", a.kind}}, {a.seed}, path.parent_path().string(), {path}};
    if (!a.schema_out.empty()) {
        const fs::path sp = resolve_out_file(a.schema_out);
        write_text(sp, s.to_json().dump(2) + "\n");
        man.artifacts.push_back(sp);
    }
    man.write(fs::path(path.string() + ".manifest.json"));
    out << "wrote " << t.rows.size() << " rows to " << path.string() << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::vector<std::string> kernels{"recursion", "enumeration", "crossnet"};
    std::vector<std::size_t> m{100, 200}, k{32}, t{4};
    std::size_t reps = 100;
    double cap = 5e8;
    std::uint64_t seed = 0;
    std::string out;
};

struct BenchRow {
    KernelKind kernel;
    std::size_t m, k, t;
    std::uint64_t multiplies;
    std::optional<double> wall_ns;
    std::string note;
};

inline std::vector<BenchRow> run_bench(const BenchArgs& a) {
    if (a.reps == 0) throw ConfigError("bench: --reps must be positive");
    std::vector<KernelKind> kinds;
    for (const auto& s : a.kernels) kinds.push_back(kernel_kind_from_string(s));
    for (const auto* list : {&a.m, &a.k, &a.t}) {
        if (list->empty()) throw ConfigError("bench: parameter lists must be non-empty");
        for (auto v : *list) {
            if (v == 0) throw ConfigError("bench: parameters must be positive");
        }
    }
    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    for (auto m : a.m) {
        for (auto k : a.k) {
            for (auto t : a.t) {
                Rng rng(a.seed);
                Representations reprs(m);
                for (auto& r : reprs) r = uniform_draws(rng, k, -1.0, 1.0);
                const auto enum_cost = count_kernel_ops(KernelKind::enumeration, m, k, t).multiplies;
                const bool enum_ok = static_cast<double>(enum_cost) <= a.cap;

                // Cross-check before timing.
                const auto rec = interaction_recursion(reprs, t);
                if (enum_ok) {
                    const auto brute = enumerate_interactions(reprs, t);
                    for (std::size_t d = 0; d < k; ++d) {
                        const double ref = brute[d], got = rec.fi[t - 1][d];
                        if (std::abs(ref - got) > 1e-8 * std::max(1.0, std::abs(ref))) {
                            throw NumericError("bench: recursion and enumeration disagree at m=" + std::to_string(m) +
                                               " k=" + std::to_string(k) + " t=" + std::to_string(t));
                        }
                    }
                }
                for (auto kind : kinds) {
                    BenchRow row{kind, m, k, t, count_kernel_ops(kind, m, k, t).multiplies, std::nullopt, ""};
                    if (kind == KernelKind::enumeration && !enum_ok) {
                        row.note = "skipped: multiply count exceeds cap";
                        rows.push_back(row);
                        continue;
                    }
                    double sink = 0.0;
                    std::uint64_t counted = 0;
                    std::chrono::nanoseconds elapsed{0};
                    if (kind == KernelKind::crossnet) {
                        Rng wr(a.seed + 1);
                        const auto stack = CrossNetStack::init(m, k, t, wr);
                        const Tensor x = Tensor::from_values(1, m, uniform_draws(wr, m, -1.0, 1.0));
                        const auto start = clock::now();
                        for (std::size_t r = 0; r < a.reps; ++r) sink += crossnet_forward(x, stack).values()[0];
                        elapsed = clock::now() - start;
                    } else {
                        const auto start = clock::now();
                        for (std::size_t r = 0; r < a.reps; ++r) {
                            std::uint64_t c = 0;
                            if (kind == KernelKind::recursion) {
                                sink += interaction_recursion(reprs, t, &c).fi[t - 1][0];
                            } else {
                                sink += enumerate_interactions(reprs, t, &c)[0];
                            }
                            counted = c;
                        }
                        elapsed = clock::now() - start;
                        if (counted != row.multiplies) {
                            throw NumericError("bench: measured multiply count " + std::to_string(counted) +
                                               " differs from the cost model " + std::to_string(row.multiplies));
                        }
                    }
                    if (!std::isfinite(sink)) row.note = "non-finite output";
                    row.wall_ns = static_cast<double>(elapsed.count()) / static_cast<double>(a.reps);
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

inline void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& os) {
    os << "kernel,m,k,t,multiplies,wall_ns,note\n";
    for (const auto& r : rows) {
        os << to_string(r.kernel) << ',' << r.m << ',' << r.k << ',' << r.t << ',' << r.multiplies << ','
           << (r.wall_ns ? format_double(std::round(*r.wall_ns)) : "") << ',' << detail::csv_escape(r.note) << '\n';
    }
}

inline int cmd_bench(const BenchArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const auto rows = run_bench(a);
    std::ostringstream body;
    write_bench_csv(rows, body);
    if (a.out.empty() && !std::getenv(kOutDirEnv)) {
        out << body.str();
        return kExitOk;
    }
    const fs::path path = resolve_out_file(a.out.empty() ? "bench.csv" : a.out);
    write_text(path, body.str());
    RunManifest man{"bench", argv, {}, {a.seed}, path.parent_path().string(), {path}};
    man.write(fs::path(path.string() + ".manifest.json"));
    out << body.str();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Higher-order neural additive models: train, evaluate, interpret, audit"};
    app.require_subcommand(1);
    std::vector<std::string> args(argv, argv + argc);

    TrainArgs ta;
    auto* train_cmd = app.add_subcommand("train", "Train one model per seed and report test metrics");
    train_cmd->add_option("--data", ta.data, "CSV file")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--schema", ta.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--config", ta.config, "Run config JSON")->check(CLI::ExistingFile);
    train_cmd->add_option("--order", ta.order, "Interaction order (overrides config)")->check(CLI::PositiveNumber);
    train_cmd->add_option("--unit", ta.unit, "linear, exu or expdive")
        ->check(CLI::IsMember({"linear", "exu", "expdive"}));
    train_cmd->add_option("--epochs", ta.epochs, "Epochs (overrides config)")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seeds", ta.seeds, "Comma-separated seeds")->delimiter(',');
    train_cmd->add_option("--split-seed", ta.split_seed, "Fixed split seed (default: each run's seed)");
    train_cmd->add_option("--jobs", ta.jobs, "Parallel seed runs (default: hardware threads)");
    train_cmd->add_option("--out", ta.out, "Output directory")->required();

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a CSV file");
    eval_cmd->add_option("--model", ea.model, "Model file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--data", ea.data, "CSV file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--schema", ea.schema, "Schema JSON to check against the model")->check(CLI::ExistingFile);
    eval_cmd->add_option("--split", ea.split, "Rows to score: test (default), valid, train or all");
    eval_cmd->add_option("--out", ea.out, "Output directory for eval_metrics.csv");

    InterpretArgs ia;
    auto* interp_cmd = app.add_subcommand("interpret", "Export shape functions and local attributions");
    interp_cmd->add_option("--model", ia.model, "Model file")->required()->check(CLI::ExistingFile);
    interp_cmd->add_option("--feature", ia.feature, "Order-1 shape of this feature");
    interp_cmd->add_option("--pair", ia.pair, "Order-2 heat map of NAME,NAME");
    interp_cmd->add_option("--row", ia.row, "Local attribution of this data row");
    interp_cmd->add_option("--data", ia.data, "CSV file for --row")->check(CLI::ExistingFile);
    interp_cmd->add_option("--grid", ia.grid, "Grid points per feature")->check(CLI::Range(2, 100000));
    interp_cmd->add_option("--format", ia.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
    interp_cmd->add_option("--out", ia.out, "Output directory")->required();

    AblateArgs aa;
    auto* ablate_cmd = app.add_subcommand("ablate", "Zero out features and compare fairness before/after");
    ablate_cmd->add_option("--model", aa.model, "Model file")->required()->check(CLI::ExistingFile);
    ablate_cmd->add_option("--features", aa.features, "Comma-separated feature names")->delimiter(',');
    ablate_cmd->add_option("--data", aa.data, "CSV file")->required()->check(CLI::ExistingFile);
    ablate_cmd->add_option("--split", aa.split, "Rows to score: test (default), valid, train or all");
    ablate_cmd->add_option("--threshold", aa.threshold, "Probability cut for class 1")->check(CLI::Range(0.0, 1.0));
    ablate_cmd->add_option("--out-model", aa.out_model, "Path of the ablated model");
    ablate_cmd->add_option("--out", aa.out, "Output directory")->required();

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
    synth_cmd->add_option("--kind", sa.kind, "classification, regression, interaction or biased")
        ->required()
        ->check(CLI::IsMember({"classification", "regression", "interaction", "biased"}));
    synth_cmd->add_option("--seed", sa.seed, "Generator seed");
    synth_cmd->add_option("--rows", sa.rows, "Row count (interaction and biased only)")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--schema-out", sa.schema_out, "Also write the matching schema JSON");
    synth_cmd->add_option("--out", sa.out, "Output CSV")->required();

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Time interaction kernels and count multiplies");
    bench_cmd->add_option("--kernels", ba.kernels, "recursion,enumeration,crossnet")->delimiter(',');
    bench_cmd->add_option("--m", ba.m, "Feature counts")->delimiter(',');
    bench_cmd->add_option("--k", ba.k, "Representation widths")->delimiter(',');
    bench_cmd->add_option("--t", ba.t, "Orders")->delimiter(',');
    bench_cmd->add_option("--reps", ba.reps, "Calls per timing");
    bench_cmd->add_option("--cap", ba.cap, "Skip enumeration above this many multiplies");
    bench_cmd->add_option("--seed", ba.seed, "Input seed");
    bench_cmd->add_option("--out", ba.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*train_cmd) return cmd_train(ta, args, out);
        if (*eval_cmd) return cmd_eval(ea, args, out);
        if (*interp_cmd) return cmd_interpret(ia, args, out);
        if (*ablate_cmd) return cmd_ablate(aa, args, out);
        if (*synth_cmd) return cmd_synth(sa, args, out);
        if (*bench_cmd) return cmd_bench(ba, args, out);
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ContractError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DimensionError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace honam::cli
