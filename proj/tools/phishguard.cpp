// phishguard command-line tool.
//
// Exit codes: 0 success or benign, 1 operational error, 2 phishing detected.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phishguard/corpus.hpp"
#include "phishguard/governor.hpp"
#include "phishguard/harness.hpp"
#include "phishguard/manifest.hpp"
#include "phishguard/png_io.hpp"
#include "phishguard/report.hpp"
#include "phishguard/synthetic.hpp"
#include "phishguard/weight_file.hpp"

#ifndef PHISHGUARD_DATA_DIR
#define PHISHGUARD_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace phishguard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPhishing = 2;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("phishguard");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("PHISHGUARD_LOG")) {
        const std::string lv = env;
        if (lv == "error") spdlog::set_level(spdlog::level::err);
        else if (lv == "info") spdlog::set_level(spdlog::level::info);
        else if (lv == "debug") spdlog::set_level(spdlog::level::debug);
        else spdlog::warn("PHISHGUARD_LOG='{}' not understood; expected error, info or debug", lv);
    }
}

std::string read_text(const fs::path& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, std::string("cannot open ") + what + " " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
    out << text;
}

std::vector<int> parse_ints(const std::string& text, std::size_t n, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::invalid_argument, std::string(what) + " '" + text + "' is not a comma-separated integer list");
        }
    }
    if (out.size() != n)
        throw Error(ErrorCode::invalid_argument, std::string(what) + " needs " + std::to_string(n) + " integers");
    return out;
}

/// Paths shared by every model-using subcommand.
struct ModelPaths {
    std::string weights = std::string(PHISHGUARD_DATA_DIR) + "/crp_head.pgwt";
    std::string brands = std::string(PHISHGUARD_DATA_DIR) + "/brands.tsv";
    std::string blacklist;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--weights", weights, "CRP head weight file (PGWT)")->capture_default_str();
        cmd->add_option("--brands", brands, "reference brand list (name<TAB>domain,domain)")->capture_default_str();
        cmd->add_option("--blacklist", blacklist, "URL blacklist file");
    }
};

struct LoadedModels {
    BrandVocabulary vocab;
    Blacklist blacklist;
    CrpModel crp;
    CodebookBrandModel brand;

    EvalModels eval() const { return {brand, crp, vocab, blacklist, {}, {}}; }
};

LoadedModels load_models(const ModelPaths& p) {
    BrandVocabulary vocab = BrandVocabulary::from_file(p.brands);
    Blacklist bl = p.blacklist.empty() ? Blacklist{} : Blacklist::from_file(p.blacklist);
    CrpModel crp = CrpModel::from_weights(read_weight_file(p.weights));
    spdlog::info("loaded {} brands, {} blacklist entries, CRP head {} layers", vocab.size(), bl.size(), crp.spec.layers.size());
    CodebookBrandModel brand(vocab);
    return {std::move(vocab), std::move(bl), std::move(crp), std::move(brand)};
}

fs::path scene_sidecar(const fs::path& image) {
    fs::path p = image;
    p.replace_extension(".scene.json");
    return p;
}

SceneSpec load_scene(const fs::path& path) {
    try {
        return scene_from_json(Json::parse(read_text(path, "scene")));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
    }
}

// analyze

struct AnalyzeArgs {
    ModelPaths models;
    std::string image;
    std::string scene;
    std::string url;
    std::string roi;
    std::string scroll;
    std::uint64_t seed = 7;
    bool no_latency = false;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const LoadedModels m = load_models(a.models);
    const Image pixels = read_png(a.image);
    const fs::path scene_path = a.scene.empty() ? scene_sidecar(a.image) : fs::path(a.scene);
    const SyntheticDetector detector(a.seed, load_scene(scene_path));

    RegionOfInterest roi = RegionOfInterest::full(pixels);
    if (!a.roi.empty()) {
        const auto r = parse_ints(a.roi, 4, "--roi");
        roi.rect = {r[0], r[1], r[2], r[3]};
    }
    if (!a.scroll.empty()) {
        const auto s = parse_ints(a.scroll, 2, "--scroll");
        roi.scroll_dx = s[0];
        roi.scroll_dy = s[1];
    }
    Frame frame{pixels, 0.0, a.url.empty() ? std::nullopt : std::optional<std::string>(a.url)};
    const Verdict v = analyze(frame, roi, Models{detector, m.brand, m.crp}, m.vocab, m.blacklist);
    std::cout << verdict_to_json(v, !a.no_latency).dump() << "\n";
    spdlog::info("{} ({})", to_string(v.decision), to_string(v.matched_rule));
    return v.decision == Decision::phishing ? kExitPhishing : kExitOk;
}

// watch

struct WatchArgs {
    ModelPaths models;
    std::string dir;
    double interval = 1.0;
    double budget = 0.25;
    bool no_latency = false;
};

struct StreamFrame {
    std::size_t line = 0;
    std::string file;
    double timestamp = 0.0;
    std::optional<std::vector<int>> roi;
    std::vector<int> scroll{0, 0};
    std::optional<std::string> url;
    SceneSpec scene;
    std::uint64_t seed = 0;
};

std::vector<StreamFrame> read_sidecar(const fs::path& dir) {
    std::vector<StreamFrame> frames;
    const fs::path sidecar = dir / "frames.jsonl";
    if (!fs::exists(sidecar)) return frames;
    std::istringstream in(read_text(sidecar, "sidecar"));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const Json j = Json::parse(line);
            StreamFrame f;
            f.line = lineno;
            f.file = j.at("file").get<std::string>();
            f.timestamp = j.at("timestamp").get<double>();
            if (j.contains("roi")) f.roi = j.at("roi").get<std::vector<int>>();
            if (f.roi && f.roi->size() != 4) throw Error(ErrorCode::parse_error, "roi must be [left, top, right, bottom]");
            if (j.contains("scroll")) f.scroll = j.at("scroll").get<std::vector<int>>();
            if (f.scroll.size() != 2) throw Error(ErrorCode::parse_error, "scroll must be [dx, dy]");
            if (j.contains("url") && !j.at("url").is_null()) f.url = j.at("url").get<std::string>();
            if (j.contains("scene") && j.at("scene").is_object()) f.scene = scene_from_json(j.at("scene"));
            else if (j.contains("scene")) f.scene = load_scene(dir / j.at("scene").get<std::string>());
            else f.scene = load_scene(scene_sidecar(dir / f.file));
            f.seed = j.value("seed", static_cast<std::uint64_t>(lineno));
            frames.push_back(std::move(f));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::parse_error, sidecar.string() + " line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(ErrorCode::parse_error, sidecar.string() + " line " + std::to_string(lineno) + ": " + e.detail());
        }
    }
    return frames;
}

int cmd_watch(const WatchArgs& a) {
    if (!fs::is_directory(a.dir)) throw Error(ErrorCode::io_error, "stream directory " + a.dir + " does not exist");
    const std::vector<StreamFrame> frames = read_sidecar(a.dir);
    GovernorConfig gcfg{a.interval, a.budget};
    gcfg.validate();
    if (frames.empty()) {
        spdlog::info("no frames in {}", a.dir);
        return kExitOk;
    }
    const LoadedModels m = load_models(a.models);

    bool phishing = false;
    auto process = [&](const StreamFrame& f) {
        const Image pixels = read_png(fs::path(a.dir) / f.file);
        const SyntheticDetector detector(f.seed, f.scene);
        RegionOfInterest roi = RegionOfInterest::full(pixels);
        if (f.roi) roi.rect = {(*f.roi)[0], (*f.roi)[1], (*f.roi)[2], (*f.roi)[3]};
        roi.scroll_dx = f.scroll[0];
        roi.scroll_dy = f.scroll[1];
        const Verdict v = analyze(Frame{pixels, f.timestamp, f.url}, roi, Models{detector, m.brand, m.crp}, m.vocab,
                                  m.blacklist);
        phishing = phishing || v.decision == Decision::phishing;
        Json line{{"line", f.line}, {"file", f.file}, {"timestamp", f.timestamp}, {"verdict", verdict_to_json(v, !a.no_latency)}};
        std::cout << line.dump() << "\n" << std::flush;
        return v.decision;
    };
    const auto run = run_governed(std::span<const StreamFrame>(frames), gcfg, process,
                                  [](const StreamFrame& f) { return f.timestamp; });
    const auto& s = run.stats;
    Json summary{{"input", s.input},
                 {"processed", s.processed},
                 {"dropped", s.dropped},
                 {"budget_exceeded", s.budget_exceeded},
                 {"mean_processing", s.mean_processing},
                 {"idle_fraction", s.idle_fraction}};
    std::cerr << summary.dump() << "\n";
    return phishing ? kExitPhishing : kExitOk;
}

// evaluate

struct EvaluateArgs {
    ModelPaths models;
    std::string manifest;
    std::string images;
    std::string weights_f16;
    std::string out = "report";
    std::string thresholds;
    std::size_t jobs = 1;
    std::size_t roc_resolution = 0;
    bool render = false;
    bool log_roc = false;
};

FrameSource make_source(const std::string& images_dir, bool render, const BrandVocabulary& vocab) {
    if (render) {
        auto codebook = std::make_shared<BrandCodebook>(vocab.size());
        return [codebook, &vocab](const DatasetRecord& r) { return render_record(r, vocab, *codebook); };
    }
    return [images_dir](const DatasetRecord& r) { return read_png(fs::path(images_dir) / r.image); };
}

int cmd_evaluate(const EvaluateArgs& a) {
    const LoadedModels m = load_models(a.models);
    const auto records = read_manifest(a.manifest);
    const std::string images = a.images.empty() ? fs::path(a.manifest).parent_path().string() : a.images;
    const FrameSource source = make_source(images, a.render, m.vocab);
    MetricsConfig cfg;
    cfg.roc_resolution = a.roc_resolution;
    std::optional<Thresholds> thresholds;
    if (!a.thresholds.empty()) thresholds = Thresholds::from_file(a.thresholds);

    const fs::path out(a.out);
    EvaluationReport rep;
    std::optional<double> agreement;
    if (!a.weights_f16.empty()) {
        const CrpModel f16 = CrpModel::from_weights(read_weight_file(a.weights_f16));
        QuantizationComparison q = compare_quantization(records, source, m.eval(), f16, cfg, a.jobs);
        write_evaluation(out / "f16", q.f16);
        write_text(out / "deltas.csv", deltas_csv(q));
        write_text(out / "agreement.csv", "metric,value\nagreement," + detail::fmt_double(q.agreement) + "\n");
        agreement = q.agreement;
        rep = std::move(q.f32);
    } else {
        rep = evaluate_dataset(records, source, m.eval(), cfg, a.jobs);
    }
    write_evaluation(out, rep);
    if (rep.roc && a.log_roc) write_text(out / "roc_log.svg", roc_svg(*rep.roc, true));
    {
        std::string lines;
        for (std::size_t i = 0; i < rep.verdicts.size(); ++i) {
            Json j{{"image", records[i].image}, {"label", std::string(to_string(records[i].verdict))}};
            j["verdict"] = verdict_to_json(rep.verdicts[i], false);
            lines += j.dump() + "\n";
        }
        write_text(out / "verdicts.jsonl", lines);
    }

    std::cerr << metrics_csv(rep);
    if (agreement) std::cerr << "agreement," << detail::fmt_double(*agreement) << "\n";
    if (thresholds) {
        const auto bad = thresholds->violations(rep, agreement);
        for (const auto& v : bad) spdlog::error("threshold violated: {}", v);
        if (!bad.empty()) return kExitError;
    }
    return kExitOk;
}

// quantize

struct QuantizeArgs {
    std::string in;
    std::string out;
    std::string dtype = "f16";
};

int cmd_quantize(const QuantizeArgs& a) {
    const WeightStore src = read_weight_file(a.in);
    DType target;
    if (a.dtype == "f16") target = DType::f16;
    else if (a.dtype == "f32") target = DType::f32;
    else throw Error(ErrorCode::invalid_argument, "--dtype must be f16 or f32");
    const WeightStore q = quantize(src, target);
    write_weight_file(a.out, q);
    const auto in_size = fs::file_size(a.in), out_size = fs::file_size(a.out);
    std::cerr << a.in << ": " << in_size << " bytes -> " << a.out << ": " << out_size << " bytes ("
              << detail::fmt_double(100.0 * static_cast<double>(out_size) / static_cast<double>(in_size)) << "%)\n";
    return kExitOk;
}

// bench

struct BenchArgs {
    ModelPaths models;
    std::string manifest;
    std::string images;
    std::string out;
    std::size_t warmup = 5;
    std::size_t iterations = 100;
    bool render = false;
};

int cmd_bench(const BenchArgs& a) {
    const LoadedModels m = load_models(a.models);
    const auto records = read_manifest(a.manifest);
    const std::string images = a.images.empty() ? fs::path(a.manifest).parent_path().string() : a.images;
    const BenchReport b = bench_throughput(records, make_source(images, a.render, m.vocab), m.eval(), a.warmup, a.iterations);
    auto lat = [](const LatencySummary& l) { return Json{{"mean", l.mean}, {"p50", l.p50}, {"p95", l.p95}, {"max", l.max}}; };
    Json j{{"samples", b.samples},
           {"wall_seconds", b.wall_seconds},
           {"samples_per_second", b.samples_per_second},
           {"latency", lat(b.latency)},
           {"stages", Json{{"detect", lat(b.stages.detect)}, {"brand", lat(b.stages.brand)}, {"crp", lat(b.stages.crp)}}},
           {"peak_rss_kib", b.peak_rss_kib ? Json(*b.peak_rss_kib) : Json("unavailable")}};
    std::cout << j.dump(2) << "\n";
    if (!a.out.empty()) write_text(fs::path(a.out) / "bench.json", j.dump(2) + "\n");
    return kExitOk;
}

// gen-fixtures

struct GenArgs {
    std::string out = "fixtures";
    std::uint64_t seed = 7;
    std::size_t pages = 1000;
    std::size_t brands = 277;
    std::string kind = "separable";
    std::size_t stream_frames = 60;
    std::string features;
    std::size_t feature_samples = 0;
    bool no_images = false;
};

CorpusKind parse_kind(const std::string& k) {
    if (k == "separable") return CorpusKind::separable;
    if (k == "adversarial") return CorpusKind::adversarial;
    throw Error(ErrorCode::invalid_argument, "--kind must be separable or adversarial");
}

/// Features and CRP labels for training a CRP head offline.
void dump_features(const fs::path& path, std::size_t samples, std::uint64_t seed, CorpusKind kind,
                   const BrandVocabulary& vocab) {
    CorpusConfig cfg;
    cfg.pages = samples;
    cfg.seed = seed;
    cfg.kind = kind;
    const Corpus corpus = generate_corpus(cfg, vocab);
    const DetectorCapacity cap{};
    std::vector<float> features, labels;
    features.reserve(samples * cap.flat_size());
    const Image blank(kDefaultCanvas.width, kDefaultCanvas.height, palette::kBackground);
    for (const auto& r : corpus.records) {
        const SyntheticDetector det(r.seed, r.scene(), r.detector);
        const auto f = det.extract_features(blank);
        features.insert(features.end(), f.tensor().data().begin(), f.tensor().data().end());
        labels.push_back(r.crp ? 1.0f : 0.0f);
    }
    WeightStore store;
    store.insert("features", Tensor({samples, cap.slots, cap.hidden}, std::move(features)));
    store.insert("labels", Tensor({samples}, std::move(labels)));
    write_weight_file(path, store);
}

int cmd_gen_fixtures(const GenArgs& a) {
    const fs::path out(a.out);
    fs::create_directories(out);
    const BrandVocabulary vocab = make_vocabulary(a.brands);
    const BrandCodebook codebook(vocab.size());
    write_text(out / "brands.tsv", vocab.to_text());

    CorpusConfig cfg;
    cfg.pages = a.pages;
    cfg.seed = a.seed;
    cfg.kind = parse_kind(a.kind);
    const Corpus corpus = generate_corpus(cfg, vocab);
    write_text(out / "manifest.jsonl", write_manifest(corpus.records));
    std::string bl = "# hosts and domains reported by users\n";
    for (const auto& l : corpus.blacklist_lines) bl += l + "\n";
    write_text(out / "blacklist.txt", bl);
    spdlog::info("{} records, {} blacklist entries", corpus.records.size(), corpus.blacklist_lines.size());

    if (!a.no_images) {
        fs::create_directories(out / "pages");
        for (const auto& r : corpus.records) write_png(out / r.image, render_record(r, vocab, codebook));
    }

    // Single-page analyze fixtures, rendered at canvas size.
    fs::create_directories(out / "single");
    const auto dhl = *vocab.find("DHL");
    auto write_single = [&](const std::string& name, const SceneSpec& scene) {
        write_png(out / "single" / (name + ".png"),
                  render_page(scene, vocab, codebook, kDefaultCanvas.width, kDefaultCanvas.height));
        write_text(out / "single" / (name + ".scene.json"), scene_to_json(scene).dump(2) + "\n");
    };
    Rng rng(mix_seed(a.seed, 77));
    write_single("login", {page_layout(rng, CorpusKind::separable, true, true), true, dhl.name});
    write_single("landing", {page_layout(rng, CorpusKind::separable, true, false), false, dhl.name});
    write_single("nologo", {page_layout(rng, CorpusKind::separable, false, true), true, std::nullopt});

    // Replay stream at 30 FPS cycling over a few pages.
    if (a.stream_frames > 0) {
        fs::create_directories(out / "stream");
        const std::size_t distinct = std::min<std::size_t>(4, corpus.records.size());
        std::string lines;
        for (std::size_t i = 0; i < distinct; ++i) {
            const auto& r = corpus.records[i];
            write_png(out / "stream" / ("frame_" + std::to_string(i) + ".png"), render_record(r, vocab, codebook));
        }
        for (std::size_t k = 0; k < a.stream_frames && distinct > 0; ++k) {
            const std::size_t page = (k / 15) % distinct;
            const auto& r = corpus.records[page];
            Json j{{"file", "frame_" + std::to_string(page) + ".png"},
                   {"timestamp", static_cast<double>(k) / 30.0},
                   {"roi", Json::array({r.roi.rect.left, r.roi.rect.top, r.roi.rect.right, r.roi.rect.bottom})},
                   {"scroll", Json::array({r.roi.scroll_dx, r.roi.scroll_dy})},
                   {"url", r.url ? Json(*r.url) : Json(nullptr)},
                   {"scene", scene_to_json(r.scene())},
                   {"seed", r.seed}};
            lines += j.dump() + "\n";
        }
        write_text(out / "stream" / "frames.jsonl", lines);
    }

    if (!a.features.empty()) {
        const std::size_t n = a.feature_samples ? a.feature_samples : a.pages;
        dump_features(a.features, n, a.seed, cfg.kind, vocab);
        spdlog::info("wrote {} feature samples to {}", n, a.features);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Screenshot-based phishing detection"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "analyze one screenshot and print the verdict as JSON");
    an.models.add_to(analyze_cmd);
    analyze_cmd->add_option("--image", an.image, "PNG screenshot")->required();
    analyze_cmd->add_option("--scene", an.scene, "planted scene for the synthetic detector (default: <image>.scene.json)");
    analyze_cmd->add_option("--url", an.url, "page URL");
    analyze_cmd->add_option("--roi", an.roi, "web area as left,top,right,bottom (default: whole image)");
    analyze_cmd->add_option("--scroll", an.scroll, "scroll offset dx,dy");
    analyze_cmd->add_option("--seed", an.seed, "detector seed")->capture_default_str();
    analyze_cmd->add_flag("--no-latency", an.no_latency, "omit wall-clock latencies from the output");

    WatchArgs wa;
    auto* watch_cmd = app.add_subcommand("watch", "replay a frame stream under the frame governor");
    wa.models.add_to(watch_cmd);
    watch_cmd->add_option("dir", wa.dir, "stream directory with frames.jsonl")->required();
    watch_cmd->add_option("--interval", wa.interval, "seconds between processed frames")->capture_default_str();
    watch_cmd->add_option("--budget", wa.budget, "per-frame processing budget in seconds")->capture_default_str();
    watch_cmd->add_flag("--no-latency", wa.no_latency, "omit wall-clock latencies from the output");

    EvaluateArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a manifest and write metric reports");
    ev.models.add_to(eval_cmd);
    eval_cmd->add_option("--manifest", ev.manifest, "JSON-lines manifest")->required();
    eval_cmd->add_option("--images", ev.images, "image root (default: manifest directory)");
    eval_cmd->add_option("--weights-f16", ev.weights_f16, "second CRP head to compare against --weights");
    eval_cmd->add_option("--out", ev.out, "report directory")->capture_default_str();
    eval_cmd->add_option("--thresholds", ev.thresholds, "JSON file of metric bounds; exit 1 on violation");
    eval_cmd->add_option("--jobs", ev.jobs, "worker threads")->capture_default_str();
    eval_cmd->add_option("--roc-resolution", ev.roc_resolution, "ROC threshold grid size (0: every distinct score)");
    eval_cmd->add_flag("--render", ev.render, "synthesize frames from the records instead of reading PNGs");
    eval_cmd->add_flag("--log-roc", ev.log_roc, "also write roc_log.svg with a logarithmic fpr axis");

    QuantizeArgs qa;
    auto* quant_cmd = app.add_subcommand("quantize", "convert a weight file between f32 and f16");
    quant_cmd->add_option("--in", qa.in, "input weight file")->required();
    quant_cmd->add_option("--out", qa.out, "output weight file")->required();
    quant_cmd->add_option("--dtype", qa.dtype, "target dtype (f16 or f32)")->capture_default_str();

    BenchArgs be;
    auto* bench_cmd = app.add_subcommand("bench", "measure analyze throughput over a manifest");
    be.models.add_to(bench_cmd);
    bench_cmd->add_option("--manifest", be.manifest, "JSON-lines manifest")->required();
    bench_cmd->add_option("--images", be.images, "image root (default: manifest directory)");
    bench_cmd->add_option("--out", be.out, "directory for bench.json");
    bench_cmd->add_option("--warmup", be.warmup, "untimed calls")->capture_default_str();
    bench_cmd->add_option("--iterations", be.iterations, "timed calls")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_flag("--render", be.render, "synthesize frames from the records instead of reading PNGs");

    GenArgs ga;
    auto* gen_cmd = app.add_subcommand("gen-fixtures", "generate a seeded synthetic corpus");
    gen_cmd->add_option("--out", ga.out, "output directory")->capture_default_str();
    gen_cmd->add_option("--seed", ga.seed, "corpus seed")->capture_default_str();
    gen_cmd->add_option("--pages", ga.pages, "number of pages")->capture_default_str();
    gen_cmd->add_option("--brands", ga.brands, "reference brands")->capture_default_str();
    gen_cmd->add_option("--kind", ga.kind, "separable or adversarial")->capture_default_str();
    gen_cmd->add_option("--stream-frames", ga.stream_frames, "frames in the 30 FPS replay stream")->capture_default_str();
    gen_cmd->add_option("--features", ga.features, "also dump CRP training features to this PGWT file");
    gen_cmd->add_option("--feature-samples", ga.feature_samples, "feature samples (default: --pages)");
    gen_cmd->add_flag("--no-images", ga.no_images, "skip writing page PNGs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(an);
        if (*watch_cmd) return cmd_watch(wa);
        if (*eval_cmd) return cmd_evaluate(ev);
        if (*quant_cmd) return cmd_quantize(qa);
        if (*bench_cmd) return cmd_bench(be);
        if (*gen_cmd) return cmd_gen_fixtures(ga);
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitError;
    }
    return kExitError;
}
