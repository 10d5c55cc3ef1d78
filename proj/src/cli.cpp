#include "debunk/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "debunk/analysis.hpp"
#include "debunk/corpus.hpp"
#include "debunk/digest.hpp"
#include "debunk/errors.hpp"
#include "debunk/evaluation.hpp"
#include "debunk/generation.hpp"
#include "debunk/http_backend.hpp"
#include "debunk/mock_backend.hpp"
#include "debunk/report.hpp"
#include "debunk/run_dir.hpp"

namespace debunk {

namespace fs = std::filesystem;

namespace {

struct Common {
    std::string run_dir;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string backend;
    std::string mock_jitter;
    std::optional<int> workers;
};

struct IngestArgs {
    std::string input;
    std::string keywords_file;
    std::string match_field;
    bool allow_unreviewed = false;
};

struct GenerateArgs {
    std::string corpus;
    std::string model;
    std::string profiles = "all";
    std::optional<std::size_t> limit;
    std::optional<std::size_t> max_context_chars;
    bool resume = false;
};

struct EvaluateArgs {
    std::string corpus;
    std::string verdicts;
    std::string judge_model;
    std::string tailor_model;
    std::string judges = "all";
    std::optional<std::size_t> limit;
    bool resume = false;
};

struct AnalyzeArgs {
    std::vector<std::string> judgments;
    std::string judge_model;
    bool html = false;
};

struct ReportArgs {
    std::vector<std::string> analyses;
    bool html = false;
};

// Everything a phase command needs after flags and config are merged.
struct Context {
    fs::path dir;
    RunConfig cfg;
    bool mock = false;
    bool jitter = true;
    int workers = 8;
    Clock clock;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--run-dir,--out", c.run_dir, "Run directory")->required();
    sub->add_option("--config", c.config, "JSON config file");
    sub->add_option("--seed", c.seed, "Seed for mismatched-partner sampling");
    sub->add_option("--backend", c.backend, "Model backend")->check(CLI::IsMember({"http", "mock"}));
    sub->add_option("--mock-jitter", c.mock_jitter, "Judge jitter of the mock backend")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--workers", c.workers, "Concurrent model calls")->check(CLI::Range(1, 256));
}

Context make_context(const Common& c) {
    Context ctx;
    ctx.dir = c.run_dir;
    if (!c.config.empty()) ctx.cfg = load_config(c.config);
    const auto kind = !c.backend.empty() ? c.backend : !ctx.cfg.backend_kind.empty() ? ctx.cfg.backend_kind : "http";
    ctx.mock = kind == "mock";
    ctx.jitter = c.mock_jitter.empty() ? ctx.cfg.mock_jitter : c.mock_jitter == "on";
    ctx.workers = c.workers.value_or(ctx.cfg.max_in_flight);
    ctx.clock = run_clock(ctx.mock);
    return ctx;
}

std::shared_ptr<ChatClient> make_client(const Context& ctx) {
    std::shared_ptr<ChatBackend> backend;
    if (ctx.mock) {
        backend = std::make_shared<MockBackend>(MockConfig{MockRule::Auto, ctx.jitter});
    } else {
        if (ctx.cfg.backend_url.empty()) throw InputError("backend.url is not configured (use --config)");
        HttpBackendConfig hc;
        hc.url = ctx.cfg.backend_url;
        hc.timeout = std::chrono::seconds(ctx.cfg.timeout_s);
        if (!ctx.cfg.api_key_env.empty()) {
            const char* key = std::getenv(ctx.cfg.api_key_env.c_str());
            if (!key || !*key) throw InputError("environment variable " + ctx.cfg.api_key_env + " is not set");
            hc.api_key = key;
        }
        backend = std::make_shared<HttpBackend>(std::move(hc));
    }
    ClientConfig cc;
    cc.max_in_flight = ctx.cfg.max_in_flight;
    cc.max_attempts = ctx.cfg.max_attempts;
    cc.base_delay_ms = ctx.cfg.base_delay_ms;
    cc.max_delay_ms = ctx.cfg.max_delay_ms;
    auto cache = std::make_shared<ResponseCache>(ctx.dir / "cache");
    return std::make_shared<ChatClient>(std::move(backend), std::move(cache), cc);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StoreIoError("cannot create run directory " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw MissingPrerequisite(what + " not found: " + p.string());
}

std::vector<TraitProfile> parse_profiles(const std::string& spec) {
    if (spec == "all") return all_profiles();
    std::vector<TraitProfile> out;
    std::set<unsigned> seen;
    std::stringstream ss(spec);
    std::string code;
    while (std::getline(ss, code, ',')) {
        const auto p = TraitProfile::from_code(code);
        if (seen.insert(p.index()).second) out.push_back(p);
    }
    if (out.empty()) throw InputError("empty profile list");
    return out;
}

bool is_backend_class(const std::string& cls) {
    return cls == "BackendExhausted" || cls == "Fatal" || cls == "Transient" || cls == "EmptyCompletion";
}

OrderedJson failures_json(const std::vector<ItemFailure>& failures) {
    auto arr = OrderedJson::array();
    for (const auto& f : failures) {
        arr.push_back({{"claim_id", f.claim_id},
                       {"profile", f.profile},
                       {"detail", f.detail},
                       {"error_class", f.error_class},
                       {"message", f.message}});
    }
    return arr;
}

// Writes the failure list next to the store and reports them on `err`.
// Returns the exit status the failures imply.
int settle_failures(const std::vector<ItemFailure>& failures, const fs::path& file, RunManifest& m,
                    const std::string& phase, std::ostream& err) {
    const auto rel = file.filename().string();
    if (failures.empty()) {
        std::error_code ec;
        fs::remove(file, ec);
        return kExitOk;
    }
    write_file_atomic(file, failures_json(failures).dump(2) + "\n");
    m.add_output(rel, phase);
    bool backend = false;
    for (const auto& f : failures) {
        err << "debunk: warning: " << phase << " failed for (" << f.claim_id << ", " << f.profile
            << (f.detail.empty() ? "" : ", " + f.detail) << "): " << f.error_class << "\n";
        backend = backend || is_backend_class(f.error_class);
    }
    if (backend) {
        throw BackendExhausted(std::to_string(failures.size()) + " " + phase + " item(s) failed; see " + file.string(),
                               0);
    }
    return kExitOk;
}

fs::path resolve_corpus(const Context& ctx, const std::string& flag) {
    const fs::path p = flag.empty() ? ctx.dir / "corpus.jsonl" : fs::path(flag);
    require_file(p, "corpus");
    return p;
}

void check_resume(std::size_t existing, bool resume, const fs::path& store) {
    if (existing > 0 && !resume) {
        throw InputError(store.string() + " already holds " + std::to_string(existing) +
                         " records; pass --resume to continue it");
    }
}

std::vector<std::string> read_keywords(const fs::path& p) {
    if (!fs::exists(p)) throw InputError("keywords file not found: " + p.string());
    std::vector<std::string> out;
    std::stringstream ss(read_file(p));
    std::string line;
    while (std::getline(ss, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

int cmd_ingest(const Common& c, const IngestArgs& a, std::ostream& out, std::ostream& err) {
    auto ctx = make_context(c);
    if (!fs::exists(a.input)) throw InputError("input file not found: " + a.input);
    auto fc = ctx.cfg.filter.value_or(FilterConfig::defaults());
    std::string keyword_source = ctx.cfg.filter ? "config" : "default";
    std::optional<std::string> keywords_digest;
    if (!a.keywords_file.empty()) {
        fc.exclusion_keywords = read_keywords(a.keywords_file);
        keyword_source = "file";
        keywords_digest = sha256_hex(read_file(a.keywords_file));
    }
    if (!a.match_field.empty()) {
        auto mf = parse_match_field(a.match_field);
        if (!mf) throw InputError("unknown --match-field \"" + a.match_field + "\"");
        fc.match_field = *mf;
    }
    fc.validate();
    const auto records = load_corpus(a.input);

    ensure_dir(ctx.dir);
    RunLock lock(ctx.dir);
    RunManifest m(ctx.dir, ctx.clock);
    m.resolve_seed(c.seed, ctx.cfg.seed.value_or(0));
    m.save();

    auto result = filter_debunked(records, fc);
    std::vector<ClaimRecord> corpus;
    std::vector<ClaimRecord> review;
    for (auto& r : result.kept) {
        if (r.label == Label::Unreviewed && !a.allow_unreviewed) {
            review.push_back(r);
            continue;
        }
        r.label = Label::Debunked;
        corpus.push_back(r);
    }

    write_corpus(ctx.dir / "corpus.jsonl", corpus);
    m.add_output("corpus.jsonl", "ingest");
    m.set_corpus(ctx.dir / "corpus.jsonl");
    if (!review.empty()) {
        write_corpus(ctx.dir / "review_queue.jsonl", review);
        m.add_output("review_queue.jsonl", "ingest");
    }

    OrderedJson rep;
    rep["input"] = fs::absolute(a.input).generic_string();
    rep["input_digest"] = sha256_hex(read_file(a.input));
    rep["match_field"] = std::string(to_string(fc.match_field));
    rep["keywords"] = fc.exclusion_keywords;
    rep["keywords_source"] = keyword_source;
    rep["keywords_file"] = a.keywords_file.empty() ? OrderedJson(nullptr) : OrderedJson(a.keywords_file);
    rep["keywords_digest"] = keywords_digest ? OrderedJson(*keywords_digest) : OrderedJson(nullptr);
    rep["keywords_note"] = "heuristic exclusion list, case-insensitive substring match";
    rep["total"] = records.size();
    rep["kept"] = result.kept.size();
    rep["excluded"] = result.excluded.size();
    rep["excluded_by_label"] = result.confirmed_label;
    rep["unreviewed"] = result.unreviewed;
    rep["unreviewed_promoted"] = a.allow_unreviewed;
    rep["corpus_records"] = corpus.size();
    rep["review_queue"] = review.size();
    OrderedJson hits = OrderedJson::object();
    for (const auto& k : fc.exclusion_keywords) {
        std::string lower(k);
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        const auto it = result.keyword_hits.find(lower);
        hits[k] = it == result.keyword_hits.end() ? 0 : it->second;
    }
    rep["keyword_hits"] = std::move(hits);
    const auto stats = corpus_stats(records);
    rep["per_label"] = stats.per_label;
    rep["per_topic"] = stats.per_topic;
    write_file_atomic(ctx.dir / "filter_report.json", rep.dump(2) + "\n");
    m.add_output("filter_report.json", "ingest");

    m.set_phase("ingest", {{"input_digest", rep["input_digest"]}, {"records", corpus.size()}}, true);
    m.save();
    out << "ingest: " << records.size() << " read, " << corpus.size() << " kept, " << result.excluded.size()
        << " excluded";
    if (!review.empty()) out << ", " << review.size() << " awaiting review";
    out << "\n";
    if (!review.empty()) {
        err << "debunk: warning: " << review.size()
            << " unreviewed record(s) held in review_queue.jsonl; re-run with --allow-unreviewed to include them\n";
    }
    if (corpus.empty()) throw InputError("no records left after filtering " + a.input);
    return kExitOk;
}

int cmd_generate(const Common& c, const GenerateArgs& a, std::ostream& out, std::ostream& err) {
    auto ctx = make_context(c);
    const auto corpus_path = resolve_corpus(ctx, a.corpus);
    const auto corpus = load_corpus(corpus_path);
    const auto profiles = parse_profiles(a.profiles);
    std::string model = !a.model.empty() ? a.model : ctx.cfg.model;
    if (model.empty()) {
        if (!ctx.mock) throw InputError("no tailoring model; pass --model or set backend.model");
        model = "mock-tailor";
    }

    ensure_dir(ctx.dir);
    RunLock lock(ctx.dir);
    RunManifest m(ctx.dir, ctx.clock);
    m.resolve_seed(c.seed, ctx.cfg.seed.value_or(0));
    auto client = make_client(ctx);
    m.set_backend(ctx.mock ? "mock" : "http", client->backend_url());
    m.set_corpus(corpus_path);
    const auto store_path = ctx.dir / "verdicts.jsonl";
    m.add_output("verdicts.jsonl", "generate");
    m.add_output("cache/", "generate");
    m.save();

    VerdictStore store(store_path);
    check_resume(store.size(), a.resume, store_path);

    GenerationOptions opts;
    opts.model_id = model;
    opts.workers = ctx.workers;
    opts.clock = ctx.clock;
    opts.limit = a.limit;
    opts.max_context_chars = a.max_context_chars.value_or(ctx.cfg.max_context_chars.value_or(kDefaultMaxContextChars));
    const auto s = run_generation(corpus, profiles, *client, store, opts);

    for (const auto& leak : s.leaks) {
        std::string words;
        for (const auto& d : leak.descriptors) words += (words.empty() ? "" : ", ") + d;
        err << "debunk: warning: verdict (" << leak.claim_id << ", " << leak.profile << ") mentions " << words << "\n";
    }
    const auto counters = client->counters();
    OrderedJson info{{"model", model},
                     {"profiles", profiles.size()},
                     {"claims", corpus.size()},
                     {"generated", s.generated},
                     {"skipped", s.skipped},
                     {"failed", s.failed},
                     {"not_attempted", s.not_attempted},
                     {"descriptor_leaks", s.leaks.size()},
                     {"live_calls", counters.live_calls},
                     {"cache_hits", counters.cache_hits}};
    m.set_phase("generate", std::move(info), s.failed == 0 && s.not_attempted == 0);
    out << "generate: " << s.generated << " generated, " << s.skipped << " skipped, " << s.failed << " failed";
    if (s.not_attempted) out << ", " << s.not_attempted << " pending";
    out << "\n";
    try {
        settle_failures(s.failures, ctx.dir / "failures.generate.json", m, "generate", err);
    } catch (...) {
        m.save();
        throw;
    }
    m.save();
    return kExitOk;
}

int cmd_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    auto ctx = make_context(c);
    const auto corpus_path = resolve_corpus(ctx, a.corpus);
    const fs::path verdicts_path = a.verdicts.empty() ? ctx.dir / "verdicts.jsonl" : fs::path(a.verdicts);
    require_file(verdicts_path, "verdict store");
    const auto corpus = load_corpus(corpus_path);
    const auto verdicts = load_verdicts(verdicts_path);
    const auto judges = parse_profiles(a.judges);
    std::string judge_model = !a.judge_model.empty()     ? a.judge_model
                              : !ctx.cfg.judge_model.empty() ? ctx.cfg.judge_model
                                                             : ctx.cfg.model;
    if (judge_model.empty()) {
        if (!ctx.mock) throw InputError("no judge model; pass --judge-model or set backend.judge_model");
        judge_model = "mock-judge";
    }

    ensure_dir(ctx.dir);
    RunLock lock(ctx.dir);
    RunManifest m(ctx.dir, ctx.clock);
    const auto seed = m.resolve_seed(c.seed, ctx.cfg.seed.value_or(0));
    const auto tasks = plan_evaluations(corpus, verdicts, judges, seed,
                                        a.tailor_model.empty() ? std::nullopt : std::optional(a.tailor_model));
    auto client = make_client(ctx);
    m.set_backend(ctx.mock ? "mock" : "http", client->backend_url());
    const auto store_name = "judgments." + file_safe(judge_model) + ".jsonl";
    m.add_output(store_name, "evaluate");
    m.add_output("cache/", "generate");
    m.save();

    JudgmentStore store(ctx.dir / store_name);
    check_resume(store.size(), a.resume, store.path());

    EvaluationOptions opts;
    opts.judge_model_id = judge_model;
    opts.workers = ctx.workers;
    opts.limit = a.limit;
    const auto s = run_evaluation(tasks, *client, store, opts);

    const auto counters = client->counters();
    OrderedJson info{{"judge_model", judge_model},
                     {"seed", seed},
                     {"mock_jitter", ctx.mock ? OrderedJson(ctx.jitter) : OrderedJson(nullptr)},
                     {"mismatched_plan", "one close and one distant partner per (judge, claim), drawn from the seed"},
                     {"tasks", tasks.size()},
                     {"scored", s.scored},
                     {"skipped", s.skipped},
                     {"failed", s.failed},
                     {"reasked", s.reasked},
                     {"not_attempted", s.not_attempted},
                     {"live_calls", counters.live_calls},
                     {"cache_hits", counters.cache_hits}};
    OrderedJson evals = m.json().at("phases").contains("evaluate") ? m.json().at("phases").at("evaluate")
                                                                   : OrderedJson::object();
    evals.erase("completed");
    evals.erase("updated_at");
    evals[judge_model] = std::move(info);
    bool all_done = true;
    const bool this_done = s.failed == 0 && s.not_attempted == 0;
    evals[judge_model]["completed"] = this_done;
    for (const auto& [k, v] : evals.items()) all_done = all_done && v.value("completed", false);
    m.set_phase("evaluate", std::move(evals), all_done);

    out << "evaluate: " << s.scored << " scored, " << s.skipped << " skipped, " << s.failed << " failed, "
        << s.reasked << " re-asked";
    if (s.not_attempted) out << ", " << s.not_attempted << " pending";
    out << "\n";
    try {
        settle_failures(s.failures, ctx.dir / ("failures.evaluate." + file_safe(judge_model) + ".json"), m,
                        "evaluate", err);
    } catch (...) {
        m.save();
        throw;
    }
    m.save();
    return kExitOk;
}

std::vector<fs::path> run_files(const fs::path& dir, std::string_view prefix, std::string_view suffix) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > prefix.size() + suffix.size() && name.starts_with(prefix) &&
            name.ends_with(suffix)) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void register_report(RunManifest& m, const std::vector<fs::path>& files) {
    for (const auto& f : files) m.add_output(fs::relative(f, m.dir()).generic_string(), "report");
}

int cmd_analyze(const Common& c, const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
    auto ctx = make_context(c);
    std::vector<fs::path> inputs(a.judgments.begin(), a.judgments.end());
    if (inputs.empty()) inputs = run_files(ctx.dir, "judgments.", ".jsonl");
    if (inputs.empty()) throw MissingPrerequisite("no judgment store found: " + (ctx.dir / "judgments.<model>.jsonl").string());

    std::map<std::string, std::vector<Judgment>> by_model;
    for (const auto& p : inputs) {
        require_file(p, "judgment store");
        for (auto& j : load_judgments(p)) by_model[j.judge_model_id].push_back(std::move(j));
    }
    if (!a.judge_model.empty()) {
        if (!by_model.contains(a.judge_model)) {
            throw MissingPrerequisite("no judgments from model " + a.judge_model);
        }
        std::erase_if(by_model, [&](const auto& kv) { return kv.first != a.judge_model; });
    }
    if (by_model.empty()) throw InputError("judgment stores are empty");

    std::vector<AnalysisReport> reports;
    for (const auto& [model, judgments] : by_model) {
        reports.push_back(analyze(judgments, model));
        if (reports.back().dropped_groups > 0) {
            err << "debunk: warning: " << model << ": dropped " << reports.back().dropped_groups
                << " incomplete (claim, judge) group(s)\n";
        }
    }

    ensure_dir(ctx.dir);
    RunLock lock(ctx.dir);
    RunManifest m(ctx.dir, ctx.clock);
    std::vector<std::string> written;
    for (const auto& r : reports) {
        const auto name = "analysis." + file_safe(r.judge_model_id) + ".json";
        m.add_output(name, "analyze");
        written.push_back(name);
    }
    m.save();
    for (const auto& r : reports) {
        write_file_atomic(ctx.dir / ("analysis." + file_safe(r.judge_model_id) + ".json"), to_json(r).dump(2) + "\n");
    }
    register_report(m, write_report(ctx.dir / "report", reports, a.html));
    OrderedJson models = OrderedJson::array();
    for (const auto& r : reports) {
        models.push_back({{"judge_model", r.judge_model_id},
                          {"observations", r.observations},
                          {"dropped_groups", r.dropped_groups}});
    }
    m.set_phase("analyze", {{"models", std::move(models)}}, true);
    m.save();
    for (const auto& r : reports) {
        out << "analyze: " << r.judge_model_id << ": " << r.observations << " observations, Accuracy_p "
            << r.accuracy.accuracy_p << ", Accuracy_cn " << r.accuracy.accuracy_cn << "\n";
    }
    return kExitOk;
}

int cmd_report(const Common& c, const ReportArgs& a, std::ostream& out, std::ostream&) {
    auto ctx = make_context(c);
    std::vector<fs::path> inputs(a.analyses.begin(), a.analyses.end());
    if (inputs.empty()) inputs = run_files(ctx.dir, "analysis.", ".json");
    if (inputs.empty()) throw MissingPrerequisite("no analysis found: " + (ctx.dir / "analysis.<model>.json").string());
    std::vector<AnalysisReport> reports;
    for (const auto& p : inputs) {
        require_file(p, "analysis");
        Json j;
        try {
            j = Json::parse(read_file(p));
        } catch (const Json::exception& e) {
            throw MalformedArtifact(p.string() + ": " + e.what());
        }
        try {
            reports.push_back(analysis_from_json(j));
        } catch (const MalformedArtifact& e) {
            throw MalformedArtifact(p.string() + ": " + e.what());
        }
    }

    ensure_dir(ctx.dir);
    RunLock lock(ctx.dir);
    RunManifest m(ctx.dir, ctx.clock);
    const auto files = write_report(ctx.dir / "report", reports, a.html);
    register_report(m, files);
    m.set_phase("report", {{"models", reports.size()}, {"html", a.html}}, true);
    m.save();
    for (const auto& f : files) out << "report: " << f.string() << "\n";
    return kExitOk;
}

std::string one_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

}  // namespace

std::string error_line(std::string_view cls, std::string_view message) {
    return "debunk: error[" + std::string(cls) + "]: " + one_line(message);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Persona-tailored debunking experiments", "debunk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    IngestArgs ingest;
    GenerateArgs generate;
    EvaluateArgs evaluate;
    AnalyzeArgs analyze_args;
    ReportArgs report;

    auto* s_ingest = app.add_subcommand("ingest", "Filter a fact-check corpus into corpus.jsonl");
    add_common(s_ingest, common);
    s_ingest->add_option("--input", ingest.input, "Raw JSONL corpus")->required();
    s_ingest->add_option("--keywords-file", ingest.keywords_file, "Exclusion keywords, one per line");
    s_ingest->add_option("--match-field", ingest.match_field, "verdict, claim or both");
    s_ingest->add_flag("--allow-unreviewed", ingest.allow_unreviewed, "Keep records awaiting manual review");

    auto* s_generate = app.add_subcommand("generate", "Write one tailored verdict per (claim, profile)");
    add_common(s_generate, common);
    s_generate->add_option("--corpus", generate.corpus, "Corpus (default <run-dir>/corpus.jsonl)");
    s_generate->add_option("--model", generate.model, "Tailoring model id");
    s_generate->add_option("--profiles", generate.profiles, "all or comma-separated codes");
    s_generate->add_option("--limit", generate.limit, "Stop after this many new items");
    s_generate->add_option("--max-context-chars", generate.max_context_chars, "Context length guard");
    s_generate->add_flag("--resume", generate.resume, "Continue an existing store");

    auto* s_evaluate = app.add_subcommand("evaluate", "Score verdicts with persona judges");
    add_common(s_evaluate, common);
    s_evaluate->add_option("--corpus", evaluate.corpus, "Corpus (default <run-dir>/corpus.jsonl)");
    s_evaluate->add_option("--verdicts", evaluate.verdicts, "Verdict store (default <run-dir>/verdicts.jsonl)");
    s_evaluate->add_option("--judge-model", evaluate.judge_model, "Judge model id");
    s_evaluate->add_option("--tailor-model", evaluate.tailor_model, "Tailoring model to evaluate");
    s_evaluate->add_option("--judges", evaluate.judges, "all or comma-separated codes");
    s_evaluate->add_option("--limit", evaluate.limit, "Stop after this many new items");
    s_evaluate->add_flag("--resume", evaluate.resume, "Continue an existing store");

    auto* s_analyze = app.add_subcommand("analyze", "Compute means, t-tests and accuracies");
    add_common(s_analyze, common);
    s_analyze->add_option("--judgments", analyze_args.judgments, "Judgment stores (default: all in run dir)");
    s_analyze->add_option("--judge-model", analyze_args.judge_model, "Analyze only this judge model");
    s_analyze->add_flag("--html", analyze_args.html, "Also write report/report.html");

    auto* s_report = app.add_subcommand("report", "Render tables and figure data from analyses");
    add_common(s_report, common);
    s_report->add_option("--analysis", report.analyses, "Analysis files (default: all in run dir)");
    s_report->add_flag("--html", report.html, "Also write report/report.html");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << error_line("usage", e.what()) << "\n";
        return kExitInput;
    }

    try {
        if (s_ingest->parsed()) return cmd_ingest(common, ingest, out, err);
        if (s_generate->parsed()) return cmd_generate(common, generate, out, err);
        if (s_evaluate->parsed()) return cmd_evaluate(common, evaluate, out, err);
        if (s_analyze->parsed()) return cmd_analyze(common, analyze_args, out, err);
        return cmd_report(common, report, out, err);
    } catch (const InputError& e) {
        err << error_line("input", e.what()) << "\n";
        return kExitInput;
    } catch (const MissingPrerequisite& e) {
        err << error_line("missing", e.what()) << "\n";
        return kExitMissing;
    } catch (const MissingVerdict& e) {
        err << error_line("missing", e.what()) << "\n";
        return kExitMissing;
    } catch (const MalformedArtifact& e) {
        err << error_line("malformed", e.what()) << "\n";
        return kExitMalformed;
    } catch (const BackendError& e) {
        err << error_line("backend", e.what()) << "\n";
        return kExitBackend;
    } catch (const StoreIoError& e) {
        err << error_line("io", e.what()) << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << error_line("internal", e.what()) << "\n";
        return kExitInternal;
    }
}

}  // namespace debunk
