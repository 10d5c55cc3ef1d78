#include "debunk/run_dir.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <ctime>
#include <random>

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"
#include "debunk/prompts.hpp"

namespace debunk {

namespace fs = std::filesystem;

namespace {

std::string format_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class T>
void read_key(const Json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const Json::exception&) {
        throw InputError(where + ": key \"" + key + "\" has the wrong type");
    }
}

const Json& section(const Json& j, const char* name, const std::string& where) {
    static const Json empty = Json::object();
    if (!j.contains(name)) return empty;
    if (!j.at(name).is_object()) throw InputError(where + ": \"" + name + "\" must be an object");
    return j.at(name);
}

}  // namespace

RunConfig load_config(const fs::path& path) {
    const auto where = path.string();
    if (!fs::exists(path)) throw InputError("config file not found: " + where);
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw InputError(where + ": " + e.what());
    }
    if (!j.is_object()) throw InputError(where + ": config must be a JSON object");

    RunConfig c;
    const auto& backend = section(j, "backend", where);
    read_key(backend, "kind", c.backend_kind, where);
    read_key(backend, "url", c.backend_url, where);
    read_key(backend, "api_key_env", c.api_key_env, where);
    read_key(backend, "model", c.model, where);
    read_key(backend, "judge_model", c.judge_model, where);
    read_key(backend, "timeout_s", c.timeout_s, where);
    read_key(section(j, "concurrency", where), "max_in_flight", c.max_in_flight, where);
    const auto& retry = section(j, "retry", where);
    read_key(retry, "max_attempts", c.max_attempts, where);
    read_key(retry, "base_delay_ms", c.base_delay_ms, where);
    read_key(retry, "max_delay_ms", c.max_delay_ms, where);
    read_key(section(j, "mock", where), "jitter", c.mock_jitter, where);
    if (j.contains("seed")) {
        std::uint64_t s = 0;
        read_key(j, "seed", s, where);
        c.seed = s;
    }
    const auto& prompts = section(j, "prompts", where);
    if (prompts.contains("max_context_chars")) {
        std::size_t n = 0;
        read_key(prompts, "max_context_chars", n, where);
        c.max_context_chars = n;
    }
    const auto& filter = section(j, "filter", where);
    if (!filter.empty()) {
        auto f = FilterConfig::defaults();
        read_key(filter, "exclusion_keywords", f.exclusion_keywords, where);
        if (filter.contains("match_field")) {
            std::string mf;
            read_key(filter, "match_field", mf, where);
            auto parsed = parse_match_field(mf);
            if (!parsed) throw InputError(where + ": unknown filter.match_field \"" + mf + "\"");
            f.match_field = *parsed;
        }
        f.validate();
        c.filter = std::move(f);
    }
    if (!c.backend_kind.empty() && c.backend_kind != "http" && c.backend_kind != "mock") {
        throw InputError(where + ": backend.kind must be \"http\" or \"mock\"");
    }
    if (c.max_in_flight < 1 || c.max_attempts < 1 || c.base_delay_ms < 0 || c.max_delay_ms < 0 || c.timeout_s < 1) {
        throw InputError(where + ": concurrency and retry settings must be positive");
    }
    return c;
}

Clock run_clock(bool mock) {
    if (const char* sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde) {
        char* end = nullptr;
        const long long v = std::strtoll(sde, &end, 10);
        if (*end != '\0' || v < 0) throw InputError("SOURCE_DATE_EPOCH is not a non-negative integer");
        const std::string stamp = format_utc(static_cast<std::time_t>(v));
        return [stamp] { return stamp; };
    }
    if (mock) return [] { return std::string("1970-01-01T00:00:00Z"); };
    return utc_now;
}

RunLock::RunLock(const fs::path& dir) : path_(dir / ".lock") {
    for (int attempt = 0; attempt < 2; ++attempt) {
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd >= 0) {
            const auto pid = std::to_string(::getpid()) + "\n";
            [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
            ::close(fd);
            return;
        }
        if (errno != EEXIST) throw StoreIoError("cannot create lock file " + path_.string());
        long holder = 0;
        try {
            holder = std::stol(read_file(path_));
        } catch (const std::exception&) {
            holder = 0;
        }
        const bool alive = holder > 0 && (::kill(static_cast<pid_t>(holder), 0) == 0 || errno == EPERM);
        if (alive) {
            throw InputError("run directory " + dir.string() + " is locked by process " + std::to_string(holder));
        }
        std::error_code ec;
        fs::remove(path_, ec);
    }
    throw InputError("run directory " + dir.string() + " is locked (" + path_.string() + ")");
}

RunLock::~RunLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

RunManifest::RunManifest(fs::path dir, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
    if (fs::exists(path())) {
        try {
            j_ = OrderedJson::parse(read_file(path()));
        } catch (const OrderedJson::exception& e) {
            throw MalformedArtifact(path().string() + ": " + e.what());
        }
        if (!j_.is_object() || !j_.contains("run_id") || !j_.contains("outputs") || !j_.at("outputs").is_object()) {
            throw MalformedArtifact(path().string() + ": not a run manifest");
        }
        return;
    }
    const auto now = clock_();
    const auto abs = fs::weakly_canonical(fs::absolute(dir_)).string();
    j_["run_id"] = sha256_hex("run|" + now + "|" + abs).substr(0, 16);
    j_["tool_version"] = std::string(kToolVersion);
    j_["created_at"] = now;
    j_["updated_at"] = now;
    j_["seed"] = nullptr;
    j_["corpus"] = nullptr;
    OrderedJson tpl;
    for (const auto& [name, digest] : template_digests()) tpl[name] = digest;
    j_["template_digests"] = std::move(tpl);
    j_["backend"] = nullptr;
    j_["temperatures"] = {{"generation", kGenerationTemperature}, {"evaluation", kEvaluationTemperature}};
    j_["phases"] = OrderedJson::object();
    j_["outputs"] = OrderedJson::object();
}

std::uint64_t RunManifest::resolve_seed(std::optional<std::uint64_t> requested, std::uint64_t fallback) {
    std::uint64_t seed = fallback;
    if (requested) {
        seed = *requested;
    } else if (j_.at("seed").is_number_unsigned()) {
        seed = j_.at("seed").get<std::uint64_t>();
    }
    if (j_.at("seed").is_null()) j_["seed"] = seed;
    return seed;
}

void RunManifest::set_backend(const std::string& kind, const std::string& url) {
    j_["backend"] = {{"kind", kind}, {"url", url}};
}

void RunManifest::set_corpus(const fs::path& corpus) {
    std::error_code ec;
    auto rel = fs::relative(corpus, dir_, ec);
    const bool inside = !ec && !rel.empty() && rel.native().rfind("..", 0) != 0;
    j_["corpus"] = {{"path", inside ? rel.generic_string() : fs::absolute(corpus).generic_string()},
                    {"digest", sha256_hex(read_file(corpus))}};
}

void RunManifest::add_output(const std::string& relative, const std::string& phase) {
    auto& outs = j_["outputs"];
    if (outs.contains(relative) && outs.at(relative).get<std::string>() != phase) {
        throw InputError("output " + relative + " already belongs to phase " + outs.at(relative).get<std::string>());
    }
    outs[relative] = phase;
}

void RunManifest::set_phase(const std::string& phase, OrderedJson info, bool completed) {
    info["completed"] = completed;
    info["updated_at"] = clock_();
    j_["phases"][phase] = std::move(info);
}

void RunManifest::save() {
    j_["updated_at"] = clock_();
    write_file_atomic(path(), j_.dump(2) + "\n");
}

}  // namespace debunk
