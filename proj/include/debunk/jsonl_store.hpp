#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "debunk/errors.hpp"
#include "debunk/jsonl.hpp"

namespace debunk {

/// Append-only JSONL store of records unique under `Traits::key`.
///
/// Traits must provide:
///   using Record = ...; using Key = ...;
///   static Key key(const Record&);
///   static std::string describe(const Key&);
///   static OrderedJson to_json(const Record&);
///   static Record from_json(const Json&, const std::string& where);
///
/// Opening an existing file tolerates a torn final line (an append cut short
/// by a crash); the torn bytes are truncated before the next append.
template <typename Traits>
class JsonlStore {
public:
    using Record = typename Traits::Record;
    using Key = typename Traits::Key;

    explicit JsonlStore(std::filesystem::path path) : appender_(path, load(path, records_)) {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            if (!index_.emplace(Traits::key(records_[i]), i).second) {
                throw MalformedArtifact(path.string() + ": duplicate record " + Traits::describe(Traits::key(records_[i])));
            }
        }
    }

    bool contains(const Key& k) const { return index_.contains(k); }

    const Record* find(const Key& k) const {
        const auto it = index_.find(k);
        return it == index_.end() ? nullptr : &records_[it->second];
    }

    /// Throws StoreIoError on I/O failure or when the key is already present.
    void append(const Record& r) {
        auto k = Traits::key(r);
        if (index_.contains(k)) throw StoreIoError("record already stored: " + Traits::describe(k));
        appender_.append(Traits::to_json(r));
        records_.push_back(r);
        index_.emplace(std::move(k), records_.size() - 1);
    }

    const std::vector<Record>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    const std::filesystem::path& path() const noexcept { return appender_.path(); }

    /// Read-only load; throws MissingPrerequisite when the file is absent.
    static std::vector<Record> read(const std::filesystem::path& path) {
        if (!std::filesystem::exists(path)) throw MissingPrerequisite("store not found: " + path.string());
        std::vector<Record> out;
        load(path, out);
        return out;
    }

private:
    // records_ is declared before appender_, so load() fills it first.
    std::vector<Record> records_;
    std::map<Key, std::size_t> index_;
    JsonlAppender appender_;

    static std::uintmax_t load(const std::filesystem::path& path, std::vector<Record>& out) {
        if (!std::filesystem::exists(path)) return 0;
        try {
            return read_jsonl(
                path,
                [&](std::size_t line, const Json& j) {
                    out.push_back(Traits::from_json(j, path.string() + ":" + std::to_string(line)));
                },
                true);
        } catch (const InputError& e) {
            throw MalformedArtifact(e.what());
        }
    }
};

}  // namespace debunk
