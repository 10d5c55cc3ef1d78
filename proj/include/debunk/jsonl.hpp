#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace debunk {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Calls `on_line(line_number, json)` for each nonblank line. Throws InputError
/// naming the line on a parse failure. When `tolerate_torn_tail` is set, a
/// final line without a terminating newline that fails to parse is treated as
/// an interrupted append and skipped; the returned offset marks where valid
/// content ends so the caller can truncate before appending again.
std::uintmax_t read_jsonl(const std::filesystem::path& path,
                          const std::function<void(std::size_t, const Json&)>& on_line,
                          bool tolerate_torn_tail = false);

/// Writes `content` to `path` through a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Append-only JSONL writer; each append is one flushed line.
class JsonlAppender {
public:
    /// Opens `path` for append after truncating it to `valid_size` bytes.
    JsonlAppender(std::filesystem::path path, std::uintmax_t valid_size);

    void append(const OrderedJson& record);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::mutex mu_;
};

}  // namespace debunk
