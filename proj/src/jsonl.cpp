#include "debunk/jsonl.hpp"

#include <sstream>

#include "debunk/errors.hpp"

namespace debunk {

namespace fs = std::filesystem;

std::uintmax_t read_jsonl(const fs::path& path,
                          const std::function<void(std::size_t, const Json&)>& on_line,
                          bool tolerate_torn_tail) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::uintmax_t valid_end = 0;
    while (pos < data.size()) {
        const auto nl = data.find('\n', pos);
        const bool terminated = nl != std::string::npos;
        const auto end = terminated ? nl : data.size();
        std::string_view line(data.data() + pos, end - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        const bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
        if (!blank) {
            Json j;
            try {
                j = Json::parse(line);
            } catch (const Json::parse_error& e) {
                if (tolerate_torn_tail && !terminated) break;
                throw InputError(path.string() + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
            }
            if (tolerate_torn_tail && !terminated) break;
            on_line(line_no, j);
        }
        pos = terminated ? nl + 1 : data.size();
        valid_end = pos;
    }
    return valid_end;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreIoError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw StoreIoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw StoreIoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

JsonlAppender::JsonlAppender(fs::path path, std::uintmax_t valid_size) : path_(std::move(path)) {
    std::error_code ec;
    if (fs::exists(path_, ec) && fs::file_size(path_) != valid_size) {
        fs::resize_file(path_, valid_size, ec);
        if (ec) throw StoreIoError("cannot truncate torn tail of " + path_.string() + ": " + ec.message());
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw StoreIoError("cannot open " + path_.string() + " for append");
}

void JsonlAppender::append(const OrderedJson& record) {
    const auto line = record.dump() + "\n";
    std::lock_guard lock(mu_);
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw StoreIoError("append failed: " + path_.string());
}

}  // namespace debunk
