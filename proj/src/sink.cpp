#include "ptor/sink.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

#include "ptor/errors.hpp"

namespace ptor {

using nlohmann::json;

namespace {

template <class T>
std::string cell(const std::optional<T>& v) {
    return v ? fmt::format("{}", *v) : std::string();
}

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); }

std::string cell(const std::optional<BigInt>& v) { return v ? v->get_str() : std::string(); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (;;) {
        size_t k = s.find(sep, start);
        out.push_back(s.substr(start, k == std::string::npos ? std::string::npos : k - start));
        if (k == std::string::npos) return out;
        start = k + 1;
    }
}

void parse(const std::string& s, std::optional<u64>& out) {
    if (!s.empty()) out = std::stoull(s);
}
void parse(const std::string& s, std::optional<i64>& out) {
    if (!s.empty()) out = std::stoll(s);
}
void parse(const std::string& s, std::optional<double>& out) {
    if (!s.empty()) out = std::stod(s);
}
void parse(const std::string& s, std::optional<BigInt>& out) {
    if (!s.empty()) out = BigInt(s);
}

json meta_json(const SinkMeta& meta) {
    json j = json::object();
    for (const auto& [k, v] : meta) j[k] = v;
    return j;
}

SinkMeta meta_from_json(const json& j) {
    SinkMeta m;
    for (auto it = j.begin(); it != j.end(); ++it) m[it.key()] = it.value().get<std::string>();
    return m;
}

template <class T>
void jput(json& j, const char* k, const std::optional<T>& v) {
    if (v) j[k] = *v;
}

template <class T>
void jget(const json& j, const char* k, std::optional<T>& v) {
    if (j.contains(k)) v = j.at(k).get<T>();
}

} // namespace

SinkFormat format_for_path(const std::string& path) {
    auto ends = [&](const char* suf) {
        size_t n = std::strlen(suf);
        return path.size() >= n && path.compare(path.size() - n, n, suf) == 0;
    };
    return (ends(".jsonl") || ends(".json")) ? SinkFormat::jsonl : SinkFormat::csv;
}

std::string to_csv_line(const ScanRecord& r) {
    if (r.flags.find(',') != std::string::npos || r.kind.find(',') != std::string::npos)
        throw UsageError("record text may not contain ','");
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", r.kind, cell(r.p), cell(r.D), cell(r.m),
                       cell(r.value), cell(r.vptor), cell(r.v_cl), cell(r.v_w), cell(r.delta), cell(r.c_p),
                       cell(r.gap), cell(r.h), r.flags);
}

ScanRecord from_csv_line(const std::string& line) {
    auto c = split(line, ',');
    if (c.size() != 13) throw std::runtime_error("bad CSV record: " + line);
    ScanRecord r;
    r.kind = c[0];
    parse(c[1], r.p);
    parse(c[2], r.D);
    parse(c[3], r.m);
    parse(c[4], r.value);
    parse(c[5], r.vptor);
    parse(c[6], r.v_cl);
    parse(c[7], r.v_w);
    parse(c[8], r.delta);
    parse(c[9], r.c_p);
    parse(c[10], r.gap);
    parse(c[11], r.h);
    r.flags = c[12];
    return r;
}

std::string to_json_line(const ScanRecord& r) {
    json j;
    j["kind"] = r.kind;
    jput(j, "p", r.p);
    if (r.D) j["D"] = r.D->get_str();
    if (r.m) j["m"] = r.m->get_str();
    jput(j, "value", r.value);
    jput(j, "vptor", r.vptor);
    jput(j, "v_cl", r.v_cl);
    jput(j, "v_w", r.v_w);
    jput(j, "delta", r.delta);
    jput(j, "c_p", r.c_p);
    jput(j, "gap", r.gap);
    jput(j, "h", r.h);
    if (!r.flags.empty()) j["flags"] = r.flags;
    return j.dump();
}

ScanRecord from_json_line(const std::string& line) {
    json j = json::parse(line);
    ScanRecord r;
    r.kind = j.at("kind").get<std::string>();
    jget(j, "p", r.p);
    if (j.contains("D")) r.D = BigInt(j.at("D").get<std::string>());
    if (j.contains("m")) r.m = BigInt(j.at("m").get<std::string>());
    jget(j, "value", r.value);
    jget(j, "vptor", r.vptor);
    jget(j, "v_cl", r.v_cl);
    jget(j, "v_w", r.v_w);
    jget(j, "delta", r.delta);
    jget(j, "c_p", r.c_p);
    jget(j, "gap", r.gap);
    jget(j, "h", r.h);
    if (j.contains("flags")) r.flags = j.at("flags").get<std::string>();
    return r;
}

RecordSink::RecordSink(const std::string& path, SinkFormat fmt, SinkMeta meta)
    : path_(path), fmt_(fmt), meta_(std::move(meta)) {
    f_ = std::fopen(path.c_str(), "w");
    if (!f_) throw std::runtime_error("cannot open " + path + ": " + std::strerror(errno));
    if (fmt_ == SinkFormat::csv) put(kCsvHeader);
}

RecordSink::~RecordSink() {
    if (!f_) return;
    // Best effort; the file is already incomplete.
    std::fputs(fmt_ == SinkFormat::csv ? "# partial\n" : "{\"partial\":true}\n", f_);
    std::fclose(f_);
}

void RecordSink::put(const std::string& line) {
    if (std::fputs(line.c_str(), f_) < 0 || std::fputc('\n', f_) == EOF)
        throw std::runtime_error("write failed on " + path_);
}

void RecordSink::write(const ScanRecord& r) {
    put(fmt_ == SinkFormat::csv ? to_csv_line(r) : to_json_line(r));
    ++count_;
}

void RecordSink::close() {
    if (!f_) return;
    SinkMeta m = meta_;
    m["records"] = std::to_string(count_);
    json mj = meta_json(m);
    if (fmt_ == SinkFormat::csv)
        put("# meta " + mj.dump());
    else
        put(json{{"meta", mj}}.dump());
    bool ok = std::fclose(f_) == 0;
    f_ = nullptr;
    if (!ok) throw std::runtime_error("close failed on " + path_);
}

SinkContents read_sink(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    SinkContents out;
    const bool csv = format_for_path(path) == SinkFormat::csv;
    std::string line;
    bool header = csv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (csv) {
            if (header) {
                if (line != kCsvHeader) throw std::runtime_error("unexpected CSV header in " + path);
                header = false;
            } else if (line == "# partial") {
                out.partial = true;
            } else if (line.rfind("# meta ", 0) == 0) {
                out.meta = meta_from_json(json::parse(line.substr(7)));
            } else {
                out.records.push_back(from_csv_line(line));
            }
            continue;
        }
        json j = json::parse(line);
        if (j.contains("meta"))
            out.meta = meta_from_json(j.at("meta"));
        else if (j.contains("partial"))
            out.partial = true;
        else
            out.records.push_back(from_json_line(line));
    }
    return out;
}

} // namespace ptor
