#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptor/intbase.hpp"

namespace ptor {

// One printed row of any scan. Absent fields stay empty in CSV and are
// omitted in JSONL.
struct ScanRecord {
    std::string kind;
    std::optional<u64> p;
    std::optional<BigInt> D;
    std::optional<BigInt> m;
    std::optional<i64> value;
    std::optional<i64> vptor;
    std::optional<i64> v_cl;
    std::optional<i64> v_w;
    std::optional<i64> delta;
    std::optional<double> c_p;
    std::optional<double> gap;
    std::optional<u64> h;
    std::string flags;   // ';'-separated, never contains ','

    bool operator==(const ScanRecord&) const = default;
};

inline constexpr const char* kCsvHeader = "kind,p,D,m,value,vptor,v_cl,v_w,delta,c_p,gap,h,flags";

enum class SinkFormat { csv, jsonl };

// csv unless the path ends in .jsonl or .json.
SinkFormat format_for_path(const std::string& path);

using SinkMeta = std::map<std::string, std::string>;

// Single-writer record file. close() appends the metadata trailer; a sink
// destroyed without close() (an aborted scan) appends a partial marker.
class RecordSink {
public:
    RecordSink(const std::string& path, SinkFormat fmt, SinkMeta meta);
    RecordSink(const RecordSink&) = delete;
    RecordSink& operator=(const RecordSink&) = delete;
    ~RecordSink();

    void write(const ScanRecord& r);
    void close();
    u64 count() const { return count_; }

private:
    void put(const std::string& line);

    std::FILE* f_ = nullptr;
    std::string path_;
    SinkFormat fmt_;
    SinkMeta meta_;
    u64 count_ = 0;
};

struct SinkContents {
    std::vector<ScanRecord> records;
    SinkMeta meta;
    bool partial = false;
};

SinkContents read_sink(const std::string& path);

std::string to_csv_line(const ScanRecord& r);
ScanRecord from_csv_line(const std::string& line);
std::string to_json_line(const ScanRecord& r);
ScanRecord from_json_line(const std::string& line);

} // namespace ptor
