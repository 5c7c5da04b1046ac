#include "evtwalk/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "evtwalk/errors.hpp"

namespace evtwalk {

namespace fs = std::filesystem;

std::string format_cell(double v, char kind) {
    if (kind == 'i') {
        // counts and indices are stored exactly in doubles (<= 2^53)
        return std::to_string(static_cast<long long>(std::llround(v)));
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_table(const ResultTable& t, const fs::path& p) {
    if (t.columns.size() != t.kinds.size())
        throw InvalidArgument("emit: table '" + t.name +
                              "' kinds/columns mismatch");
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out << ',';
        out << t.columns[c];
    }
    out << '\n';
    for (const std::vector<double>& row : t.rows) {
        if (row.size() != t.columns.size())
            throw InvalidArgument("emit: table '" + t.name +
                                  "' row width mismatch");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            out << format_cell(row[c], t.kinds[c]);
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

} // namespace

void emit_results(const ExperimentResult& res, const std::string& dir,
                  bool force) {
    if (dir.empty())
        throw ConfigError("output_dir is required to emit results");
    const fs::path root(dir);
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir +
                      "': " + ec.message());

    // meta.txt is written last, so its presence marks a complete run; a
    // complete run is never clobbered silently
    const fs::path meta_path = root / "meta.txt";
    if (fs::exists(meta_path) && !force)
        throw IoError("output directory '" + dir +
                      "' already holds results; pass --force true to "
                      "overwrite");

    for (const ResultTable& t : res.tables)
        write_table(t, root / (t.name + ".csv"));

    std::ofstream meta(meta_path, std::ios::binary | std::ios::trunc);
    if (!meta)
        throw IoError("cannot open '" + meta_path.string() +
                      "' for writing");
    for (const auto& kv : res.meta)
        meta << kv.first << '=' << kv.second << '\n';
    meta.flush();
    if (!meta) throw IoError("write failed for '" + meta_path.string() + "'");
}

} // namespace evtwalk
