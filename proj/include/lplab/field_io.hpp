#pragma once

// Field serialization: flat binary (interleaved re/im float64, host is
// required to be little-endian) or CSV rows "index,re,im" with 17
// significant digits, each paired with a JSON sidecar
// {dim, N, L, domain_tag, format} stored at <path>.json.

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "grid.hpp"

namespace lplab::io {

enum class FieldFormat { binary, csv };

inline std::string sidecar_path(const std::string& path) { return path + ".json"; }

inline nlohmann::json grid_json(const Grid& g) {
    return {{"dim", g.dim()}, {"N", g.samples_per_axis()}, {"L", g.half_width()}};
}

/// Writes to a temporary sibling and renames, so readers never see a partial file.
inline void write_text_atomically(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp + " for writing");
        out << contents;
        if (!out) throw ValidationError("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_field(const SampledField& f, const std::string& path, FieldFormat format) {
    static_assert(std::endian::native == std::endian::little, "binary field format is little-endian");
    nlohmann::json meta = grid_json(f.grid());
    meta["domain_tag"] = to_string(f.domain());
    meta["format"] = format == FieldFormat::binary ? "binary" : "csv";
    if (format == FieldFormat::binary) {
        std::string bytes(f.size() * sizeof(cplx), '\0');
        std::memcpy(bytes.data(), f.values().data(), bytes.size());
        write_text_atomically(path, bytes);
    } else {
        std::ostringstream os;
        os << "index,re,im\n";
        for (std::size_t i = 0; i < f.size(); ++i)
            os << i << ',' << format_double(f[i].real()) << ',' << format_double(f[i].imag()) << '\n';
        write_text_atomically(path, os.str());
    }
    write_text_atomically(sidecar_path(path), meta.dump(2) + "\n");
}

inline SampledField read_field(const std::string& path) {
    std::ifstream meta_in(sidecar_path(path));
    if (!meta_in) throw ValidationError("missing sidecar " + sidecar_path(path));
    const auto meta = nlohmann::json::parse(meta_in);
    const Grid grid = make_grid(meta.at("dim").get<int>(), meta.at("N").get<std::size_t>(),
                                meta.at("L").get<double>());
    const std::string tag = meta.at("domain_tag").get<std::string>();
    const Domain domain = tag == "space" ? Domain::space : Domain::frequency;
    std::vector<cplx> values(grid.size());
    if (meta.at("format").get<std::string>() == "binary") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ValidationError("cannot open " + path);
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(cplx)));
        if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(cplx)))
            throw ValidationError("truncated binary field " + path);
    } else {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open " + path);
        std::string line;
        std::getline(in, line);
        std::size_t count = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            std::string idx, re, im;
            std::getline(row, idx, ',');
            std::getline(row, re, ',');
            std::getline(row, im, ',');
            const auto i = std::stoul(idx);
            if (i >= values.size()) throw ValidationError("CSV index out of range in " + path);
            values[i] = cplx(std::stod(re), std::stod(im));
            ++count;
        }
        if (count != values.size()) throw ValidationError("CSV row count mismatch in " + path);
    }
    return SampledField(grid, std::move(values), domain);
}

} // namespace lplab::io
