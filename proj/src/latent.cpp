#include "ccae/latent.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ccae/errors.hpp"
#include "ccae/io_util.hpp"

namespace ccae {

void write_latent_csv(const LatentMatrix& m, const std::filesystem::path& path) {
    std::string out = "symbol";
    for (std::size_t j = 0; j < m.dim; ++j) out += ",f" + std::to_string(j);
    out += '\n';
    for (std::size_t i = 0; i < m.count(); ++i) {
        out += m.symbols[i];
        for (std::size_t j = 0; j < m.dim; ++j) {
            out += ',';
            out += format_double(m.at(i, j));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

LatentMatrix read_latent_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open latent matrix " + path.string());
    LatentMatrix m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (line.back() == ',') fields.push_back("");
        if (line_no == 1) {
            if (fields.empty() || fields[0] != "symbol")
                throw ParseError(path.string() + ": expected latent CSV header");
            m.dim = fields.size() - 1;
            continue;
        }
        if (fields.size() != m.dim + 1)
            throw ParseError(path.string() + " line " + std::to_string(line_no) +
                             ": expected " + std::to_string(m.dim + 1) + " columns");
        m.symbols.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            double v = 0;
            const auto [p, ec] =
                std::from_chars(fields[j].data(), fields[j].data() + fields[j].size(), v);
            if (ec != std::errc() || p != fields[j].data() + fields[j].size())
                throw ParseError(path.string() + " line " + std::to_string(line_no) +
                                 ": bad number '" + fields[j] + "'");
            m.values.push_back(v);
        }
    }
    if (m.dim == 0) throw ParseError(path.string() + ": empty latent matrix");
    return m;
}

} // namespace ccae
