#include "sketchid/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "sketchid/errors.hpp"

namespace sketchid::mm {
namespace {

std::string lower(std::string s) {
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') continue;
        return true;
    }
    return false;
}

struct Header {
    bool coordinate = true;
    bool pattern = false;
    enum class Symmetry { general, symmetric, skew } symmetry = Symmetry::general;
};

Header parse_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ArgumentError("matrix market: empty input");
    std::istringstream ss(line);
    std::string banner, object, format, field, symmetry;
    ss >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw ArgumentError("matrix market: missing '%%MatrixMarket matrix' banner");
    Header h;
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format == "array") h.coordinate = false;
    else if (format != "coordinate") throw ArgumentError("matrix market: unknown format '" + format + "'");
    if (field == "pattern") h.pattern = true;
    else if (field != "real" && field != "integer" && field != "double")
        throw ArgumentError("matrix market: unsupported field '" + field + "'");
    if (h.pattern && !h.coordinate) throw ArgumentError("matrix market: pattern requires coordinate format");
    if (symmetry == "symmetric") h.symmetry = Header::Symmetry::symmetric;
    else if (symmetry == "skew-symmetric") h.symmetry = Header::Symmetry::skew;
    else if (symmetry != "general") throw ArgumentError("matrix market: unsupported symmetry '" + symmetry + "'");
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

AnyMatrix read(std::istream& in) {
    const Header h = parse_header(in);
    std::string line;
    if (!next_data_line(in, line)) throw ArgumentError("matrix market: missing size line");
    std::istringstream size_line(line);
    long long rows = -1, cols = -1, entries = -1;
    size_line >> rows >> cols;
    if (h.coordinate) size_line >> entries;
    if (size_line.fail() || rows < 0 || cols < 0 || (h.coordinate && entries < 0))
        throw ArgumentError("matrix market: malformed size line");
    const auto m = static_cast<std::size_t>(rows);
    const auto n = static_cast<std::size_t>(cols);

    if (h.coordinate) {
        std::vector<Triplet> triplets;
        triplets.reserve(static_cast<std::size_t>(entries) * (h.symmetry == Header::Symmetry::general ? 1 : 2));
        for (long long e = 0; e < entries; ++e) {
            if (!next_data_line(in, line)) throw ArgumentError("matrix market: fewer entries than declared");
            std::istringstream es(line);
            long long i = 0, j = 0;
            double v = 1.0;
            es >> i >> j;
            if (!h.pattern) es >> v;
            if (es.fail() || i < 1 || j < 1 || static_cast<std::size_t>(i) > m || static_cast<std::size_t>(j) > n)
                throw ArgumentError("matrix market: malformed entry '" + line + "'");
            const auto r = static_cast<std::size_t>(i - 1);
            const auto c = static_cast<std::size_t>(j - 1);
            triplets.push_back({r, c, v});
            if (h.symmetry != Header::Symmetry::general && r != c)
                triplets.push_back({c, r, h.symmetry == Header::Symmetry::skew ? -v : v});
        }
        return SparseMatrix::from_triplets(m, n, std::move(triplets));
    }

    DenseMatrix a(m, n);
    auto next_value = [&]() {
        if (!next_data_line(in, line)) throw ArgumentError("matrix market: fewer values than declared");
        std::istringstream vs(line);
        double v = 0.0;
        vs >> v;
        if (vs.fail()) throw ArgumentError("matrix market: malformed value '" + line + "'");
        return v;
    };
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t first = h.symmetry == Header::Symmetry::general ? 0
                                  : h.symmetry == Header::Symmetry::symmetric ? j
                                                                              : j + 1;
        for (std::size_t i = first; i < m; ++i) {
            const double v = next_value();
            a(i, j) = v;
            if (h.symmetry == Header::Symmetry::symmetric) a(j, i) = v;
            if (h.symmetry == Header::Symmetry::skew) a(j, i) = -v;
        }
    }
    if (!a.all_finite()) throw ArgumentError("matrix market: non-finite value");
    return a;
}

AnyMatrix read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
    return read(in);
}

SparseMatrix read_sparse_file(const std::filesystem::path& path) {
    auto m = read_file(path);
    if (auto* d = std::get_if<DenseMatrix>(&m)) return SparseMatrix::from_dense(*d);
    return std::get<SparseMatrix>(std::move(m));
}

DenseMatrix read_dense_file(const std::filesystem::path& path) {
    auto m = read_file(path);
    if (auto* s = std::get_if<SparseMatrix>(&m)) return s->to_dense();
    return std::get<DenseMatrix>(std::move(m));
}

void write(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    out << std::setprecision(17);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        auto rows = a.col_rows(j);
        auto vals = a.col_values(j);
        for (std::size_t p = 0; p < rows.size(); ++p) out << rows[p] + 1 << ' ' << j + 1 << ' ' << vals[p] << '\n';
    }
}

void write(std::ostream& out, const DenseMatrix& a) {
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    out << std::setprecision(17);
    for (double v : a.data()) out << v << '\n';
}

void write_file(const std::filesystem::path& path, const SparseMatrix& a) {
    auto out = open_out(path);
    write(out, a);
}

void write_file(const std::filesystem::path& path, const DenseMatrix& a) {
    auto out = open_out(path);
    write(out, a);
}

}  // namespace sketchid::mm
