#include "gpbl/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace gpbl {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

void write_rows(std::ofstream& out, const Grid& g,
                const std::function<std::string(int, int)>& value_cols) {
    for (int iz = 0; iz < g.nz; ++iz)
        for (int iy = 0; iy < g.ny; ++iy) {
            out << format_double(g.z(iz));
            if (g.has_y()) out << ',' << format_double(g.y(iy));
            out << ',' << value_cols(iz, iy) << '\n';
        }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

struct ParsedCsv {
    Grid grid;
    bool complex = false;
    std::vector<double> re, im;
};

ParsedCsv parse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header;
    std::getline(in, header);
    const bool has_y = header.rfind("z,y,", 0) == 0;
    const bool complex = header.find(",im") != std::string::npos;

    ParsedCsv p;
    p.complex = complex;
    std::vector<double> zs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(std::stod(tok));
        size_t c = 0;
        zs.push_back(cols[c++]);
        if (has_y) ys.push_back(cols[c++]);
        p.re.push_back(cols[c++]);
        p.im.push_back(complex ? cols[c++] : 0.0);
    }
    if (zs.size() < 2) throw std::runtime_error("field CSV too short: " + path);

    int ny = 1;
    if (has_y) {
        while (ny < static_cast<int>(zs.size()) && zs[ny] == zs[0]) ++ny;
    }
    const int nz = static_cast<int>(zs.size()) / ny;
    if (nz * ny != static_cast<int>(zs.size()))
        throw std::runtime_error("field CSV has ragged node layout: " + path);
    if (has_y) {
        const double dy = ys[1] - ys[0];
        p.grid = Grid::strip(zs.back(), nz, dy * ny, ny);
    } else {
        p.grid = Grid::line(zs.back(), nz);
    }
    return p;
}

}  // namespace

void write_field_csv(const std::string& path, const RealField& f) {
    auto out = open_out(path);
    const Grid& g = f.grid();
    out << (g.has_y() ? "z,y,re" : "z,re") << '\n';
    write_rows(out, g, [&](int iz, int iy) { return format_double(f.at(iz, iy)); });
}

void write_field_csv(const std::string& path, const ComplexField& f) {
    auto out = open_out(path);
    const Grid& g = f.grid();
    out << (g.has_y() ? "z,y,re,im" : "z,re,im") << '\n';
    write_rows(out, g, [&](int iz, int iy) {
        return format_double(f.at(iz, iy).real()) + "," + format_double(f.at(iz, iy).imag());
    });
}

RealField read_real_field_csv(const std::string& path) {
    ParsedCsv p = parse(path);
    RealField f(p.grid);
    for (int i = 0; i < f.size(); ++i) f[i] = p.re[i];
    return f;
}

ComplexField read_complex_field_csv(const std::string& path) {
    ParsedCsv p = parse(path);
    ComplexField f(p.grid);
    for (int i = 0; i < f.size(); ++i) f[i] = {p.re[i], p.im[i]};
    return f;
}

}  // namespace gpbl
