#include "pat/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "pat/error.hpp"

namespace pat {

Window minmax_window(const Image& img) {
    if (img.empty()) return {};
    const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
    return {*lo, *hi};
}

void write_pgm(const std::filesystem::path& path, const Image& img, Window window) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    const double range = window.hi - window.lo;
    std::vector<unsigned char> px(img.size());
    for (std::size_t q = 0; q < img.size(); ++q) {
        const double t = range > 0.0 ? (img.data()[q] - window.lo) / range : 0.0;
        px[q] = static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0));
    }
    f.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!f) throw Error("failed writing " + path.string());
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
    std::string tok;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            if (!tok.empty()) break;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

} // namespace

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    const std::string magic = header_token(f);
    if (magic != "P5" && magic != "P2") throw InvalidArgument(path.string() + " is not a PGM file");
    std::size_t w = 0, h = 0;
    int maxval = 0;
    try {
        w = std::stoul(header_token(f));
        h = std::stoul(header_token(f));
        maxval = std::stoi(header_token(f));
    } catch (const std::exception&) {
        throw InvalidArgument(path.string() + " has a malformed PGM header");
    }
    if (w == 0 || h == 0 || maxval <= 0 || maxval > 65535)
        throw InvalidArgument(path.string() + " has an unsupported PGM header");

    Image img(h, w);
    if (magic == "P2") {
        for (double& v : img.data()) {
            int x = 0;
            if (!(f >> x)) throw InvalidArgument(path.string() + " is truncated");
            v = static_cast<double>(x) / maxval;
        }
        return img;
    }
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(w * h * bpp);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!f) throw InvalidArgument(path.string() + " is truncated");
    for (std::size_t q = 0; q < img.size(); ++q) {
        const unsigned x = bpp == 1 ? raw[q] : (static_cast<unsigned>(raw[2 * q]) << 8) | raw[2 * q + 1];
        img.data()[q] = static_cast<double>(x) / maxval;
    }
    return img;
}

} // namespace pat
