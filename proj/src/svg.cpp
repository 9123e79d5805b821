#include "pamarkov/svg.hpp"

#include <cstdio>
#include <sstream>

namespace pam {

namespace {

constexpr double kScale = 200.0;
constexpr double kGap = 0.08;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Screen position of a chart point: squares in a row, y flipped.
std::pair<double, double> screen(int square, double x, double y) {
    double ox = square * (1.0 + kGap);
    return {kScale * (ox + x), kScale * (1.0 - y)};
}

const char* kPalette[] = {"#7eb4e2", "#f4a582", "#a6d96a", "#d5a6e8", "#ffe08a",
                          "#9fe0d5", "#e8a1b4", "#c4b394", "#b0c4ff", "#d9f0a3"};

}  // namespace

std::string render_partition_svg(const PAMap& map, const MarkovPartition& mp) {
    const FlatSurface& S = map.surface();
    std::ostringstream out;
    double w = S.num_squares() * (1.0 + kGap) * kScale;
    double h = kScale * 1.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << num(w)
        << " " << num(h) << "\">\n";
    // Rectangle cells.
    for (const PRect& r : mp.rects) {
        out << "  <g id=\"rect" << r.id << "\" fill=\"" << kPalette[r.id % 10]
            << "\" fill-opacity=\"0.7\" stroke=\"none\">\n";
        for (const DevCell& c : r.cells) {
            out << "    <polygon points=\"";
            for (size_t i = 0; i < c.poly.size(); ++i) {
                auto [px, py] = screen(c.square, c.poly[i].x.approx(), c.poly[i].y.approx());
                out << (i ? " " : "") << num(px) << "," << num(py);
            }
            out << "\"/>\n";
        }
        out << "  </g>\n";
    }
    // Square frames.
    out << "  <g stroke=\"#888\" stroke-width=\"0.8\" fill=\"none\">\n";
    for (int sq = 0; sq < S.num_squares(); ++sq) {
        auto [px, py] = screen(sq, 0, 1);
        out << "    <rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\"" << num(kScale)
            << "\" height=\"" << num(kScale) << "\"/>\n";
    }
    out << "  </g>\n";
    // Boundary graphs: stable solid, unstable dashed.
    auto draw_graph = [&](const StarGraph& g, const char* color, bool dashed) {
        out << "  <g stroke=\"" << color << "\" stroke-width=\"1.6\" fill=\"none\""
            << (dashed ? " stroke-dasharray=\"6,4\"" : "") << ">\n";
        for (int i = 0; i < (int)g.len.size(); ++i) {
            if (g.len[i].sign() <= 0) continue;
            MeasuredChunks mc = map.sep_chunks(g.foliation, i, QuadNum(0), g.len[i]);
            for (const LeafChunk& ch : mc.chunks) {
                auto [ax, ay] = screen(ch.square, ch.a.x.approx(), ch.a.y.approx());
                auto [bx, by] = screen(ch.square, ch.b.x.approx(), ch.b.y.approx());
                out << "    <line x1=\"" << num(ax) << "\" y1=\"" << num(ay) << "\" x2=\""
                    << num(bx) << "\" y2=\"" << num(by) << "\"/>\n";
            }
        }
        out << "  </g>\n";
    };
    draw_graph(mp.gs, "#111111", false);
    draw_graph(mp.gu_eff, "#c22222", true);
    // Singularities.
    out << "  <g fill=\"#222\" stroke=\"none\">\n";
    for (const auto& s : map.singularities()) {
        for (const auto& rep : S.representatives(s.point)) {
            auto [px, py] = screen(rep.square, rep.x.approx(), rep.y.approx());
            out << "    <circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\""
                << num(2.0 + 0.8 * s.prongs) << "\"/>\n";
        }
    }
    out << "  </g>\n</svg>\n";
    return out.str();
}

}  // namespace pam
