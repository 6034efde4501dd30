#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "spectra/bps.hpp"
#include "spectra/cluster.hpp"
#include "spectra/differential.hpp"
#include "spectra/foliation.hpp"
#include "spectra/rh.hpp"

namespace spectra {

using json = nlohmann::json;

constexpr const char* kSchema = "spectra-rh/1";

// ---------------------------------------------------------------------------
// JSON readers/writers

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidInput("complex values are [re, im] pairs");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline json to_json(const QuadraticDifferential& qd) {
    json out;
    out["schema"] = kSchema;
    json num = json::array();
    for (const auto& c : qd.numerator) num.push_back(to_json(c));
    out["numerator"] = num;
    json poles = json::array();
    for (const auto& p : qd.poles)
        poles.push_back(
            {{"z", to_json(p.z)}, {"order", p.order}, {"sign", p.sign}});
    out["poles"] = poles;
    out["infinity_sign"] = qd.infinity_sign;
    return out;
}

inline QuadraticDifferential differential_from_json(const json& j) {
    if (!j.is_object()) throw InvalidInput("differential must be an object");
    if (j.contains("schema") && j["schema"] != kSchema)
        throw InvalidInput("unknown schema " + j["schema"].dump());
    if (!j.contains("numerator") || !j["numerator"].is_array())
        throw InvalidInput("missing numerator array");
    QuadraticDifferential qd;
    for (const auto& c : j["numerator"]) qd.numerator.push_back(complex_from_json(c));
    if (j.contains("poles")) {
        if (!j["poles"].is_array()) throw InvalidInput("poles must be an array");
        for (const auto& p : j["poles"]) {
            PoleSpec ps;
            if (!p.contains("z") || !p.contains("order"))
                throw InvalidInput("pole entries need z and order");
            ps.z = complex_from_json(p["z"]);
            ps.order = p["order"].get<int>();
            ps.sign = p.value("sign", +1);
            if (ps.sign != 1 && ps.sign != -1)
                throw InvalidInput("pole sign must be +-1");
            qd.poles.push_back(ps);
        }
    }
    qd.infinity_sign = j.value("infinity_sign", +1);
    return qd;
}

inline json to_json(const ExchangeMatrix& m) {
    json rows = json::array();
    for (const auto& r : m) rows.push_back(r);
    return rows;
}

inline ExchangeMatrix exchange_matrix_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("matrix must be an array of rows");
    ExchangeMatrix m;
    for (const auto& r : j) m.push_back(r.get<std::vector<int>>());
    return m;
}

inline json to_json(const Seed& s) {
    json out;
    out["schema"] = kSchema;
    out["skew"] = to_json(s.skew);
    if (!s.basis_labels.empty()) out["labels"] = s.basis_labels;
    return out;
}

inline Seed seed_from_json(const json& j) {
    if (!j.is_object() || !j.contains("skew"))
        throw InvalidInput("seed needs a skew matrix");
    Seed s;
    s.skew = exchange_matrix_from_json(j["skew"]);
    if (j.contains("labels")) s.basis_labels = j["labels"].get<std::vector<std::string>>();
    validate(s);
    return s;
}

inline json to_json(const MarkedBorderedSurface& s) {
    return {{"genus", s.genus},
            {"boundary_marks", s.boundary_marks},
            {"punctures", s.punctures}};
}

inline json to_json(const IdealTriangulation& T) {
    json arcs = json::array();
    for (const auto& a : T.arcs)
        arcs.push_back({{"endpoints", {a.a, a.b}}, {"side", a.side}});
    return {{"surface", to_json(T.surface)}, {"arcs", arcs}};
}

inline json to_json(const QuiverWithPotential& q) {
    json arrows = json::array();
    for (const auto& [src, dst] : q.arrows) arrows.push_back({src, dst});
    json cycles = json::array();
    for (const auto& [coef, cyc] : q.potential_terms)
        cycles.push_back({{"coefficient", coef}, {"cycle", cyc}});
    return {{"schema", kSchema},
            {"vertices", q.vertices},
            {"arrows", arrows},
            {"potential", cycles}};
}

inline json to_json(const SpectrumTable& t) {
    json out;
    out["schema"] = kSchema;
    json saddles = json::array();
    for (const auto& s : t.saddles) {
        json e = {{"theta", s.theta},
                  {"Z", to_json(s.Z)},
                  {"endpoints", {s.zero_a, s.zero_b}},
                  {"closed", s.closed},
                  {"type", "saddle"}};
        if (!s.klass.empty()) e["class"] = s.klass;
        saddles.push_back(e);
    }
    out["saddles"] = saddles;
    json rings = json::array();
    for (const auto& r : t.rings) {
        json e = {{"theta", r.theta},
                  {"Z", to_json(r.Z)},
                  {"degenerate", r.degenerate},
                  {"probe_closed", r.probe_closed},
                  {"type", "ring"}};
        if (!r.klass.empty()) e["class"] = r.klass;
        rings.push_back(e);
    }
    out["rings"] = rings;
    out["h_max"] = t.h_max;
    out["grid"] = t.grid;
    return out;
}

inline json to_json(const BPSStructure& b) {
    json out;
    out["schema"] = kSchema;
    out["rank"] = b.rank;
    out["skew"] = to_json(b.skew);
    json zc = json::array();
    for (const auto& z : b.central_charge) zc.push_back(to_json(z));
    out["central_charge"] = zc;
    json om = json::array();
    for (const auto& [g, v] : b.omega)
        om.push_back({{"class", g}, {"omega", v.str()}});
    out["omega"] = om;
    return out;
}

inline json to_json(const RayDiagram& d) {
    json rays = json::array();
    for (const auto& r : d.rays) {
        json cls = json::array();
        for (const auto& c : r.classes) cls.push_back(c);
        rays.push_back({{"phase", r.phase}, {"height", r.height}, {"classes", cls}});
    }
    return {{"schema", kSchema}, {"rays", rays}};
}

// ---------------------------------------------------------------------------
// SVG emitters (hand-written; no plotting dependency)

namespace svg_detail {

struct Mapper {
    double xmin, xmax, ymin, ymax;
    int w, h;
    double X(double x) const { return (x - xmin) / (xmax - xmin) * w; }
    double Y(double y) const { return h - (y - ymin) / (ymax - ymin) * h; }
};

inline void polyline(std::ostringstream& os, const Mapper& m,
                     const std::vector<cplx>& pts, const char* color,
                     double width) {
    if (pts.size() < 2) return;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << width << "\" points=\"";
    for (const auto& p : pts) os << m.X(p.real()) << "," << m.Y(p.imag()) << " ";
    os << "\"/>\n";
}

}  // namespace svg_detail

// Horizontal-foliation picture: separating trajectories bold, generic thin,
// zeros as crosses, poles as dots.
inline std::string foliation_svg(const FoliationContext& ctx, double theta,
                                 int width = 640, int height = 640) {
    const double R = 2.2 * ctx.scale;
    svg_detail::Mapper m{-R, R, -R, R, width, height};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    auto clip = [&](const std::vector<cplx>& pts) {
        std::vector<cplx> out;
        for (const auto& p : pts)
            if (std::abs(p.real()) < R && std::abs(p.imag()) < R) out.push_back(p);
        return out;
    };

    // generic trajectories seeded on a coarse grid
    for (int gx = -4; gx <= 4; ++gx)
        for (int gy = -4; gy <= 4; ++gy) {
            const cplx z0(0.4 * ctx.scale * gx + 0.013, 0.4 * ctx.scale * gy + 0.017);
            bool near_crit = false;
            for (const auto& z : ctx.zeros)
                if (std::abs(z0 - z) < 0.05 * ctx.scale) near_crit = true;
            for (const auto& ic : ctx.inf)
                if (!ic.at_infinity && std::abs(z0 - ic.z) < 0.05 * ctx.scale)
                    near_crit = true;
            if (near_crit) continue;
            try {
                Trajectory f = integrate_trajectory(ctx, z0, theta, +1, 6 * ctx.scale);
                Trajectory b = integrate_trajectory(ctx, z0, theta, -1, 6 * ctx.scale);
                std::vector<cplx> pts(b.points.rbegin(), b.points.rend());
                pts.insert(pts.end(), f.points.begin(), f.points.end());
                svg_detail::polyline(os, m, clip(decimate(pts, 200)), "#9ecae1", 0.7);
            } catch (const NumericalError&) {
            }
        }
    // separating trajectories from every zero prong
    for (size_t zi = 0; zi < ctx.zeros.size(); ++zi) {
        if (ctx.zero_is_pole[zi]) continue;
        for (int pj = 0; pj < 3; ++pj) {
            try {
                Trajectory tr = launch_prong(ctx, static_cast<int>(zi), pj, theta);
                svg_detail::polyline(os, m, clip(decimate(tr.points, 300)),
                                     "#08306b", 1.8);
            } catch (const NumericalError&) {
            }
        }
    }
    // critical points
    for (size_t zi = 0; zi < ctx.zeros.size(); ++zi) {
        const cplx z = ctx.zeros[zi];
        const double x = m.X(z.real()), y = m.Y(z.imag());
        os << "<path d=\"M" << x - 5 << " " << y - 5 << " L" << x + 5 << " "
           << y + 5 << " M" << x - 5 << " " << y + 5 << " L" << x + 5 << " "
           << y - 5 << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    }
    for (const auto& ic : ctx.inf)
        if (!ic.at_infinity) {
            os << "<circle cx=\"" << m.X(ic.z.real()) << "\" cy=\""
               << m.Y(ic.z.imag()) << "\" r=\"5\" fill=\"black\"/>\n";
        }
    os << "</svg>\n";
    return os.str();
}

// ray diagram in the central charge plane, labeled +-Z(gamma)
inline std::string ray_diagram_svg(const BPSStructure& b, int width = 640,
                                   int height = 640) {
    RayDiagram d = ray_diagram(b);
    double zmax = 1;
    for (const auto& r : d.rays) zmax = std::max(zmax, r.height);
    const double R = 1.6 * zmax;
    svg_detail::Mapper m{-R, R, -R, R, width, height};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<circle cx=\"" << m.X(0) << "\" cy=\"" << m.Y(0)
       << "\" r=\"3\" fill=\"black\"/>\n";
    for (const auto& r : d.rays) {
        const cplx dir = std::polar(1.35 * zmax, r.phase);
        svg_detail::polyline(os, m, {cplx(0, 0), dir}, "#333333", 1.5);
        const cplx lab = std::polar(1.45 * zmax, r.phase);
        os << "<text x=\"" << m.X(lab.real()) << "\" y=\"" << m.Y(lab.imag())
           << "\" font-size=\"12\" text-anchor=\"middle\">";
        for (size_t c = 0; c < r.classes.size(); ++c) {
            if (c) os << ", ";
            os << "Z(";
            for (size_t i = 0; i < r.classes[c].size(); ++i) {
                if (i) os << ",";
                os << r.classes[c][i];
            }
            os << ")";
        }
        os << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace spectra
