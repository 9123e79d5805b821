#include "pamarkov/jsonio.hpp"

#include <cinttypes>
#include <cstdio>

namespace pam {

ojson jq(const QuadNum& q) {
    ojson o;
    o["exact"] = q.str();
    o["approx"] = q.approx();
    return o;
}

QuadNum jq_parse(const nlohmann::json& v) {
    if (v.is_string()) return QuadNum::parse(v.get<std::string>());
    if (v.is_object() && v.contains("exact")) return QuadNum::parse(v["exact"].get<std::string>());
    if (v.is_object() && v.contains("a_num")) return jq_obj_parse(v);
    if (v.is_number_integer()) return QuadNum(v.get<long>());
    throw std::invalid_argument("jq_parse: unrecognized exact-number encoding");
}

ojson jq_obj(const QuadNum& q) {
    ojson o;
    o["a_num"] = q.a().get_num().get_str();
    o["a_den"] = q.a().get_den().get_str();
    o["b_num"] = q.b().get_num().get_str();
    o["b_den"] = q.b().get_den().get_str();
    o["D"] = q.d();
    return o;
}

QuadNum jq_obj_parse(const nlohmann::json& v) {
    mpq_class a(mpz_class(v.at("a_num").get<std::string>()),
                mpz_class(v.at("a_den").get<std::string>()));
    mpq_class b(mpz_class(v.at("b_num").get<std::string>()),
                mpz_class(v.at("b_den").get<std::string>()));
    a.canonicalize();
    b.canonicalize();
    return QuadNum(a, b, v.at("D").get<long>());
}

ojson point_json(const SurfacePoint& p) {
    ojson o;
    o["square"] = p.square + 1;
    o["x"] = jq(p.x);
    o["y"] = jq(p.y);
    return o;
}

SurfacePoint point_from_json(const nlohmann::json& j) {
    return SurfacePoint(j.at("square").get<int>() - 1, jq_parse(j.at("x")), jq_parse(j.at("y")));
}

PAMap map_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    auto mat = [&]() {
        auto m = j.at("matrix");
        return Mat2{m[0][0].get<long>(), m[0][1].get<long>(), m[1][0].get<long>(),
                    m[1][1].get<long>()};
    };
    if (kind == "torus") {
        std::vector<std::pair<mpq_class, mpq_class>> marked;
        for (const auto& mp : j.at("marked"))
            marked.push_back({parse_rational(mp[0].get<std::string>()),
                              parse_rational(mp[1].get<std::string>())});
        return PAMap::make_torus(mat(), marked);
    }
    if (kind == "origami") {
        int n = j.at("squares").get<int>();
        std::vector<int> right, top;
        for (const auto& v : j.at("right")) right.push_back(v.get<int>() - 1);
        for (const auto& v : j.at("top")) top.push_back(v.get<int>() - 1);
        if ((int)right.size() != n || (int)top.size() != n)
            throw std::invalid_argument("map_from_json: permutation sizes");
        std::optional<std::pair<int, int>> seed;
        if (j.contains("seed"))
            seed = std::make_pair(j["seed"][0].get<int>() - 1, j["seed"][1].get<int>() - 1);
        return PAMap::make_origami(FlatSurface(right, top), mat(), seed);
    }
    throw std::invalid_argument("map_from_json: kind must be torus or origami");
}

ojson describe_map(const PAMap& m) {
    ojson o;
    o["schema_version"] = 1;
    o["kind"] = m.is_torus() ? "torus" : "origami";
    o["matrix"] = {{m.matrix().a, m.matrix().b}, {m.matrix().c, m.matrix().d}};
    o["D"] = m.D();
    o["lambda"] = jq(m.lambda());
    o["eigenvalue_sign"] = m.eig_sign();
    o["dir_u"] = {jq(m.dir(UNSTABLE).x), jq(m.dir(UNSTABLE).y)};
    o["dir_s"] = {jq(m.dir(STABLE).x), jq(m.dir(STABLE).y)};
    o["genus"] = m.surface().genus();
    o["squares"] = m.surface().num_squares();
    o["eigen_area"] = jq(m.eigen_area());
    auto sings = ojson::array();
    for (const auto& s : m.singularities()) {
        ojson so;
        so["id"] = s.id;
        so["kind"] = s.is_cone ? "cone" : "marked";
        so["point"] = point_json(s.point);
        so["prongs_per_foliation"] = s.prongs;
        so["image"] = s.image;
        so["orbit"] = s.orbit;
        so["period"] = s.period;
        sings.push_back(so);
    }
    o["singularities"] = sings;
    for (int fol : {STABLE, UNSTABLE}) {
        auto arr = ojson::array();
        for (const auto& sep : m.seps(fol)) {
            ojson so;
            so["id"] = sep.id;
            so["singularity"] = sep.sing;
            so["prong"] = sep.prong;
            so["sign"] = sep.sign;
            so["image"] = sep.image;
            arr.push_back(so);
        }
        o[fol == STABLE ? "stable_separatrices" : "unstable_separatrices"] = arr;
    }
    return o;
}

ojson first_points_json(const PAMap& m, const std::vector<FirstPoint>& reps) {
    ojson o;
    o["schema_version"] = 1;
    auto arr = ojson::array();
    for (const auto& z : reps) {
        ojson zo;
        zo["z"] = point_json(z.z);
        zo["p"] = m.seps(STABLE)[z.s_sep].sing;
        zo["q"] = m.seps(UNSTABLE)[z.u_sep].sing;
        zo["stable_sep"] = z.s_sep;
        zo["unstable_sep"] = z.u_sep;
        zo["stable_pos"] = jq(z.s_pos);
        zo["unstable_pos"] = jq(z.u_pos);
        zo["orbit_size_hint"] = z.pair_period;
        arr.push_back(zo);
    }
    o["first_points"] = arr;
    return o;
}

ojson star_json(const StarGraph& g) {
    ojson o;
    o["foliation"] = g.foliation == STABLE ? "s" : "u";
    auto arr = ojson::array();
    for (const auto& l : g.len) arr.push_back(jq(l));
    o["len"] = arr;
    return o;
}

StarGraph star_from_json(const nlohmann::json& j) {
    StarGraph g;
    g.foliation = j.at("foliation").get<std::string>() == "s" ? STABLE : UNSTABLE;
    for (const auto& v : j.at("len")) g.len.push_back(jq_parse(v));
    return g;
}

ojson graph_json(const PAMap& m, const AdaptedGraph& g) {
    ojson o = star_json(g.g);
    auto tips = ojson::array();
    for (const auto& t : g.tip) {
        ojson to;
        to["sep"] = t.t_sep;
        to["pos"] = jq(t.t_pos);
        tips.push_back(to);
    }
    o["tips"] = tips;
    return o;
}

ojson rails_json(const std::vector<Rail>& rails) {
    auto arr = ojson::array();
    for (const auto& r : rails) {
        ojson ro;
        ro["sep"] = r.sep;
        ro["lo"] = jq(r.lo);
        ro["hi"] = jq(r.hi);
        ro["anchor"] = r.from_tip ? "tip" : "prong";
        ro["side"] = r.side;
        arr.push_back(ro);
    }
    return arr;
}

ojson compat_json(const CompatReport& r) {
    ojson o;
    o["compatible"] = r.ok;
    auto arr = ojson::array();
    for (const auto& f : r.failures) {
        ojson fo;
        fo["kind"] = f.kind;
        fo["graph"] = f.foliation == STABLE ? "s" : "u";
        fo["sep"] = f.sep;
        fo["pos"] = jq(f.pos);
        arr.push_back(fo);
    }
    o["failures"] = arr;
    return o;
}

namespace {

ojson side_json(const std::vector<SideArc>& side) {
    auto arr = ojson::array();
    for (const auto& a : side) {
        ojson ao;
        ao["sep"] = a.sep;
        ao["lo"] = jq(a.lo);
        ao["hi"] = jq(a.hi);
        arr.push_back(ao);
    }
    return arr;
}

std::vector<SideArc> side_from_json(const nlohmann::json& j) {
    std::vector<SideArc> out;
    for (const auto& a : j)
        out.push_back(SideArc{a.at("sep").get<int>(), jq_parse(a.at("lo")), jq_parse(a.at("hi"))});
    return out;
}

}  // namespace

ojson partition_json(const PAMap& m, const MarkovPartition& mp) {
    ojson o;
    o["schema_version"] = 1;
    o["kind"] = "markov_partition";
    o["n"] = mp.n;
    ojson zo;
    zo["stable_sep"] = mp.z.s_sep;
    zo["unstable_sep"] = mp.z.u_sep;
    zo["stable_pos"] = jq(mp.z.s_pos);
    zo["unstable_pos"] = jq(mp.z.u_pos);
    zo["pair_period"] = mp.z.pair_period;
    zo["point"] = point_json(mp.z.z);
    o["z"] = zo;
    o["stable_graph"] = star_json(mp.gs);
    o["unstable_graph_base"] = star_json(mp.gu);
    o["unstable_graph"] = star_json(mp.gu_eff);
    auto rects = ojson::array();
    for (const auto& r : mp.rects) {
        ojson ro;
        ro["id"] = r.id;
        ro["width"] = jq(r.width());
        ro["height"] = jq(r.height());
        ro["area"] = jq(r.area());
        auto corners = ojson::array();
        for (int a : {0, 1})
            for (int b : {0, 1}) {
                ojson co;
                co["s_side"] = a;
                co["u_side"] = b;
                co["point"] = point_json(r.corner[a][b]);
                corners.push_back(co);
            }
        ro["corners"] = corners;
        ro["side_stable_bottom"] = side_json(r.side_stable[0]);
        ro["side_stable_top"] = side_json(r.side_stable[1]);
        ro["side_unstable_left"] = side_json(r.side_unstable[0]);
        ro["side_unstable_right"] = side_json(r.side_unstable[1]);
        auto cells = ojson::array();
        for (const auto& c : r.cells) {
            ojson co;
            co["square"] = c.square + 1;
            co["off_u"] = jq(c.off_u);
            co["off_s"] = jq(c.off_s);
            auto poly = ojson::array();
            for (const auto& p : c.poly) poly.push_back({jq(p.x), jq(p.y)});
            co["poly"] = poly;
            cells.push_back(co);
        }
        ro["cells"] = cells;
        ro["witness"] = point_json(r.witness);
        rects.push_back(ro);
    }
    o["rects"] = rects;
    return o;
}

MarkovPartition partition_from_json(const PAMap& m, const nlohmann::json& j) {
    MarkovPartition mp;
    mp.n = j.at("n").get<long>();
    mp.z.s_sep = j.at("z").at("stable_sep").get<int>();
    mp.z.u_sep = j.at("z").at("unstable_sep").get<int>();
    mp.z.s_pos = jq_parse(j.at("z").at("stable_pos"));
    mp.z.u_pos = jq_parse(j.at("z").at("unstable_pos"));
    mp.z.pair_period = j.at("z").at("pair_period").get<long>();
    mp.z.z = point_from_json(j.at("z").at("point"));
    mp.gs = star_from_json(j.at("stable_graph"));
    mp.gu = star_from_json(j.at("unstable_graph_base"));
    mp.gu_eff = star_from_json(j.at("unstable_graph"));
    for (const auto& rj : j.at("rects")) {
        PRect r;
        r.id = rj.at("id").get<int>();
        for (const auto& co : rj.at("corners")) {
            int a = co.at("s_side").get<int>(), b = co.at("u_side").get<int>();
            r.corner[a][b] = point_from_json(co.at("point"));
        }
        r.side_stable[0] = side_from_json(rj.at("side_stable_bottom"));
        r.side_stable[1] = side_from_json(rj.at("side_stable_top"));
        r.side_unstable[0] = side_from_json(rj.at("side_unstable_left"));
        r.side_unstable[1] = side_from_json(rj.at("side_unstable_right"));
        bool first = true;
        for (const auto& cj : rj.at("cells")) {
            DevCell c;
            c.square = cj.at("square").get<int>() - 1;
            c.off_u = jq_parse(cj.at("off_u"));
            c.off_s = jq_parse(cj.at("off_s"));
            for (const auto& pj : cj.at("poly"))
                c.poly.push_back(Vec2q{jq_parse(pj[0]), jq_parse(pj[1])});
            for (const auto& p : c.poly) {
                QuadNum u = c.off_u + m.du(p), s = c.off_s + m.ds(p);
                if (first) {
                    r.u1 = r.u2 = u;
                    r.s1 = r.s2 = s;
                    first = false;
                } else {
                    if (u < r.u1) r.u1 = u;
                    if (u > r.u2) r.u2 = u;
                    if (s < r.s1) r.s1 = s;
                    if (s > r.s2) r.s2 = s;
                }
            }
            r.cells.push_back(std::move(c));
        }
        r.witness = point_from_json(rj.at("witness"));
        mp.rects.push_back(std::move(r));
    }
    return mp;
}

ojson markov_report_json(const MarkovReport& r) {
    ojson o;
    o["boundary_invariance"] = r.boundary_ok;
    o["subrectangle_property"] = r.subrect_ok;
    o["cover_disjoint"] = r.cover_ok;
    o["ok"] = r.ok();
    o["issues"] = r.issues;
    return o;
}

ojson adapted_report_json(const AdaptedReport& r) {
    ojson o;
    o["corner_property"] = r.corner_ok;
    o["no_nonsingular_periodic_boundary"] = r.periodic_ok;
    o["ok"] = r.ok();
    o["issues"] = r.issues;
    return o;
}

}  // namespace pam
