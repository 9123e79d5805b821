// Command-line front end: exact Markov partition pipelines for concrete
// pseudo-Anosov maps (hyperbolic torus automorphisms with marked periodic
// points, affine automorphisms of square-tiled surfaces).
//
// Exit codes: 0 ok, 1 invalid input, 2 precondition violation,
// 3 internal cap exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pamarkov/jsonio.hpp"
#include "pamarkov/svg.hpp"

using namespace pam;

namespace {

struct Caps {
    int trace_doublings = 48;
    long period_factor = 3;
    bool flip_quotient = false;
};

ojson caps_json(const Caps& c) {
    ojson o;
    o["trace_doublings"] = c.trace_doublings;
    o["period_factor"] = c.period_factor;
    o["flip_quotient"] = c.flip_quotient;
    return o;
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

// Atomic write: temp file in the target directory, then rename.
void write_out(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        if (!data.empty() && data.back() != '\n') std::cout << "\n";
        return;
    }
    namespace fs = std::filesystem;
    fs::path p(path);
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::invalid_argument("cannot write " + path);
        out << data;
    }
    fs::rename(tmp, p);
}

PAMap load_map(const std::string& path) { return map_from_json(read_json(path)); }

// Pick the representative and the order for one-z subcommands.
struct ZChoice {
    int index = 0;
    std::string n_spec = "auto";
};

long resolve_n(TypePipeline& pipe, size_t zi, const std::string& n_spec, bool per_z) {
    const GraphData& gd = pipe.graph_data(zi);
    if (n_spec == "auto") return per_z ? gd.coeff.n : std::max(pipe.order(), gd.coeff.n);
    long n = std::stol(n_spec);
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Primitive Markov partitions and geometric types of concrete pseudo-Anosov maps"};
    app.require_subcommand(1);

    Caps caps;
    app.add_option("--cap-trace", caps.trace_doublings,
                   "doubling cap for leaf tracing searches (default 48)");
    app.add_option("--period-factor", caps.period_factor,
                   "safety factor for the periodic-boundary-point scan (default 3)");
    app.add_flag("--flip-quotient", caps.flip_quotient,
                 "canonicalize types modulo the global vertical flip as well");

    std::string map_path, map_b_path, out_path, partition_path;
    ZChoice zc;

    auto add_map = [&](CLI::App* sc) {
        sc->add_option("--map", map_path, "map description JSON")->required();
    };
    auto add_out = [&](CLI::App* sc) {
        sc->add_option("--out", out_path, "output path (default stdout)");
    };
    auto add_z = [&](CLI::App* sc) {
        sc->add_option("--z", zc.index, "index of the first-intersection representative (default 0)");
    };
    auto add_n = [&](CLI::App* sc) {
        sc->add_option("--n", zc.n_spec, "order n, or 'auto' (default)");
    };

    auto* sc_describe = app.add_subcommand("describe", "map data: stretch factor, separatrices");
    add_map(sc_describe);
    add_out(sc_describe);

    auto* sc_first = app.add_subcommand("first-points", "first intersection orbit representatives");
    add_map(sc_first);
    add_out(sc_first);

    auto* sc_graphs = app.add_subcommand("graphs", "adapted graphs and extreme rails for one z");
    add_map(sc_graphs);
    add_out(sc_graphs);
    add_z(sc_graphs);
    add_n(sc_graphs);

    auto* sc_coeff = app.add_subcommand("coefficient", "compatibility coefficient n(z)");
    add_map(sc_coeff);
    add_out(sc_coeff);
    add_z(sc_coeff);

    auto* sc_part = app.add_subcommand("partition", "primitive Markov partition R(z, n)");
    add_map(sc_part);
    add_out(sc_part);
    add_z(sc_part);
    add_n(sc_part);

    auto* sc_geo = app.add_subcommand("geotype", "geometric type of R(z, n)");
    add_map(sc_geo);
    add_out(sc_geo);
    add_z(sc_geo);
    add_n(sc_geo);

    auto* sc_order = app.add_subcommand("order", "compatibility order n(f)");
    add_map(sc_order);
    add_out(sc_order);

    auto* sc_types = app.add_subcommand("types", "canonical primitive geometric types T(f, n)");
    add_map(sc_types);
    add_out(sc_types);
    add_n(sc_types);

    auto* sc_cmp = app.add_subcommand("compare", "conjugacy invariants of two maps");
    sc_cmp->add_option("--map-a", map_path, "first map JSON")->required();
    sc_cmp->add_option("--map-b", map_b_path, "second map JSON")->required();
    add_out(sc_cmp);

    auto* sc_render = app.add_subcommand("render", "SVG rendering of a partition");
    sc_render->add_option("--map", map_path, "map description JSON")->required();
    sc_render->add_option("--partition", partition_path, "partition JSON")->required();
    sc_render->add_option("--out", out_path, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_describe->parsed()) {
            PAMap m = load_map(map_path);
            ojson o = describe_map(m);
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_first->parsed()) {
            PAMap m = load_map(map_path);
            ojson o = first_points_json(m, first_intersection_points(m, caps.trace_doublings));
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_graphs->parsed()) {
            PAMap m = load_map(map_path);
            TypePipeline pipe(m);
            if (zc.index < 0 || zc.index >= (int)pipe.reps().size())
                throw std::invalid_argument("--z out of range");
            const GraphData& gd = pipe.graph_data(zc.index);
            long n = resolve_n(pipe, zc.index, zc.n_spec, true);
            ojson o;
            o["schema_version"] = 1;
            o["z_index"] = zc.index;
            o["n"] = n;
            o["coefficient"] = gd.coeff.n;
            o["seed_family"] = star_json(gd.seeds);
            o["stable_graph"] = graph_json(m, gd.gs);
            o["unstable_graph"] = graph_json(m, gd.gu);
            o["unstable_graph_iterated"] = star_json(iterate_graph(m, gd.gu.g, n));
            o["extreme_u_rails"] = rails_json(gd.pair.ex_u);
            o["extreme_s_rails"] = rails_json(gd.pair.ex_s);
            o["compatible_at_n"] = compat_json(is_compatible_at(m, gd.pair, n));
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_coeff->parsed()) {
            PAMap m = load_map(map_path);
            TypePipeline pipe(m);
            if (zc.index < 0 || zc.index >= (int)pipe.reps().size())
                throw std::invalid_argument("--z out of range");
            const GraphData& gd = pipe.graph_data(zc.index);
            ojson o;
            o["schema_version"] = 1;
            o["z_index"] = zc.index;
            o["n_z"] = gd.coeff.n;
            o["forever_bound"] = gd.coeff.forever_bound;
            o["analytic_bound"] = gd.coeff.paper_bound;
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_part->parsed() || sc_geo->parsed()) {
            PAMap m = load_map(map_path);
            TypePipeline pipe(m);
            if (zc.index < 0 || zc.index >= (int)pipe.reps().size())
                throw std::invalid_argument("--z out of range");
            const GraphData& gd = pipe.graph_data(zc.index);
            long n = resolve_n(pipe, zc.index, zc.n_spec, true);
            if (n < gd.coeff.n) {
                std::cerr << "error: n < n(z) = " << gd.coeff.n << "\n";
                return 2;
            }
            MarkovPartition mp = build_partition(m, gd, n);
            if (sc_part->parsed()) {
                ojson o = partition_json(m, mp);
                o["markov_report"] = markov_report_json(validate_markov(m, mp));
                o["adapted_report"] =
                    adapted_report_json(validate_adapted(m, mp, caps.period_factor));
                o["caps"] = caps_json(caps);
                write_out(out_path, o.dump(2));
            } else {
                GeometricType t = extract_type(m, geometrize(mp));
                ojson o;
                o["schema_version"] = 1;
                o["z_index"] = zc.index;
                o["n"] = n;
                o["type"] = nlohmann::ordered_json::parse(type_to_json(t));
                o["canonical"] = canonical_type(t, caps.flip_quotient);
                auto inc = incidence_matrix(t);
                o["incidence"] = inc;
                o["caps"] = caps_json(caps);
                write_out(out_path, o.dump(2));
            }
        } else if (sc_order->parsed()) {
            PAMap m = load_map(map_path);
            TypePipeline pipe(m);
            ojson o;
            o["schema_version"] = 1;
            o["n_f"] = pipe.order();
            o["coefficients"] = pipe.coefficients();
            o["representatives"] = first_points_json(m, pipe.reps())["first_points"];
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_types->parsed()) {
            PAMap m = load_map(map_path);
            TypePipeline pipe(m);
            long n = zc.n_spec == "auto" ? pipe.order() : std::stol(zc.n_spec);
            if (n < pipe.order()) {
                std::cerr << "error: n < n(f) = " << pipe.order() << "\n";
                return 2;
            }
            auto types = pipe.types(n, caps.flip_quotient);
            ojson o;
            o["schema_version"] = 1;
            o["n"] = n;
            o["n_f"] = pipe.order();
            o["count"] = types.size();
            auto arr = ojson::array();
            for (const auto& s : types) arr.push_back(nlohmann::ordered_json::parse(s));
            o["types"] = arr;
            auto keys = ojson::array();
            for (const auto& s : types) keys.push_back(s);
            o["canonical_keys"] = keys;
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_cmp->parsed()) {
            PAMap a = load_map(map_path), b = load_map(map_b_path);
            CompareResult r = compare_invariants(a, b, caps.flip_quotient);
            ojson o;
            o["schema_version"] = 1;
            o["status"] = r.status;
            o["n_f"] = r.n_f;
            o["n_g"] = r.n_g;
            o["detail"] = r.detail;
            o["types_f"] = r.types_f;
            o["types_g"] = r.types_g;
            o["quotient"] = caps.flip_quotient ? "relabeling+flip" : "relabeling";
            o["caps"] = caps_json(caps);
            write_out(out_path, o.dump(2));
        } else if (sc_render->parsed()) {
            PAMap m = load_map(map_path);
            MarkovPartition mp = partition_from_json(m, read_json(partition_path));
            write_out(out_path, render_partition_svg(m, mp));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error (cap exceeded): " << e.what() << "\n";
        return 3;
    }
    return 0;
}
