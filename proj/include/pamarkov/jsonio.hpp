#pragma once

#include <json.hpp>

#include "pamarkov/geotype.hpp"

namespace pam {

using ojson = nlohmann::ordered_json;

/// Exact value node: {"exact": "p/q+r/s*sqrt(D)", "approx": <double>}.
/// The float field is convenience only; parsing uses the exact string.
ojson jq(const QuadNum& q);
QuadNum jq_parse(const nlohmann::json& v);

/// The {a_num, a_den, b_num, b_den, D} object encoding.
ojson jq_obj(const QuadNum& q);
QuadNum jq_obj_parse(const nlohmann::json& v);

ojson point_json(const SurfacePoint& p);
SurfacePoint point_from_json(const nlohmann::json& j);

/// Map descriptions: {"kind":"torus","matrix":[[..]],"marked":[["p/q","r/s"],..]}
/// or {"kind":"origami","squares":n,"right":[..],"top":[..],"matrix":[[..]],
/// "seed":[i,j]} (1-based lists; seed optional).
PAMap map_from_json(const nlohmann::json& j);
ojson describe_map(const PAMap& m);

ojson first_points_json(const PAMap& m, const std::vector<FirstPoint>& reps);
ojson graph_json(const PAMap& m, const AdaptedGraph& g);
ojson star_json(const StarGraph& g);
StarGraph star_from_json(const nlohmann::json& j);
ojson rails_json(const std::vector<Rail>& rails);
ojson compat_json(const CompatReport& r);

ojson partition_json(const PAMap& m, const MarkovPartition& mp);
MarkovPartition partition_from_json(const PAMap& m, const nlohmann::json& j);

ojson markov_report_json(const MarkovReport& r);
ojson adapted_report_json(const AdaptedReport& r);

}  // namespace pam
