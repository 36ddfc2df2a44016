#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nndlab/crs.hpp"
#include "nndlab/diagnostics.hpp"
#include "nndlab/nnd.hpp"
#include "nndlab/ranking.hpp"
#include "nndlab/spaces.hpp"
#include "nndlab/twonrq.hpp"

namespace nndlab {

using Json = nlohmann::ordered_json;

/// RFC 4180 quoting: fields holding a comma, quote or line break are quoted.
std::string csv_field(std::string_view text);

/// Shortest text that parses back to the same double.
std::string format_double(double x);

/// CSV files open with "# <config json>"; readers skip '#' lines.
void write_config_comment(std::ostream& out, const Json& config);

// K-NN graphs: rows source,rank,target (rank is 1-based).
void write_knn_csv(std::ostream& out, const KnnGraph& graph);
KnnGraph read_knn_csv(std::istream& in);
Json knn_to_json(const KnnGraph& graph);
KnnGraph knn_from_json(const Json& j);

// Spaces: parameters and seed only; points separately as CSV.
Json space_to_json(const ParisSpace& space);
Json space_to_json(const CircleSpace& space);
Json space_to_json(const PowersOfTwoSpace& space);
Json space_to_json(const LcsSpace& space);
Json space_to_json(const TorusSpace& space);
void write_points_csv(std::ostream& out, const CircleSpace& space);
void write_points_csv(std::ostream& out, const TorusSpace& space);

Json nnd_report(const NndConfig& config, std::size_t n, const NndResult& result);

// Linear orders: rows sigma,pair_id,lo,hi in sigma order.
void write_order_csv(std::ostream& out, const LinearOrder& order);
LinearOrder read_order_csv(std::istream& in, std::size_t n);

// Rank tables: rows point,rank,item.
void write_rank_table_csv(std::ostream& out, const RankTable& table);
RankTable read_rank_table_csv(std::istream& in);
Json certificate_to_json(const Crs& crs);
void write_embedding_csv(std::ostream& out, const EmbeddingMatrix& emb);
Json census_to_json(const CrsCensus& census);
Json fraction_to_json(const WhiteEdgeFraction& fraction);

// 2NRQ.
Json params_to_json(const TwoNrqParams& params);
void write_schedule_csv(std::ostream& out, const Schedule& schedule);
Json schedule_to_json(const Schedule& schedule);
Json sampling_to_json(const SamplingReport& report);
Json run_to_json(const TwoNrqRun& run);

// Diagnostics.
Json diameter_to_json(const DiameterReport& report);
void write_diameter_histogram_csv(std::ostream& out, const DiameterReport& report);
Json expansion_to_json(const ExpansionReport& report);

}  // namespace nndlab
