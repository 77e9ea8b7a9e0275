#ifndef BESQ_IO_HPP
#define BESQ_IO_HPP

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "besq/analysis.hpp"
#include "besq/domain.hpp"
#include "besq/sde.hpp"

namespace besq {

// Shortest round-trip decimal representation (<= 17 significant digits).
std::string format_double(double v);

// Header t,X1,...,Xp (particle or eigenvalue view) or t,e1,...,ep.
void write_path_csv(std::ostream& os, const PathRecord& path);
PathRecord read_path_csv(std::istream& is);

nlohmann::json events_json(const PathRecord& path);
nlohmann::json path_json(const PathRecord& path);
nlohmann::json report_json(const ClassificationReport& report);
nlohmann::json summary_json(const McSummary& summary);
nlohmann::json hitting_json(const HittingTimes& ht, double horizon);

}  // namespace besq

#endif  // BESQ_IO_HPP
