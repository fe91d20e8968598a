#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "rss/designs.hpp"
#include "rss/estimators.hpp"
#include "rss/inclusion.hpp"
#include "rss/population.hpp"
#include "rss/simulation.hpp"

namespace rss {

// Shortest round-trip decimal form of a double ("." separator, no locale).
std::string format_double(double v);

// Population CSV, header `id,x,y,rank`.  y and rank are optional on input;
// on output y falls back to x and rank to the judgment rank.
void write_population_csv(std::ostream& os, const Population& pop);
Population read_population_csv(std::istream& is);

// Sample CSV, header `set_index,in_set_rank,population_id,value,measured`.
// Unmeasured set members are kept for replacement audits; a missing value
// field round-trips as NaN.  population_id 0 marks an unknown unit.
void write_sample_csv(std::ostream& os, const RankedSetSample& sample);
RankedSetSample read_sample_csv(std::istream& is);

// Inclusion table JSON: N, design, k, m, rank_pattern, method, first_order,
// second_order (row-major), optional standard_errors.
std::string inclusion_to_json(const InclusionTable& table);
InclusionTable inclusion_from_json(const std::string& text);

// EDF CSV, header `x,F_hat`, one row per support point.
void write_edf_csv(std::ostream& os, const EdfEstimate& edf);

// Simulation config JSON mirroring SimulationConfig.
SimulationConfig simulation_config_from_json(const std::string& text);
std::string simulation_config_to_json(const SimulationConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Resolves an output path against RSSKIT_OUT_DIR when the caller gave a
// bare file name and the variable is set.
std::string resolve_output_path(const std::string& name);

}  // namespace rss
