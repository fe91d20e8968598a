#include "rss/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rss {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad numeric field '" + s + "'");
  return v;
}

}  // namespace

void write_population_csv(std::ostream& os, const Population& pop) {
  os << "id,x,y,rank\n";
  for (int u = 0; u < pop.size(); ++u) {
    const double y = pop.has_auxiliary() ? pop.auxiliary()[static_cast<std::size_t>(u)]
                                         : pop.x(u);
    os << (u + 1) << ',' << format_double(pop.x(u)) << ',' << format_double(y) << ','
       << pop.judgment_rank(u) << '\n';
  }
}

Population read_population_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty population CSV");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "x")
    throw std::invalid_argument("population CSV must start with header id,x[,y,rank]");
  const bool has_y = header.size() >= 3 && header[2] == "y";
  std::vector<double> x;
  std::vector<double> y;
  bool any_y = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() < 2) throw std::invalid_argument("population CSV row too short: " + line);
    const long id = std::stol(f[0]);
    if (id != static_cast<long>(x.size()) + 1)
      throw std::invalid_argument("population CSV ids must run 1..N in order");
    x.push_back(parse_double_field(f[1]));
    if (has_y && f.size() >= 3 && !f[2].empty()) {
      y.push_back(parse_double_field(f[2]));
      any_y = true;
    } else if (any_y) {
      throw std::invalid_argument("population CSV has a partial y column");
    }
  }
  if (any_y && y.size() != x.size())
    throw std::invalid_argument("population CSV has a partial y column");
  if (any_y) return Population(std::move(x), std::move(y));
  return Population(std::move(x));
}

void write_sample_csv(std::ostream& os, const RankedSetSample& sample) {
  os << "set_index,in_set_rank,population_id,value,measured\n";
  for (const auto& e : sample.entries) {
    os << e.set_index << ',' << e.in_set_rank << ',' << (e.unit + 1) << ',';
    if (!std::isnan(e.value)) os << format_double(e.value);
    os << ',' << (e.measured ? 1 : 0) << '\n';
  }
}

RankedSetSample read_sample_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty sample CSV");
  if (split_csv_line(line) !=
      std::vector<std::string>{"set_index", "in_set_rank", "population_id", "value", "measured"})
    throw std::invalid_argument(
        "sample CSV must have header set_index,in_set_rank,population_id,value,measured");
  RankedSetSample sample;
  int max_rank = 1;
  int max_set = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 5) throw std::invalid_argument("sample CSV row needs 5 fields: " + line);
    SampleEntry e;
    e.set_index = std::stoi(f[0]);
    e.in_set_rank = std::stoi(f[1]);
    const int id = std::stoi(f[2]);
    e.unit = id - 1;  // id 0 (unknown unit) becomes -1
    e.value = parse_double_field(f[3]);
    e.measured = std::stoi(f[4]) != 0;
    e.weight_rank = id;
    sample.entries.push_back(e);
    max_rank = std::max(max_rank, e.in_set_rank);
    max_set = std::max(max_set, e.set_index);
  }
  if (sample.entries.empty()) throw std::invalid_argument("sample CSV has no rows");
  if (max_set % max_rank != 0)
    throw std::invalid_argument("sample CSV set count is not a multiple of the set size");
  // Reconstruct the rank pattern from the measured rows.
  DesignSpec spec;
  spec.set_size = max_rank;
  spec.cycles = max_set / max_rank;
  spec.rank_pattern.assign(static_cast<std::size_t>(max_set), 1);
  for (const auto& e : sample.entries)
    if (e.measured) spec.rank_pattern[static_cast<std::size_t>(e.set_index - 1)] = e.in_set_rank;
  spec.validate();
  sample.spec = spec;
  return sample;
}

std::string inclusion_to_json(const InclusionTable& table) {
  json j;
  j["N"] = table.population_size;
  j["design"] = design_name(table.spec.design);
  j["k"] = table.spec.set_size;
  j["m"] = table.spec.cycles;
  j["rank_pattern"] = table.spec.rank_pattern;
  j["method"] = method_name(table.method);
  j["first_order"] = table.first;
  j["second_order"] = table.second;
  if (table.method == TableMethod::MonteCarlo) {
    j["reps"] = table.mc_reps;
    j["standard_errors"] = {{"first_order", table.first_se},
                            {"second_order", table.second_se}};
  }
  return j.dump(2);
}

InclusionTable inclusion_from_json(const std::string& text) {
  const json j = json::parse(text);
  InclusionTable t;
  t.population_size = j.at("N").get<int>();
  t.spec.design = design_from_name(j.at("design").get<std::string>());
  t.spec.set_size = j.at("k").get<int>();
  t.spec.cycles = j.at("m").get<int>();
  t.spec.rank_pattern = j.at("rank_pattern").get<std::vector<int>>();
  t.method = method_from_name(j.at("method").get<std::string>());
  t.first = j.at("first_order").get<std::vector<double>>();
  t.second = j.at("second_order").get<std::vector<double>>();
  const std::size_t N = static_cast<std::size_t>(t.population_size);
  if (t.first.size() != N || t.second.size() != N * N)
    throw std::invalid_argument("inclusion JSON arrays do not match N");
  if (j.contains("reps")) t.mc_reps = j.at("reps").get<std::uint64_t>();
  if (j.contains("standard_errors")) {
    t.first_se = j.at("standard_errors").at("first_order").get<std::vector<double>>();
    t.second_se = j.at("standard_errors").at("second_order").get<std::vector<double>>();
  }
  return t;
}

void write_edf_csv(std::ostream& os, const EdfEstimate& edf) {
  os << "x,F_hat\n";
  for (std::size_t j = 0; j < edf.support().size(); ++j)
    os << format_double(edf.support()[j]) << ',' << format_double(edf.cumulative()[j])
       << '\n';
}

SimulationConfig simulation_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  SimulationConfig cfg;
  cfg.population_size = j.at("N").get<int>();
  cfg.dist = distribution_from_name(j.value("dist", std::string("normal")));
  if (j.contains("designs")) {
    cfg.designs.clear();
    for (const auto& d : j.at("designs")) cfg.designs.push_back(design_from_name(d.get<std::string>()));
  }
  cfg.set_size = j.at("k").get<int>();
  cfg.cycles = j.at("m").get<int>();
  if (j.contains("rank_pattern")) cfg.rank_pattern = j.at("rank_pattern").get<std::vector<int>>();
  cfg.rho = j.value("rho", 1.0);
  cfg.reps = j.value("reps", static_cast<std::uint64_t>(10000));
  if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<double>>();
  cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(0));
  return cfg;
}

std::string simulation_config_to_json(const SimulationConfig& cfg) {
  json j;
  j["N"] = cfg.population_size;
  j["dist"] = distribution_name(cfg.dist);
  std::vector<std::string> designs;
  for (Design d : cfg.designs) designs.push_back(design_name(d));
  j["designs"] = designs;
  j["k"] = cfg.set_size;
  j["m"] = cfg.cycles;
  if (!cfg.rank_pattern.empty()) j["rank_pattern"] = cfg.rank_pattern;
  j["rho"] = cfg.rho;
  j["reps"] = cfg.reps;
  j["p_grid"] = cfg.p_grid;
  j["master_seed"] = cfg.master_seed;
  return j.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string resolve_output_path(const std::string& name) {
  if (name.empty() || name.find('/') != std::string::npos) return name;
  const char* dir = std::getenv("RSSKIT_OUT_DIR");
  if (!dir || !*dir) return name;
  return std::string(dir) + "/" + name;
}

}  // namespace rss
