#include "losmap/errors.hpp"
#include "losmap/experiment.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace losmap::experiment {

namespace {

std::string g9(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line)
{
  try
  {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size())
      return v;
  }
  catch (const std::exception&)
  {
  }
  throw Error("results line " + std::to_string(line) + ": bad number '" + s + "'");
}

std::uint64_t to_u64(const std::string& s, std::size_t line)
{
  try
  {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used == s.size())
      return v;
  }
  catch (const std::exception&)
  {
  }
  throw Error("results line " + std::to_string(line) + ": bad integer '" + s + "'");
}

} // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
  os << csv_header << '\n';
  for (const auto& r : rows)
  {
    os << r.scenario << ',' << g9(r.density) << ',' << g9(r.cav_fraction) << ','
       << g9(r.gamma_th_db) << ',' << r.solver << ',' << r.seed << ',' << g9(r.lambda2) << ','
       << g9(r.objective) << ',' << r.messages << ',' << g9(r.wall_time_ms) << '\n';
  }
}

void write_jsonl(std::ostream& os, const std::vector<ResultRow>& rows)
{
  using nlohmann::json;
  for (const auto& r : rows)
  {
    os << "{\"scenario\":" << json(r.scenario).dump() << ",\"density\":" << g9(r.density)
       << ",\"cav_fraction\":" << g9(r.cav_fraction) << ",\"gamma_th_db\":" << g9(r.gamma_th_db)
       << ",\"solver\":" << json(r.solver).dump() << ",\"seed\":" << r.seed
       << ",\"lambda2\":" << g9(r.lambda2) << ",\"objective\":" << g9(r.objective)
       << ",\"messages\":" << r.messages << ",\"wall_time_ms\":" << g9(r.wall_time_ms) << "}\n";
  }
}

std::vector<ResultRow> read_csv(std::istream& is)
{
  std::string line;
  if (!std::getline(is, line) || line != csv_header)
    throw Error("results CSV must start with the header row");

  std::vector<ResultRow> rows;
  std::size_t n = 1;
  while (std::getline(is, line))
  {
    ++n;
    if (line.empty())
      continue;
    const auto f = split(line);
    if (f.size() != 10)
      throw Error("results line " + std::to_string(n) + ": expected 10 fields");
    ResultRow r;
    r.scenario = f[0];
    r.density = to_double(f[1], n);
    r.cav_fraction = to_double(f[2], n);
    r.gamma_th_db = to_double(f[3], n);
    r.solver = f[4];
    r.seed = to_u64(f[5], n);
    r.lambda2 = to_double(f[6], n);
    r.objective = to_double(f[7], n);
    r.messages = to_u64(f[8], n);
    r.wall_time_ms = to_double(f[9], n);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_jsonl(std::istream& is)
{
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line))
  {
    ++n;
    if (line.empty())
      continue;
    try
    {
      const auto j = nlohmann::json::parse(line);
      ResultRow r;
      r.scenario = j.at("scenario").get<std::string>();
      r.density = j.at("density").get<double>();
      r.cav_fraction = j.at("cav_fraction").get<double>();
      r.gamma_th_db = j.at("gamma_th_db").get<double>();
      r.solver = j.at("solver").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.lambda2 = j.at("lambda2").get<double>();
      r.objective = j.at("objective").get<double>();
      r.messages = j.at("messages").get<std::uint64_t>();
      r.wall_time_ms = j.at("wall_time_ms").get<double>();
      rows.push_back(std::move(r));
    }
    catch (const nlohmann::json::exception& e)
    {
      throw Error("results line " + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

std::filesystem::path emit(
  const std::vector<ResultRow>& rows, OutputFormat format, const std::filesystem::path& dir)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  const auto path = dir / (format == OutputFormat::csv ? "results.csv" : "results.jsonl");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  if (format == OutputFormat::csv)
    write_csv(out, rows);
  else
    write_jsonl(out, rows);
  out.flush();
  if (!out)
    throw Error("write to " + path.string() + " failed");
  return path;
}

} // namespace losmap::experiment
