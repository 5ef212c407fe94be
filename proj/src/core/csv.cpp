#include "core/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "core/errors.hpp"
#include "core/textio.hpp"

namespace survkit {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void row_error(std::size_t lineno, const std::string& what) {
  throw DataError("line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  std::size_t lineno = 0;

  // Skip comment lines, then read the header.
  std::string header;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    header = std::string(t);
    break;
  }
  if (header.empty()) throw DataError("no records in '" + path + "'");

  auto cols = split_fields(header);
  if (cols.size() < 3 || trim(cols[0]) != "id" || trim(cols[1]) != "time" || trim(cols[2]) != "event")
    throw DataError("header must start with id,time,event (got '" + header + "')");

  std::size_t dim_a = 0, dim_b = 0;
  for (std::size_t c = 3; c < cols.size(); ++c) {
    auto name = trim(cols[c]);
    std::string want_a = "a_" + std::to_string(dim_a);
    std::string want_b = "b_" + std::to_string(dim_b);
    if (dim_b == 0 && name == want_a) {
      ++dim_a;
    } else if (name == want_b) {
      ++dim_b;
    } else {
      throw DataError("unexpected column '" + std::string(name) + "' (want " + want_a + " or " + want_b + ")");
    }
  }

  Dataset ds;
  ds.dim_a = dim_a;
  ds.dim_b = dim_b;
  ds.name = std::filesystem::path(path).stem().string();

  std::unordered_set<std::int64_t> seen_ids;
  const std::size_t n_fields = 3 + dim_a + dim_b;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty()) continue;
    auto fields = split_fields(t);
    if (fields.size() != n_fields)
      row_error(lineno, "expected " + std::to_string(n_fields) + " fields, got " + std::to_string(fields.size()));

    SurvivalRecord rec;
    auto id = parse_int(trim(fields[0]));
    if (!id) row_error(lineno, "bad id '" + std::string(fields[0]) + "'");
    rec.id = *id;
    if (!seen_ids.insert(rec.id).second) row_error(lineno, "duplicate id " + std::to_string(rec.id));

    auto time = parse_double(trim(fields[1]));
    if (!time) row_error(lineno, "bad time '" + std::string(fields[1]) + "'");
    if (!(*time > 0.0)) row_error(lineno, "time must be > 0, got " + std::string(fields[1]));
    rec.time = *time;

    auto ev = parse_int(trim(fields[2]));
    if (!ev || (*ev != 0 && *ev != 1)) row_error(lineno, "event must be 0 or 1, got '" + std::string(fields[2]) + "'");
    rec.event = static_cast<int>(*ev);

    rec.features_a.reserve(dim_a);
    rec.features_b.reserve(dim_b);
    for (std::size_t c = 0; c < dim_a + dim_b; ++c) {
      auto v = parse_double(trim(fields[3 + c]));
      if (!v) row_error(lineno, "bad feature value '" + std::string(fields[3 + c]) + "'");
      (c < dim_a ? rec.features_a : rec.features_b).push_back(*v);
    }
    ds.records.push_back(std::move(rec));
  }

  if (ds.records.empty()) throw DataError("no records in '" + path + "'");
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path, const std::string& comment) {
  std::ostringstream out;
  if (!comment.empty()) out << comment << "\n";
  out << "id,time,event";
  for (std::size_t i = 0; i < ds.dim_a; ++i) out << ",a_" << i;
  for (std::size_t i = 0; i < ds.dim_b; ++i) out << ",b_" << i;
  out << "\n";
  for (const auto& r : ds.records) {
    out << r.id << "," << fmt_double(r.time) << "," << r.event;
    for (double v : r.features_a) out << "," << fmt_double(v);
    for (double v : r.features_b) out << "," << fmt_double(v);
    out << "\n";
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << out.str();
  if (!f) throw DataError("write failed for '" + path + "'");
}

}  // namespace survkit
