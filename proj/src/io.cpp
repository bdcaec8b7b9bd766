#include "zdmtd/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace zdmtd {

namespace {

std::vector<double> number_array(const Json& j, const char* key, int k) {
  const Json& a = j.at(key);
  if (!a.is_array()) throw FormatError(std::string(key) + " must be an array");
  if (static_cast<int>(a.size()) != k)
    throw FormatError(std::string(key) + " has length " + std::to_string(a.size()) + ", expected k = " +
                      std::to_string(k));
  std::vector<double> out;
  for (const auto& v : a) {
    if (!v.is_number()) throw FormatError(std::string(key) + " must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

GameSpec game_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("game must be a JSON object");
  static const std::set<std::string> keys{"k", "u_d_cov", "u_d_unc", "u_a_cov", "u_a_unc"};
  for (const auto& [key, _] : j.items())
    if (!keys.count(key)) throw FormatError("unknown key in game: " + key);
  for (const auto& key : keys)
    if (!j.contains(key)) throw FormatError("missing key in game: " + key);
  if (!j.at("k").is_number_integer()) throw FormatError("k must be an integer");
  const int k = j.at("k").get<int>();
  if (k < 2) throw FormatError("k must be >= 2");
  GameSpec g{k, number_array(j, "u_d_cov", k), number_array(j, "u_d_unc", k), number_array(j, "u_a_cov", k),
             number_array(j, "u_a_unc", k)};
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return g;
}

Json game_to_json(const GameSpec& g) {
  return Json{{"k", g.K}, {"u_d_cov", g.u_d_cov}, {"u_d_unc", g.u_d_unc}, {"u_a_cov", g.u_a_cov},
              {"u_a_unc", g.u_a_unc}};
}

Json strategy_to_json(const MemoryOneStrategy& s) { return Json{{"k", s.K}, {"pi", matrix_rows(s.rows)}}; }

Json strategy_to_json(const ZdStrategy& zd) {
  Json j = strategy_to_json(zd.strategy);
  std::vector<double> phi(zd.phi.phi.data(), zd.phi.phi.data() + zd.phi.phi.size());
  j["zd"] = Json{{"alpha", zd.params.alpha},
                 {"beta", zd.params.beta},
                 {"gamma", zd.params.gamma},
                 {"phi", phi},
                 {"residual", zd.residual},
                 {"class", zd.classification.label()}};
  return j;
}

MemoryOneStrategy strategy_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("pi")) throw FormatError("strategy needs k and pi");
  if (!j.at("k").is_number_integer()) throw FormatError("k must be an integer");
  const int k = j.at("k").get<int>();
  if (k < 2) throw FormatError("k must be >= 2");
  const Json& pi = j.at("pi");
  if (!pi.is_array() || static_cast<int>(pi.size()) != k * k)
    throw FormatError("pi must have k^2 = " + std::to_string(k * k) + " rows");
  MemoryOneStrategy s{k, Eigen::MatrixXd(k * k, k)};
  for (int r = 0; r < k * k; ++r) {
    if (!pi[r].is_array() || static_cast<int>(pi[r].size()) != k)
      throw FormatError("pi row " + std::to_string(r) + " must have k entries");
    for (int c = 0; c < k; ++c) {
      if (!pi[r][c].is_number()) throw FormatError("pi entries must be numbers");
      s.rows(r, c) = pi[r][c].get<double>();
    }
  }
  try {
    s.validate(1e-9);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return s;
}

Json result_to_json(const PipelineResult& r, const UtilityPair& realized) {
  const auto& s = r.solve;
  Json res = Json::object();
  for (const auto& [k, v] : s.residuals) res[k] = v;
  res["defining"] = r.report.defining_residual;
  res["sampled_line"] = r.report.max_line_residual;
  Json j{{"kind", to_string(s.kind)},
         {"alpha", s.params.alpha},
         {"beta", s.params.beta},
         {"gamma", s.params.gamma},
         {"u_d", s.predicted.u_d},
         {"u_a", s.predicted.u_a},
         {"cell", s.cell.valid() ? Json::array({s.cell.i1, s.cell.i2}) : Json::array()},
         {"residuals", res}};
  j["expected_br"] = s.expected_br;
  if (r.has_strategy) j["realized"] = Json{{"u_d", realized.u_d}, {"u_a", realized.u_a}};
  return j;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json_file(const std::string& path) { return parse_json_text(read_text_file(path)); }

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace zdmtd
