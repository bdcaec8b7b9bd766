#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "zdmtd/game_model.hpp"
#include "zdmtd/pipeline.hpp"
#include "zdmtd/zd_core.hpp"

// Vendored single header; kept out of the public headers of the core modules.
#include "json.hpp"

namespace zdmtd {

using Json = nlohmann::ordered_json;

// Malformed or schema-violating input. The CLI maps this to the usage code.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strict game schema: exactly k, u_d_cov, u_d_unc, u_a_cov, u_a_unc.
GameSpec game_from_json(const Json& j);
Json game_to_json(const GameSpec& g);

Json strategy_to_json(const ZdStrategy& zd);
Json strategy_to_json(const MemoryOneStrategy& s);
// Reads "pi" (and "k"); any "zd" block is ignored.
MemoryOneStrategy strategy_from_json(const Json& j);

Json result_to_json(const PipelineResult& r, const UtilityPair& realized);

Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::string& path, const std::string& content);

// FNV-1a over the bytes.
uint64_t fnv1a(const std::string& bytes);
std::string hex64(uint64_t v);

}  // namespace zdmtd
