#include "utilrank/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for " + key);
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) bad_value(key, value);
    return out;
  } catch (const std::logic_error&) {
    bad_value(key, value);
  }
}

std::size_t parse_positive(const std::string& key, const std::string& value) {
  const long long n = parse_int(key, value);
  if (n < 1) bad_value(key, value);
  return static_cast<std::size_t>(n);
}

bool apply_endpoint_key(ModelEndpoint& ep, const std::string& field, const std::string& key,
                        const std::string& value) {
  if (field == "url") {
    ep.base_url = value;
  } else if (field == "model") {
    ep.model_name = value;
  } else if (field == "timeout_ms") {
    ep.timeout = std::chrono::milliseconds(parse_int(key, value));
  } else if (field == "max_retries") {
    ep.max_retries = static_cast<int>(parse_int(key, value));
  } else if (field == "temperature") {
    ep.temperature = parse_double(key, value);
  } else {
    return false;
  }
  return true;
}

void apply_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "top_k") {
    cfg.top_k = parse_positive(key, value);
  } else if (key == "u_threshold") {
    cfg.u_threshold = parse_double(key, value);
  } else if (key == "judge_mode") {
    if (value == "single") {
      cfg.judge_mode = JudgeMode::Single;
    } else if (value == "staged") {
      cfg.judge_mode = JudgeMode::Staged;
    } else {
      bad_value(key, value);
    }
  } else if (key == "parallelism") {
    cfg.parallelism = parse_positive(key, value);
  } else if (key == "corpus_path") {
    cfg.corpus_path = value;
  } else if (key == "run_store_path") {
    cfg.run_store_path = value;
  } else {
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string role = key.substr(0, dot);
      const std::string field = key.substr(dot + 1);
      ModelEndpoint* ep = role == "controller" ? &cfg.controller
                          : role == "judge"    ? &cfg.judge
                          : role == "embedding" ? &cfg.embedding
                                                : nullptr;
      if (ep && apply_endpoint_key(*ep, field, key, value)) return;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + key + "'");
  }
}

}  // namespace

void apply_config_text(PipelineConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_key(cfg, std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

void apply_environment(PipelineConfig& cfg,
                       const std::function<std::optional<std::string>(const char*)>& getenv) {
  auto lookup = [&](const char* name) -> std::optional<std::string> {
    if (getenv) return getenv(name);
    const char* v = std::getenv(name);
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
  if (auto v = lookup("UTILRANK_JUDGE_URL")) cfg.judge.base_url = *v;
  if (auto v = lookup("UTILRANK_EMBED_URL")) cfg.embedding.base_url = *v;
  if (auto v = lookup("UTILRANK_CONTROLLER_URL")) cfg.controller.base_url = *v;
}

std::string render_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "top_k = " << cfg.top_k << '\n'
      << "u_threshold = " << cfg.u_threshold << '\n'
      << "judge_mode = " << (cfg.judge_mode == JudgeMode::Single ? "single" : "staged") << '\n'
      << "parallelism = " << cfg.parallelism << '\n'
      << "corpus_path = " << cfg.corpus_path << '\n'
      << "run_store_path = " << cfg.run_store_path << '\n';
  const std::pair<const char*, const ModelEndpoint*> endpoints[] = {
      {"controller", &cfg.controller}, {"judge", &cfg.judge}, {"embedding", &cfg.embedding}};
  for (const auto& [role, ep] : endpoints) {
    out << role << ".url = " << ep->base_url << '\n'
        << role << ".model = " << ep->model_name << '\n'
        << role << ".timeout_ms = " << ep->timeout.count() << '\n'
        << role << ".max_retries = " << ep->max_retries << '\n'
        << role << ".temperature = " << ep->temperature << '\n';
  }
  return out.str();
}

}  // namespace utilrank
