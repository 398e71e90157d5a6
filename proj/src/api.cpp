#include "lyrica/api.h"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>

#include <spdlog/spdlog.h>

#include "lyrica/error.h"
#include "lyrica/json_io.h"

namespace lyrica {

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t at = 0;
  while (at <= path.size()) {
    const auto next = path.find('/', at);
    const auto end = next == std::string::npos ? path.size() : next;
    if (end > at) parts.push_back(path.substr(at, end - at));
    if (next == std::string::npos) break;
    at = next + 1;
  }
  return parts;
}

template <typename T>
T field_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kValidation, std::string(key) + " has the wrong type", key);
  }
}

std::size_t count_field(const nlohmann::json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  const auto& v = j[key];
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw Error(ErrorCode::kValidation, std::string(key) + " must be a positive integer", key);
  }
  return v.get<std::size_t>();
}

std::vector<std::string> string_lines(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw Error(ErrorCode::kValidation, std::string(key) + " must be an array of strings", key);
  }
  std::vector<std::string> out;
  for (const auto& s : j[key]) {
    if (!s.is_string()) throw Error(ErrorCode::kValidation, std::string(key) + " must hold strings", key);
    out.push_back(s.get<std::string>());
  }
  return out;
}

LyricsText lyrics_field(const std::vector<std::string>& lines, const char* key) {
  try {
    return LyricsText::from_strings(lines);
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what(), key);
  }
}

std::size_t parse_number(const std::string& s, const char* what) {
  if (s.empty() || s.size() > 9 || s.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(ErrorCode::kNotFound, std::string("no such ") + what + " '" + s + "'");
  }
  return std::stoul(s);
}

nlohmann::json candidates_json(const std::vector<Candidate>& cs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cs) out.push_back(candidate_to_json(c));
  return out;
}

ApiResponse ok(nlohmann::json body, int status = 200) { return {status, std::move(body)}; }

}  // namespace

void ServiceConfig::validate() const {
  auto bad = [](const std::string& what, const char* field) {
    throw Error(ErrorCode::kConfiguration, what, field);
  };
  if (top_k < 1) bad("k must be >= 1", "k");
  if (!(temperature > 0.0)) bad("temperature must be > 0", "temperature");
  if (n_candidates < 1) bad("n_candidates must be >= 1", "n_candidates");
  if (weights.keyword_hit < 0 || weights.style < 0 || weights.diversity < 0) {
    bad("rank weights must be >= 0", "weights");
  }
  if (port < 0 || port > 65535) bad("port out of range", "listen");
  if (n_candidates > limits.max_candidates) bad("n_candidates exceeds max_candidates", "n_candidates");
}

ServiceConfig parse_service_config(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfiguration, "config must be a JSON object");
  ServiceConfig c;
  try {
    if (j.contains("listen")) {
      const auto listen = j["listen"].get<std::string>();
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::kConfiguration, "listen must be host:port", "listen");
      c.host = listen.substr(0, colon);
      c.port = std::stoi(listen.substr(colon + 1));
    }
    c.bundle_path = j.value("bundle", c.bundle_path);
    c.data_dir = j.value("data_dir", c.data_dir);
    if (j.contains("decode")) {
      const auto& d = j["decode"];
      c.top_k = d.value("k", c.top_k);
      c.temperature = d.value("temperature", c.temperature);
      c.n_candidates = d.value("n_candidates", c.n_candidates);
    }
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      c.weights.keyword_hit = w.value("keyword_hit", c.weights.keyword_hit);
      c.weights.style = w.value("style", c.weights.style);
      c.weights.diversity = w.value("diversity", c.weights.diversity);
    }
    c.oversample = j.value("oversample", c.oversample);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.theme_keyword_count = j.value("theme_keyword_count", c.theme_keyword_count);
    c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
    if (j.contains("limits")) {
      const auto& l = j["limits"];
      c.limits.max_lines = l.value("max_lines", c.limits.max_lines);
      c.limits.max_words_per_line = l.value("max_words_per_line", c.limits.max_words_per_line);
      c.limits.max_candidates = l.value("max_candidates", c.limits.max_candidates);
      c.limits.max_keywords = l.value("max_keywords", c.limits.max_keywords);
      c.limits.max_body_bytes = l.value("max_body_bytes", c.limits.max_body_bytes);
    }
    if (j.contains("remote_lm") && !j["remote_lm"].is_null()) {
      c.remote_lm = j["remote_lm"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, std::string("bad config value: ") + e.what());
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kConfiguration, "listen port is not a number", "listen");
  }
  c.validate();
  return c;
}

ServiceConfig load_service_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot read config " + path);
  try {
    return parse_service_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfiguration, "config " + path + " is not valid JSON: " + e.what());
  }
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* listen = std::getenv("LYRICA_LISTEN")) {
    auto parsed = parse_service_config({{"listen", listen}});
    config.host = parsed.host;
    config.port = parsed.port;
  }
  if (const char* dir = std::getenv("LYRICA_DATA_DIR")) config.data_dir = dir;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput:
    case ErrorCode::kValidation: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kGenerationExhausted: return 409;
    case ErrorCode::kConstraintUnsatisfiable: return 422;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kTimeout: return 503;
    default: return 500;
  }
}

nlohmann::json error_body(const Error& e) {
  nlohmann::json err{{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
  if (!e.field().empty()) err["field"] = e.field();
  nlohmann::json body{{"error", err}};
  if (const auto* ex = dynamic_cast<const GenerationExhausted*>(&e)) {
    body["error"]["diagnostics"] = {{"rejected", candidates_json(ex->rejected())}};
  }
  return body;
}

ApiService::ApiService(std::shared_ptr<const TrainedBundle> bundle, std::shared_ptr<Store> store,
                       ServiceConfig config)
    : bundle_(std::move(bundle)), store_(std::move(store)), config_(std::move(config)) {
  config_.validate();
  if (!bundle_) throw Error(ErrorCode::kConfiguration, "no bundle loaded");
}

ApiResponse ApiService::handle(const std::string& method, const std::string& path,
                               const std::string& body) {
  try {
    if (body.size() > config_.limits.max_body_bytes) {
      return {413, error_body(Error(ErrorCode::kValidation, "request body too large", "body"))};
    }
    nlohmann::json req = nlohmann::json::object();
    if (!body.empty()) {
      req = nlohmann::json::parse(body, nullptr, false);
      if (req.is_discarded()) throw Error(ErrorCode::kValidation, "body is not valid JSON", "body");
      if (!req.is_object()) throw Error(ErrorCode::kValidation, "body must be a JSON object", "body");
    }
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api") {
      throw Error(ErrorCode::kNotFound, "no route " + method + " " + path);
    }
    const auto& route = parts[1];
    if (parts.size() == 2 && method == "POST") {
      if (route == "generate") return generate(req);
      if (route == "continue") return continue_lines(req);
      if (route == "revise") return revise_span(req);
    }
    if (parts.size() == 2 && method == "GET" && route == "meta") return ok(meta());
    if (route == "drafts") {
      if (!store_) throw Error(ErrorCode::kBackendUnavailable, "no data directory configured");
      return drafts(method, parts, req);
    }
    throw Error(ErrorCode::kNotFound, "no route " + method + " " + path);
  } catch (const Error& e) {
    return {http_status(e.code()), error_body(e)};
  } catch (const std::exception& e) {
    spdlog::error("internal error on {} {}: {}", method, path, e.what());
    return {500, error_body(Error(ErrorCode::kInternalInvariant, e.what()))};
  }
}

std::uint64_t ApiService::request_seed(const nlohmann::json& req) {
  if (req.contains("seed") && !req["seed"].is_null()) {
    if (!req["seed"].is_number_unsigned() && !req["seed"].is_number_integer()) {
      throw Error(ErrorCode::kValidation, "seed must be a non-negative integer", "seed");
    }
    if (req["seed"].is_number_integer() && req["seed"].get<long long>() < 0) {
      throw Error(ErrorCode::kValidation, "seed must be a non-negative integer", "seed");
    }
    return req["seed"].get<std::uint64_t>();
  }
  static thread_local std::mt19937_64 draw{std::random_device{}()};
  // Kept below 2^53 so browsers can echo it back without rounding.
  return draw() >> 11;
}

GenerationOptions ApiService::generation_options(const nlohmann::json& req) const {
  GenerationOptions o;
  o.decode.top_k = count_field(req, "k", config_.top_k);
  o.decode.temperature = field_or<double>(req, "temperature", config_.temperature);
  if (!(o.decode.temperature > 0.0)) {
    throw Error(ErrorCode::kValidation, "temperature must be > 0", "temperature");
  }
  o.decode.deadline =
      std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.timeout_ms);
  o.weights = config_.weights;
  if (req.contains("weights") && !req["weights"].is_null()) {
    const auto& w = req["weights"];
    if (!w.is_object()) throw Error(ErrorCode::kValidation, "weights must be an object", "weights");
    o.weights.keyword_hit = field_or<double>(w, "keyword_hit", o.weights.keyword_hit);
    o.weights.style = field_or<double>(w, "style", o.weights.style);
    o.weights.diversity = field_or<double>(w, "diversity", o.weights.diversity);
    if (o.weights.keyword_hit < 0 || o.weights.style < 0 || o.weights.diversity < 0) {
      throw Error(ErrorCode::kValidation, "weights must be >= 0", "weights");
    }
  }
  o.oversample = config_.oversample;
  o.max_retries = config_.max_retries;
  o.theme_keyword_count = config_.theme_keyword_count;
  return o;
}

std::size_t ApiService::candidate_count(const nlohmann::json& req) const {
  const auto n = count_field(req, "n_candidates", config_.n_candidates);
  if (n > config_.limits.max_candidates) {
    throw Error(ErrorCode::kValidation,
                "n_candidates exceeds the limit of " + std::to_string(config_.limits.max_candidates),
                "n_candidates");
  }
  return n;
}

ControlSpec ApiService::checked_spec(const nlohmann::json& req) const {
  if (!req.contains("spec")) throw Error(ErrorCode::kValidation, "spec is required", "spec");
  auto spec = spec_from_json(req["spec"]);
  const auto& lim = config_.limits;
  if (spec.num_lines > lim.max_lines) {
    throw Error(ErrorCode::kValidation, "num_lines exceeds the limit of " + std::to_string(lim.max_lines),
                "num_lines");
  }
  if (spec.max_line_length() > lim.max_words_per_line) {
    throw Error(ErrorCode::kValidation,
                "words_per_line exceeds the limit of " + std::to_string(lim.max_words_per_line),
                "words_per_line");
  }
  if (spec.keywords.size() > lim.max_keywords) {
    throw Error(ErrorCode::kValidation, "too many keywords", "keywords");
  }
  validate_spec(spec, *bundle_);
  return spec;
}

ApiResponse ApiService::generate(const nlohmann::json& req) {
  GenerationRequest g;
  g.spec = checked_spec(req);
  g.n_candidates = candidate_count(req);
  const auto options = generation_options(req);
  const auto seed = request_seed(req);
  const auto result = generate_full(g, *bundle_, options, seed);
  nlohmann::json body;
  body["request"] = req;
  body["seed"] = seed;
  body["source"] = render(result.source);
  body["keywords"] = result.keywords;
  body["rounds"] = result.rounds;
  body["candidates"] = candidates_json(result.candidates);
  body["rejected"] = candidates_json(result.rejected);
  return ok(std::move(body));
}

ApiResponse ApiService::continue_lines(const nlohmann::json& req) {
  GenerationRequest g;
  g.spec = checked_spec(req);
  const auto preceding = string_lines(req, "preceding");
  g.preceding = lyrics_field(preceding, "preceding");
  g.k_lines = count_field(req, "k_lines", 1);
  g.n_candidates = candidate_count(req);
  const auto options = generation_options(req);
  const auto seed = request_seed(req);
  const auto result = generate_continuation(g, *bundle_, options, seed);
  nlohmann::json body;
  body["request"] = req;
  body["seed"] = seed;
  body["preceding"] = preceding;
  body["source"] = render(result.source);
  body["keywords"] = result.keywords;
  body["rounds"] = result.rounds;
  body["first_line"] = preceding.size();
  body["completes"] = preceding.size() + g.k_lines == g.spec.num_lines;
  body["candidates"] = candidates_json(result.candidates);
  body["rejected"] = candidates_json(result.rejected);
  return ok(std::move(body));
}

ApiResponse ApiService::revise_span(const nlohmann::json& req) {
  RevisionRequest r;
  r.lyrics = lyrics_field(string_lines(req, "lyrics"), "lyrics");
  if (!req.contains("style") || !req["style"].is_string()) {
    throw Error(ErrorCode::kValidation, "style is required and must be a string", "style");
  }
  r.style = req["style"].get<std::string>();
  if (!req.contains("span") || !req["span"].is_object()) {
    throw Error(ErrorCode::kValidation, "span must be an object", "span");
  }
  const auto& span = req["span"];
  auto index = [&](const char* key) -> std::size_t {
    if (!span.contains(key) || !span[key].is_number_integer() || span[key].get<long long>() < 0) {
      throw Error(ErrorCode::kValidation, std::string("span.") + key + " must be a non-negative integer",
                  "span");
    }
    return span[key].get<std::size_t>();
  };
  r.line = index("line");
  if (span.contains("start") || span.contains("end")) r.range = std::make_pair(index("start"), index("end"));
  r.n_candidates = candidate_count(req);
  validate_revision(r, *bundle_);

  RevisionOptions o;
  const auto g = generation_options(req);
  o.decode = g.decode;
  o.oversample = config_.oversample;
  if (req.contains("length_delta")) {
    const auto& d = req["length_delta"];
    if (!d.is_number_integer() || d.get<long long>() < 0) {
      throw Error(ErrorCode::kValidation, "length_delta must be a non-negative integer", "length_delta");
    }
    o.length_delta = d.get<std::size_t>();
  }
  const auto seed = request_seed(req);
  const auto result = revise(r, *bundle_, o, seed);
  nlohmann::json body;
  body["request"] = req;
  body["seed"] = seed;
  body["span"] = span;
  nlohmann::json suggestions = nlohmann::json::array();
  for (const auto& s : result.suggestions) {
    suggestions.push_back(
        {{"fill", join(s.fill)}, {"lines", s.lyrics.to_strings()}, {"score", s.score}});
  }
  body["suggestions"] = std::move(suggestions);
  return ok(std::move(body));
}

ApiResponse ApiService::drafts(const std::string& method, const std::vector<std::string>& parts,
                               const nlohmann::json& req) {
  auto& store = *store_;
  if (parts.size() == 2) {
    if (method == "GET") {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& s : store.list_drafts()) list.push_back(summary_to_json(s));
      return ok({{"drafts", list}});
    }
    if (method == "POST") {
      const auto title = field_or<std::string>(req, "title", "untitled");
      return ok(summary_to_json(store.create_draft(title)), 201);
    }
  }
  if (parts.size() < 3) throw Error(ErrorCode::kNotFound, "no such route");
  const auto& id = parts[2];
  if (parts.size() == 3 && method == "GET") {
    auto body = summary_to_json(store.draft(id));
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : store.versions(id)) vs.push_back(version_to_json(v));
    body["versions"] = std::move(vs);
    return ok(std::move(body));
  }
  if (parts.size() >= 4 && parts[3] == "versions") {
    if (parts.size() == 4 && method == "GET") {
      nlohmann::json vs = nlohmann::json::array();
      for (const auto& v : store.versions(id)) vs.push_back(version_to_json(v));
      return ok({{"versions", vs}});
    }
    if (parts.size() == 4 && method == "POST") {
      const auto lines = string_lines(req, "lines");
      if (lines.empty()) throw Error(ErrorCode::kValidation, "lines must not be empty", "lines");
      const auto provenance = parse_provenance(field_or<std::string>(req, "provenance", "manual_edit"));
      nlohmann::json spec = req.contains("spec") ? req["spec"] : nlohmann::json(nullptr);
      if (!spec.is_null()) spec_from_json(spec);
      return ok(version_to_json(store.append_version(id, lines, spec, provenance)), 201);
    }
    if (parts.size() >= 5) {
      const auto number = parse_number(parts[4], "version");
      if (parts.size() == 5 && method == "GET") return ok(version_to_json(store.get_version(id, number)));
      if (parts.size() == 6 && parts[5] == "restore" && method == "POST") {
        return ok(version_to_json(store.restore(id, number)), 201);
      }
    }
  }
  throw Error(ErrorCode::kNotFound, "no such route");
}

nlohmann::json ApiService::meta() const {
  const auto& b = *bundle_;
  nlohmann::json themes = nlohmann::json::array();
  for (const auto& [name, seeds] : b.themes) {
    const auto it = b.theme_keyword_lists.find(name);
    themes.push_back({{"name", name},
                      {"seeds", seeds},
                      {"keywords_available", it == b.theme_keyword_lists.end() ? 0 : it->second.size()}});
  }
  nlohmann::json groups = nlohmann::json::array();
  const auto& vocab = b.vocabulary();
  for (const auto& g : b.usable_rhyme_groups()) {
    std::vector<std::string> members;
    for (const auto& m : b.rhyme.members(g)) {
      if (vocab.find(m)) members.push_back(m);
    }
    groups.push_back({{"name", g}, {"members", members}});
  }
  const auto& lim = config_.limits;
  return {{"styles", b.styles},
          {"emotions", b.emotions},
          {"themes", themes},
          {"rhyme_groups", groups},
          {"limits",
           {{"max_lines", lim.max_lines},
            {"max_words_per_line", lim.max_words_per_line},
            {"max_candidates", lim.max_candidates},
            {"max_keywords", lim.max_keywords},
            {"max_body_bytes", lim.max_body_bytes}}},
          {"defaults",
           {{"k", config_.top_k},
            {"temperature", config_.temperature},
            {"n_candidates", config_.n_candidates},
            {"weights",
             {{"keyword_hit", config_.weights.keyword_hit},
              {"style", config_.weights.style},
              {"diversity", config_.weights.diversity}}}}},
          {"vocabulary", {{"size", vocab.size()}, {"hash", vocab.hash()}}}};
}

std::unique_ptr<httplib::Server> make_http_server(ApiService& service) {
  auto srv = std::make_unique<httplib::Server>();
  srv->set_payload_max_length(service.config().limits.max_body_bytes + 1);
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json; charset=utf-8");
  };
  srv->Get(R"(/api/.*)", handler);
  srv->Post(R"(/api/.*)", handler);
  srv->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto code = res.status == 413 ? ErrorCode::kValidation : ErrorCode::kNotFound;
    nlohmann::json body = error_body(Error(code, "no route " + req.method + " " + req.path));
    res.set_content(body.dump(), "application/json; charset=utf-8");
  });
  return srv;
}

}  // namespace lyrica
