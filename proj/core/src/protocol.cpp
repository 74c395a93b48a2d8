#include "paretonas/protocol.hpp"

#include <cmath>

namespace paretonas {

namespace {

nlohmann::json parse_line(std::string_view line) {
  try {
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.is_object()) throw ProtocolError("protocol line is not an object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError(std::string("malformed protocol line: ") + e.what());
  }
}

std::uint64_t id_from_json(const nlohmann::json& j) {
  if (!j.contains("id") || !j["id"].is_number_unsigned()) {
    throw ProtocolError("protocol line lacks a non-negative integer id");
  }
  return j["id"].get<std::uint64_t>();
}

}  // namespace

nlohmann::ordered_json macro_to_json(const MacroConfig& m) {
  nlohmann::ordered_json j;
  j["template"] = to_string(m.template_kind);
  j["n"] = m.repeats;
  j["f"] = m.filters;
  j["resolution"] = m.resolution;
  j["classes"] = m.classes;
  return j;
}

MacroConfig macro_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("macro must be an object");
  const MacroTemplate t = parse_template(j.value("template", std::string("cifar10")));
  MacroConfig m = t == MacroTemplate::cifar ? MacroConfig::cifar() : MacroConfig::imagenet();
  m.repeats = j.value("n", m.repeats);
  m.filters = j.value("f", m.filters);
  m.resolution = j.value("resolution", m.resolution);
  m.classes = j.value("classes", m.classes);
  m.count_batchnorm = j.value("batchnorm", m.count_batchnorm);
  return m;
}

std::string encode_request(const EvaluationRequest& request) {
  nlohmann::ordered_json j;
  j["id"] = request.id;
  j["genome"] = to_json(request.genome);
  j["macro"] = macro_to_json(request.macro);
  return j.dump();
}

EvaluationRequest decode_request(std::string_view line) {
  const nlohmann::json j = parse_line(line);
  EvaluationRequest r;
  r.id = id_from_json(j);
  if (!j.contains("genome")) throw ProtocolError("request lacks a genome");
  try {
    r.genome = genome_from_json(j["genome"]);
  } catch (const GenomeError& e) {
    throw ProtocolError(e.what());
  }
  r.macro = macro_from_json(j.value("macro", nlohmann::json::object()));
  return r;
}

std::string encode_response(const EvaluationResponse& response) {
  nlohmann::ordered_json j;
  j["id"] = response.id;
  j["objectives"] = response.objectives ? nlohmann::ordered_json(*response.objectives) : nlohmann::ordered_json(nullptr);
  j["error"] = response.error ? nlohmann::ordered_json(*response.error) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

EvaluationResponse decode_response(std::string_view line) {
  const nlohmann::json j = parse_line(line);
  EvaluationResponse r;
  r.id = id_from_json(j);
  const auto objectives = j.find("objectives");
  if (objectives != j.end() && !objectives->is_null()) {
    if (!objectives->is_array()) throw ProtocolError("objectives must be an array or null");
    std::vector<double> values;
    for (const auto& v : *objectives) {
      if (!v.is_number()) throw ProtocolError("objectives must be numbers");
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw ProtocolError("objectives must be finite");
      values.push_back(d);
    }
    r.objectives = std::move(values);
  }
  const auto error = j.find("error");
  if (error != j.end() && !error->is_null()) {
    if (!error->is_string()) throw ProtocolError("error must be a string or null");
    r.error = error->get<std::string>();
  }
  if (!r.objectives && !r.error) throw ProtocolError("response carries neither objectives nor error");
  return r;
}

}  // namespace paretonas
