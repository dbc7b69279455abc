#include "kgrank/annotations.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include <json.hpp>

namespace kgrank {

using nlohmann::json;

std::vector<QueryAnnotations> load_annotations(const std::string& path,
                                               AnnotationDiagnostics* diag) {
  std::ifstream in = open_input(path);
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (!root.is_array()) {
    throw ValidationError(path + ": top level must be an array");
  }

  AnnotationDiagnostics local;
  AnnotationDiagnostics& d = diag ? *diag : local;
  std::vector<QueryAnnotations> out;
  std::unordered_set<std::string> seen_ids;
  for (const auto& item : root) {
    QueryAnnotations qa;
    if (!item.contains("query_id") || !item["query_id"].is_string()) {
      throw ValidationError(path + ": annotation missing string query_id");
    }
    qa.query_id = item["query_id"].get<std::string>();
    if (!seen_ids.insert(qa.query_id).second) {
      throw ValidationError(path + ": duplicate query_id '" + qa.query_id + "'");
    }
    if (item.contains("query")) qa.query_text = item["query"].get<std::string>();
    if (item.contains("interpretations")) {
      if (!item["interpretations"].is_array()) {
        throw ValidationError(path + ": interpretations must be an array (query '" +
                              qa.query_id + "')");
      }
      for (const auto& interp : item["interpretations"]) {
        if (!interp.is_array()) {
          throw ValidationError(path + ": interpretation must be an array (query '" +
                                qa.query_id + "')");
        }
        if (interp.empty()) {
          ++d.empty_interpretations_dropped;
          continue;
        }
        Interpretation parsed;
        std::unordered_set<std::string> ids;
        for (const auto& le : interp) {
          LinkedEntity e;
          if (!le.contains("entity") || !le["entity"].is_string()) {
            throw ValidationError(path + ": linked entity missing string id (query '" +
                                  qa.query_id + "')");
          }
          e.entity = le["entity"].get<std::string>();
          if (le.contains("mention")) e.mention = le["mention"].get<std::string>();
          if (le.contains("confidence")) {
            e.confidence = le["confidence"].get<double>();
          }
          if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
            throw ValidationError(path + ": confidence outside [0,1] for entity '" +
                                  e.entity + "' (query '" + qa.query_id + "')");
          }
          if (!ids.insert(e.entity).second) {
            throw ValidationError(path + ": duplicate entity '" + e.entity +
                                  "' within an interpretation (query '" +
                                  qa.query_id + "')");
          }
          parsed.entities.push_back(std::move(e));
        }
        qa.interpretations.push_back(std::move(parsed));
      }
    }
    out.push_back(std::move(qa));
  }
  return out;
}

void save_annotations(const std::vector<QueryAnnotations>& annotations,
                      const std::string& path) {
  json root = json::array();
  for (const auto& qa : annotations) {
    json item;
    item["query_id"] = qa.query_id;
    if (!qa.query_text.empty()) item["query"] = qa.query_text;
    json interps = json::array();
    for (const auto& interp : qa.interpretations) {
      json arr = json::array();
      for (const auto& e : interp.entities) {
        json le;
        le["entity"] = e.entity;
        if (!e.mention.empty()) le["mention"] = e.mention;
        le["confidence"] = e.confidence;
        arr.push_back(std::move(le));
      }
      interps.push_back(std::move(arr));
    }
    item["interpretations"] = std::move(interps);
    root.push_back(std::move(item));
  }
  std::ofstream out = open_output(path);
  out << root.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

QueryAnnotations union_annotations(const std::vector<QueryAnnotations>& sources) {
  if (sources.empty()) return {};
  QueryAnnotations out;
  out.query_id = sources.front().query_id;

  std::map<std::string, LinkedEntity> merged;  // ordered for determinism
  for (const auto& qa : sources) {
    if (qa.query_id != out.query_id) {
      throw ValidationError("union_annotations: query_id mismatch ('" +
                            qa.query_id + "' vs '" + out.query_id + "')");
    }
    if (out.query_text.empty()) out.query_text = qa.query_text;
    for (const auto& interp : qa.interpretations) {
      for (const auto& e : interp.entities) {
        auto it = merged.find(e.entity);
        if (it == merged.end()) {
          merged.emplace(e.entity, e);
        } else if (e.confidence > it->second.confidence) {
          it->second.confidence = e.confidence;
        }
      }
    }
  }
  if (!merged.empty()) {
    Interpretation interp;
    for (auto& [_, e] : merged) interp.entities.push_back(std::move(e));
    out.interpretations.push_back(std::move(interp));
  }
  return out;
}

std::unordered_map<std::string, const QueryAnnotations*> index_annotations(
    const std::vector<QueryAnnotations>& annotations) {
  std::unordered_map<std::string, const QueryAnnotations*> index;
  for (const auto& qa : annotations) index.emplace(qa.query_id, &qa);
  return index;
}

}  // namespace kgrank
