#include "sl2dyn/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace sl2dyn {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

Json to_json(const SpectralReport& r) {
  Json j;
  j["lambda2"] = r.lambda2;
  j["gap"] = r.gap;
  j["lambda_min"] = r.lambda_min;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["residual_norm"] = r.residual_norm;
  j["seed"] = r.seed;
  j["flag"] = r.flag;
  return j;
}

Json to_json(const GenerationReport& r) {
  Json j;
  j["prime"] = r.prime;
  j["subgroup_size"] = r.subgroup_size;
  j["full_group_size"] = r.full_group_size;
  j["generated"] = r.generated;
  return j;
}

Json to_json(const FreenessReport& r) {
  Json j;
  j["rank"] = r.rank;
  j["max_length"] = r.max_length;
  j["words_checked"] = r.words_checked;
  if (r.witness) {
    Json w;
    w["display"] = r.witness->str();
    Json letters = Json::array();
    for (const Letter& l : r.witness->letters) {
      letters.push_back(Json::array({l.gen, static_cast<int>(l.exp)}));
    }
    w["letters"] = letters;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

Json to_json(const TransitivityReport& r) {
  Json j;
  j["transitive"] = r.transitive;
  j["orbit_count"] = r.orbit_count;
  return j;
}

Json to_json(const DefectReport& r) {
  Json j;
  j["defect"] = r.defect;
  j["delta"] = r.delta;
  j["horizon"] = r.horizon;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["min_positive_distance"] = r.min_positive_distance;
  Json pair;
  pair["p"] = Json{{"power", r.p_power}, {"fiber", r.p_fiber}};
  pair["q"] = Json{{"power", r.q_power}, {"fiber", r.q_fiber}};
  pair["initial_distance"] = r.initial_distance;
  pair["attained_step"] = r.attained_step;
  j["attaining_pair"] = pair;
  return j;
}

std::string to_csv(const std::vector<ScanRow>& rows) {
  std::string out = "p,class_mod4,group_size,generated,lambda2,gap,method,flag\n";
  for (const ScanRow& r : rows) {
    out += std::to_string(r.p);
    out += ',';
    out += std::to_string(r.class_mod4);
    out += ',';
    out += std::to_string(r.group_size);
    out += ',';
    out += r.generated ? "true" : "false";
    out += ',';
    out += format_double(r.lambda2);
    out += ',';
    out += format_double(r.gap);
    out += ',';
    out += r.method;
    out += ',';
    out += r.flag;
    out += '\n';
  }
  return out;
}

void emit_report(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace sl2dyn
