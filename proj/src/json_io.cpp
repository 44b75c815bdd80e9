// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace phyfea {

std::string format_real(double v) {
  if (!std::isfinite(v)) throw ContractError("cannot serialize a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  std::string s(buf);
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  const char sign = s[e + 1];
  std::string digits = s.substr(e + 2);
  while (digits.size() > 1 && digits.front() == '0') digits.erase(digits.begin());
  return mantissa + "e" + (sign == '-' ? "-" : "+") + digits;
}

namespace {

void dump(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump(v, indent, depth + 1, out);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    default:
      out += j.dump();
  }
}

Json mass_json(const std::vector<std::pair<ClassPair, double>>& mass) {
  Json arr = Json::array();
  for (const auto& [pair, m] : mass) arr.push_back({{"pair", pair_json(pair)}, {"mass", m}});
  return arr;
}

Json component_json(const Component& c) {
  return {{"size", c.size()},
          {"border_touching", c.border_touching},
          {"bbox", {{"row0", c.bbox.row0}, {"col0", c.bbox.col0}, {"row1", c.bbox.row1},
                    {"col1", c.bbox.col1}}}};
}

template <class V>
V take(const Json& j, const char* key) {
  try {
    return j.at(key).get<V>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("json key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

Json pair_json(ClassPair p) { return Json::array({p.inner, p.outer}); }

template <class T>
Json to_json(const PenaltyReport<T>& r) {
  Json j;
  j["l_opening"] = r.l_opening;
  j["l_dilation"] = r.l_dilation;
  j["alpha"] = r.alpha;
  j["penalty"] = r.penalty;
  j["total"] = r.total ? Json(*r.total) : Json(nullptr);
  j["iterations"] = r.iterations;
  j["channels"] = r.channels;
  j["per_pair_mass"] = {{"opening", mass_json(r.opening_mass)},
                        {"dilation", mass_json(r.dilation_mass)}};
  j["timing_ms"] = {{"normalize", r.timing.normalize_ms},
                    {"channels", r.timing.channels_ms},
                    {"opening_cpu", r.timing.opening_cpu_ms},
                    {"dilation_cpu", r.timing.dilation_cpu_ms},
                    {"backward", r.timing.backward_ms},
                    {"total", r.timing.total_ms}};
  return j;
}

template Json to_json(const PenaltyReport<float>&);
template Json to_json(const PenaltyReport<double>&);

Json to_json(const AnomalyReport& r) {
  Json enc = Json::array();
  for (const auto& e : r.enclosures) {
    Json item = component_json(e.component);
    enc.push_back({{"pair", pair_json(e.pair)},
                   {"size", item["size"]},
                   {"bbox", item["bbox"]}});
  }
  Json dis = Json::array();
  for (const auto& d : r.discontinuities) {
    dis.push_back({{"class", d.cls}, {"gt_count", d.gt_count}, {"pred_count", d.pred_count}});
  }
  Json j;
  j["enclosures"] = enc;
  j["discontinuities"] = dis;
  j["summary"] = {{"enclosures", r.enclosures.size()},
                  {"discontinuities", r.discontinuities.size()},
                  {"anomalous", !r.clean()}};
  return j;
}

Json to_json(const ConstraintCatalog& c) {
  Json recs = Json::array();
  for (const auto& r : c.records) {
    recs.push_back({{"pair", pair_json(r.pair)},
                    {"occurrence_count", r.occurrence_count},
                    {"image_count", r.image_count},
                    {"co_occurs", r.co_occurs},
                    {"verdict", std::string(verdict_name(r.verdict))}});
  }
  Json j;
  j["num_classes"] = c.num_classes;
  j["provenance"] = {{"corpus_id", c.corpus_id},
                     {"threshold", c.threshold},
                     {"num_images", c.num_images}};
  j["records"] = recs;
  return j;
}

Json to_json(const EmpiricalStats& s) {
  Json j;
  j["co_occurring_pairs"] = s.co_occurring;
  j["constraint_pairs"] = s.constraint;
  j["non_constraint_pairs"] = s.non_constraint;
  j["feasible_pairs"] = s.feasible;
  j["infeasible_pairs"] = s.infeasible;
  j["constraint_pct"] = s.constraint_pct;
  j["non_constraint_pct"] = s.non_constraint_pct;
  j["feasible_pct"] = s.feasible_pct;
  j["infeasible_pct"] = s.infeasible_pct;
  return j;
}

Json to_json(const GradCheckReport& r) {
  Json probes = Json::array();
  for (const auto& p : r.probes) {
    probes.push_back({{"index", p.index},
                      {"analytic", p.analytic},
                      {"numeric", p.numeric},
                      {"rel_error", p.rel_error}});
  }
  Json j;
  j["passed"] = r.passed;
  j["max_rel_error"] = r.max_rel_error;
  j["tolerance"] = r.tolerance;
  j["probes_used"] = r.probes_used;
  j["probes_skipped"] = r.probes_skipped;
  j["probes"] = probes;
  return j;
}

Json to_json(const EngineConfig& c) {
  Json j;
  j["alpha"] = c.alpha;
  j["epsilon"] = c.epsilon;
  j["iterations"] = c.iterations ? Json(*c.iterations) : Json(nullptr);
  j["losses"] = losses_name(c);
  j["pair_mode"] = std::string(pair_mode_name(c.pair_mode));
  j["connectivity"] = c.connectivity;
  j["precision"] = std::string(precision_name(c.precision));
  j["bg_tol"] = c.bg_tol;
  j["infeasibility_threshold"] = c.infeasibility_threshold;
  j["workers"] = c.workers ? Json(*c.workers) : Json(nullptr);
  j["early_exit"] = c.early_exit;
  j["ignore_value"] = c.ignore_value;
  return j;
}

ConstraintCatalog catalog_from_json(const Json& j) {
  ConstraintCatalog c;
  try {
    c.num_classes = j.at("num_classes").get<std::size_t>();
    const auto& prov = j.at("provenance");
    c.corpus_id = prov.at("corpus_id").get<std::string>();
    c.threshold = prov.at("threshold").get<std::uint64_t>();
    c.num_images = prov.at("num_images").get<std::size_t>();
    for (const auto& r : j.at("records")) {
      PairRecord rec;
      const auto& p = r.at("pair");
      rec.pair = {p.at(0).get<std::int32_t>(), p.at(1).get<std::int32_t>()};
      rec.occurrence_count = r.at("occurrence_count").get<std::uint64_t>();
      rec.image_count = r.at("image_count").get<std::uint64_t>();
      rec.co_occurs = r.at("co_occurs").get<bool>();
      rec.verdict = parse_verdict(r.at("verdict").get<std::string>());
      c.records.push_back(rec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("malformed catalog: ") + e.what());
  }
  if (c.num_classes < 2) throw CatalogError("catalog needs at least 2 classes");
  const auto expected = ordered_pairs(c.num_classes);
  if (c.records.size() != expected.size()) {
    throw CatalogError("catalog lists " + std::to_string(c.records.size()) + " pairs, expected " +
                       std::to_string(expected.size()));
  }
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (!(c.records[k].pair == expected[k])) {
      throw CatalogError("catalog record " + std::to_string(k) + " is out of pair order");
    }
    if ((c.records[k].verdict == Verdict::non_constraint) != (c.records[k].occurrence_count == 0)) {
      throw CatalogError("catalog record " + std::to_string(k) +
                         " has a verdict inconsistent with its count");
    }
  }
  return c;
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << dump_json(j) << '\n';
  if (!out) throw FormatError("short write to '" + path + "'");
}

ConstraintCatalog read_catalog(const std::string& path) {
  try {
    return catalog_from_json(read_json(path));
  } catch (const CatalogError& e) {
    throw CatalogError(path + ": " + e.what());
  }
}

EngineConfig config_from_json(const Json& j, EngineConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "alpha",   "epsilon",      "iterations",   "losses",
      "pair_mode", "connectivity", "precision",  "bg_tol",
      "infeasibility_threshold", "workers", "early_exit", "ignore_value"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  }
  if (j.contains("alpha")) c.alpha = take<double>(j, "alpha");
  if (j.contains("epsilon")) c.epsilon = take<double>(j, "epsilon");
  if (j.contains("iterations")) {
    if (j["iterations"].is_null()) {
      c.iterations.reset();
    } else {
      c.iterations = take<std::size_t>(j, "iterations");
    }
  }
  if (j.contains("losses")) {
    const auto& v = j["losses"];
    if (v.is_array()) {
      c.use_opening = c.use_dilation = false;
      for (const auto& s : v) {
        const auto name = s.get<std::string>();
        if (name == "opening") {
          c.use_opening = true;
        } else if (name == "dilation") {
          c.use_dilation = true;
        } else {
          throw ConfigError("unknown loss '" + name + "'");
        }
      }
    } else {
      set_losses(c, take<std::string>(j, "losses"));
    }
  }
  if (j.contains("pair_mode")) c.pair_mode = parse_pair_mode(take<std::string>(j, "pair_mode"));
  if (j.contains("connectivity")) c.connectivity = take<int>(j, "connectivity");
  if (j.contains("precision")) c.precision = parse_precision(take<std::string>(j, "precision"));
  if (j.contains("bg_tol")) c.bg_tol = take<double>(j, "bg_tol");
  if (j.contains("infeasibility_threshold")) {
    c.infeasibility_threshold = take<std::uint64_t>(j, "infeasibility_threshold");
  }
  if (j.contains("workers")) {
    if (j["workers"].is_null()) {
      c.workers.reset();
    } else {
      c.workers = take<std::size_t>(j, "workers");
    }
  }
  if (j.contains("early_exit")) c.early_exit = take<bool>(j, "early_exit");
  if (j.contains("ignore_value")) c.ignore_value = take<int>(j, "ignore_value");
  return c;
}

EngineConfig read_config(const std::string& path, EngineConfig base) {
  return config_from_json(read_json(path), std::move(base));
}

}  // namespace phyfea
