#include <cmath>
#include <string>

#include "schema_text.hpp"
#include "stlf/cli.hpp"
#include "stlf/error.hpp"
#include "stlf/io.hpp"

namespace stlf::cli {

using nlohmann::json;

namespace {

[[noreturn]] void reject(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::BadConfig, "config " + (where.empty() ? "/" : where) + ": " + why);
}

bool is_integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && std::floor(d) == d;
}

bool is_date(const std::string& s) {
  try {
    (void)data::parse_date(s);
    return s.size() == 10;
  } catch (const Error&) {
    return false;
  }
}

// Covers the keywords config/schema.json uses.
void check(const json& schema, const json& v, const std::string& where) {
  if (auto t = schema.find("type"); t != schema.end()) {
    const std::string type = *t;
    const bool ok = (type == "object" && v.is_object()) || (type == "array" && v.is_array()) ||
                    (type == "string" && v.is_string()) ||
                    (type == "number" && v.is_number()) ||
                    (type == "integer" && is_integral(v)) ||
                    (type == "boolean" && v.is_boolean());
    if (!ok) reject(where, "expected " + type);
  }
  if (auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == v;
    if (!found) reject(where, "must be one of " + e->dump());
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto m = schema.find("minimum"); m != schema.end() && d < m->get<double>())
      reject(where, "must be >= " + m->dump());
    if (auto m = schema.find("exclusiveMinimum"); m != schema.end() && d <= m->get<double>())
      reject(where, "must be > " + m->dump());
    if (auto m = schema.find("maximum"); m != schema.end() && d > m->get<double>())
      reject(where, "must be <= " + m->dump());
    if (auto m = schema.find("exclusiveMaximum"); m != schema.end() && d >= m->get<double>())
      reject(where, "must be < " + m->dump());
  }
  if (v.is_string()) {
    const std::string s = v;
    if (auto m = schema.find("minLength"); m != schema.end() && s.size() < m->get<std::size_t>())
      reject(where, "too short");
    if (auto f = schema.find("format"); f != schema.end() && *f == "date" && !is_date(s))
      reject(where, "expected a YYYY-MM-DD date");
  }
  if (v.is_array()) {
    if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<std::size_t>())
      reject(where, "needs at least " + m->dump() + " items");
    if (auto items = schema.find("items"); items != schema.end())
      for (std::size_t i = 0; i < v.size(); ++i) check(*items, v[i], where + "/" + std::to_string(i));
  }
  if (v.is_object()) {
    const json empty = json::object();
    const json& props = schema.contains("properties") ? schema["properties"] : empty;
    const bool closed = schema.value("additionalProperties", true) == false;
    for (const auto& [key, value] : v.items()) {
      if (props.contains(key))
        check(props[key], value, where + "/" + key);
      else if (closed)
        reject(where + "/" + key, "unknown key");
    }
  }
}

const json& schema_doc() {
  static const json doc = json::parse(config_schema());
  return doc;
}

std::size_t as_size(const json& v) {
  return v.is_number_integer() ? v.get<std::size_t>() : static_cast<std::size_t>(v.get<double>());
}

std::vector<std::size_t> as_sizes(const json& v) {
  std::vector<std::size_t> out;
  for (const auto& x : v) out.push_back(as_size(x));
  return out;
}

}  // namespace

std::string_view config_schema() { return kSchemaText; }

void validate_config_json(const json& doc) { check(schema_doc(), doc, ""); }

RunConfig config_from_json(const json& doc) {
  validate_config_json(doc);
  RunConfig c;
  if (doc.contains("data")) {
    const json& d = doc["data"];
    if (d.contains("path")) c.data_path = d["path"];
    if (d.contains("layout"))
      c.layout = d["layout"] == "aggregated" ? data::CsvLayout::aggregated
                                             : data::CsvLayout::per_household;
  }
  if (doc.contains("split")) {
    const json& s = doc["split"];
    if (s.contains("train_end")) c.split.train_end = data::parse_date(s["train_end"].get<std::string>());
    if (s.contains("valid_end")) c.split.valid_end = data::parse_date(s["valid_end"].get<std::string>());
  }
  if (doc.contains("model")) c.model = nn::parse_model_kind(doc["model"].get<std::string>());
  if (doc.contains("units")) c.units = as_size(doc["units"]);
  if (doc.contains("train")) {
    const json& t = doc["train"];
    c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
    c.train.beta1 = t.value("beta1", c.train.beta1);
    c.train.beta2 = t.value("beta2", c.train.beta2);
    c.train.epsilon = t.value("epsilon", c.train.epsilon);
    if (t.contains("batch_size")) c.train.batch_size = as_size(t["batch_size"]);
    if (t.contains("max_epochs")) c.train.max_epochs = as_size(t["max_epochs"]);
    if (t.contains("patience")) c.train.patience = as_size(t["patience"]);
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (g.contains("batch_sizes")) c.grid.batch_sizes = as_sizes(g["batch_sizes"]);
    if (g.contains("cell_counts")) c.grid.cell_counts = as_sizes(g["cell_counts"]);
  }
  if (doc.contains("synth")) {
    const json& s = doc["synth"];
    if (s.contains("days")) c.synth.days = as_size(s["days"]);
    c.synth.seasonal_amp = s.value("seasonal_amp", c.synth.seasonal_amp);
    c.synth.noise_sd = s.value("noise_sd", c.synth.noise_sd);
    c.synth.trend_slope = s.value("trend_slope", c.synth.trend_slope);
    c.synth.base = s.value("base", c.synth.base);
    if (s.contains("start"))
      c.synth.start = data::HourStamp::from_date(data::parse_date(s["start"].get<std::string>()));
  }
  if (doc.contains("out")) c.out = doc["out"];
  if (doc.contains("seed"))
    c.seed = doc["seed"].is_number_integer() ? doc["seed"].get<std::uint64_t>()
                                             : static_cast<std::uint64_t>(doc["seed"].get<double>());
  if (doc.contains("jobs")) c.jobs = as_size(doc["jobs"]);
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = io::read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadConfig, "config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["data"] = {{"path", c.data_path},
               {"layout", c.layout == data::CsvLayout::aggregated ? "aggregated" : "per_household"}};
  if (c.data_path.empty()) j["data"].erase("path");
  j["split"] = {{"train_end", data::format_date(c.split.train_end)},
                {"valid_end", data::format_date(c.split.valid_end)}};
  j["model"] = std::string(nn::model_kind_name(c.model));
  j["units"] = c.units;
  j["train"] = {{"learning_rate", c.train.learning_rate}, {"beta1", c.train.beta1},
                {"beta2", c.train.beta2},                 {"epsilon", c.train.epsilon},
                {"batch_size", c.train.batch_size},       {"max_epochs", c.train.max_epochs},
                {"patience", c.train.patience}};
  j["grid"] = {{"batch_sizes", c.grid.batch_sizes}, {"cell_counts", c.grid.cell_counts}};
  j["synth"] = {{"days", c.synth.days},
                {"seasonal_amp", c.synth.seasonal_amp},
                {"noise_sd", c.synth.noise_sd},
                {"trend_slope", c.synth.trend_slope},
                {"base", c.synth.base},
                {"start", data::format_date(c.synth.start.date())}};
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  return j;
}

}  // namespace stlf::cli
