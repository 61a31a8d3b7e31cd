#include "mebns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mebns/error.hpp"

namespace mebns {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::int64_t to_int(const std::string& v, const std::string& key) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error::config(key + ": expected integer, got '" + v + "'");
  return out;
}

std::uint64_t to_uint(const std::string& v, const std::string& key) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error::config(key + ": expected unsigned integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw Error::config(key + ": expected number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw Error::config(key + ": expected boolean, got '" + v + "'");
}

std::vector<std::int64_t> to_int_list(const std::string& v,
                                      const std::string& key) {
  std::vector<std::int64_t> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(to_int(trim(item), key));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data.edges", [](RunConfig& c, const std::string& v) { c.edges = v; }},
      {"data.features",
       [](RunConfig& c, const std::string& v) { c.features = v; }},
      {"data.num_nodes",
       [](RunConfig& c, const std::string& v) {
         c.num_nodes = to_int(v, "data.num_nodes");
       }},
      {"data.onehot_dim",
       [](RunConfig& c, const std::string& v) {
         c.onehot_dim = to_int(v, "data.onehot_dim");
       }},
      {"model.hidden",
       [](RunConfig& c, const std::string& v) {
         c.hidden = to_int(v, "model.hidden");
       }},
      {"model.embed",
       [](RunConfig& c, const std::string& v) {
         c.embed = to_int(v, "model.embed");
       }},
      {"sampler.kind",
       [](RunConfig& c, const std::string& v) { c.kind = v; }},
      {"sampler.delta",
       [](RunConfig& c, const std::string& v) {
         c.delta = to_double(v, "sampler.delta");
       }},
      {"sampler.teacher_delta",
       [](RunConfig& c, const std::string& v) {
         c.teacher_delta = to_double(v, "sampler.teacher_delta");
       }},
      {"sampler.student_delta",
       [](RunConfig& c, const std::string& v) {
         c.student_delta = to_double(v, "sampler.student_delta");
       }},
      {"sampler.khops",
       [](RunConfig& c, const std::string& v) {
         c.khops = static_cast<int>(to_int(v, "sampler.khops"));
       }},
      {"sampler.dns_pool",
       [](RunConfig& c, const std::string& v) {
         c.dns_pool = static_cast<int>(to_int(v, "sampler.dns_pool"));
       }},
      {"sampler.pns_exponent",
       [](RunConfig& c, const std::string& v) {
         c.pns_exponent = to_double(v, "sampler.pns_exponent");
       }},
      {"teacher.epochs",
       [](RunConfig& c, const std::string& v) {
         c.teacher_epochs = to_int(v, "teacher.epochs");
       }},
      {"teacher.lr",
       [](RunConfig& c, const std::string& v) {
         c.teacher_lr = to_double(v, "teacher.lr");
       }},
      {"student.max_epochs",
       [](RunConfig& c, const std::string& v) {
         c.max_student_epochs = to_int(v, "student.max_epochs");
       }},
      {"student.min_epochs",
       [](RunConfig& c, const std::string& v) {
         c.min_student_epochs = to_int(v, "student.min_epochs");
       }},
      {"student.patience",
       [](RunConfig& c, const std::string& v) {
         c.patience = to_int(v, "student.patience");
       }},
      {"student.outer_lr",
       [](RunConfig& c, const std::string& v) {
         c.outer_lr = to_double(v, "student.outer_lr");
       }},
      {"student.inner_lr",
       [](RunConfig& c, const std::string& v) {
         c.inner_lr = to_double(v, "student.inner_lr");
       }},
      {"student.meta_lr",
       [](RunConfig& c, const std::string& v) {
         c.meta_lr = to_double(v, "student.meta_lr");
       }},
      {"filter.beta",
       [](RunConfig& c, const std::string& v) {
         c.beta = to_double(v, "filter.beta");
       }},
      {"filter.scope",
       [](RunConfig& c, const std::string& v) { c.filter_scope = v; }},
      {"meta.tau",
       [](RunConfig& c, const std::string& v) {
         c.tau = to_double(v, "meta.tau");
       }},
      {"meta.draws",
       [](RunConfig& c, const std::string& v) {
         c.meta_draws = static_cast<int>(to_int(v, "meta.draws"));
       }},
      {"meta.freeze",
       [](RunConfig& c, const std::string& v) {
         c.meta_freeze = to_bool(v, "meta.freeze");
       }},
      {"meta.hidden",
       [](RunConfig& c, const std::string& v) {
         c.meta_hidden = to_int(v, "meta.hidden");
       }},
      {"eval.pool_min",
       [](RunConfig& c, const std::string& v) {
         c.eval_pool_min = to_int(v, "eval.pool_min");
       }},
      {"log.score_epochs",
       [](RunConfig& c, const std::string& v) {
         c.score_epochs = to_int_list(v, "log.score_epochs");
       }},
      {"run.seed",
       [](RunConfig& c, const std::string& v) {
         c.seed = to_uint(v, "run.seed");
       }},
  };
  return table;
}

}  // namespace

void apply_config_override(RunConfig& cfg, const std::string& key,
                           const std::string& value) {
  auto it = setters().find(key);
  if (it == setters().end())
    throw Error::config("unknown config key: '" + key + "'");
  it->second(cfg, value);
}

RunConfig parse_config_text(const std::string& text,
                            const std::string& origin) {
  RunConfig cfg;
  std::stringstream in(text);
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error::config(origin + ":" + std::to_string(lineno) +
                          ": expected key=value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    try {
      apply_config_override(cfg, key, value);
    } catch (const Error& e) {
      throw Error::config(origin + ":" + std::to_string(lineno) + ": " +
                          e.what());
    }
  }
  validate_config(cfg);
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error::io("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void validate_config(const RunConfig& cfg) {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };

  if (!(cfg.beta > 0.0 && cfg.beta <= 1.0))
    throw Error::config("beta must be in (0,1]");
  if (!in01(cfg.delta))
    throw Error::config("sampler.delta must be in [0,1]");
  if (cfg.teacher_delta >= 0.0 && !in01(cfg.teacher_delta))
    throw Error::config("sampler.teacher_delta must be in [0,1] (or -1 to inherit)");
  if (cfg.teacher_delta < 0.0 && cfg.teacher_delta != -1.0)
    throw Error::config("sampler.teacher_delta must be in [0,1] (or -1 to inherit)");
  if (cfg.student_delta >= 0.0 && !in01(cfg.student_delta))
    throw Error::config("sampler.student_delta must be in [0,1] (or -1 to inherit)");
  if (cfg.student_delta < 0.0 && cfg.student_delta != -1.0)
    throw Error::config("sampler.student_delta must be in [0,1] (or -1 to inherit)");
  if (!(cfg.tau > 0.0)) throw Error::config("meta.tau must be > 0");
  if (cfg.meta_draws < 2) throw Error::config("meta.draws must be >= 2");
  if (cfg.meta_hidden < 1) throw Error::config("meta.hidden must be >= 1");
  if (cfg.khops < 2) throw Error::config("sampler.khops must be >= 2");
  if (cfg.dns_pool < 1) throw Error::config("sampler.dns_pool must be >= 1");
  if (!(cfg.pns_exponent >= 0.0) || !std::isfinite(cfg.pns_exponent))
    throw Error::config("sampler.pns_exponent must be >= 0");
  if (cfg.kind != "uniform" && cfg.kind != "pns" && cfg.kind != "dns")
    throw Error::config("sampler.kind must be one of uniform, pns, dns");
  if (cfg.filter_scope != "all" && cfg.filter_scope != "negatives_only")
    throw Error::config("filter.scope must be all or negatives_only");
  if (cfg.teacher_epochs < 0)
    throw Error::config("teacher.epochs must be >= 0");
  if (cfg.max_student_epochs < 1)
    throw Error::config("student.max_epochs must be >= 1");
  if (cfg.min_student_epochs < 0 ||
      cfg.min_student_epochs > cfg.max_student_epochs)
    throw Error::config(
        "student.min_epochs must be in [0, student.max_epochs]");
  if (cfg.patience < 1) throw Error::config("student.patience must be >= 1");
  for (double lr : {cfg.teacher_lr, cfg.outer_lr, cfg.inner_lr, cfg.meta_lr})
    if (!(lr > 0.0) || !std::isfinite(lr))
      throw Error::config("learning rates must be > 0");
  if (cfg.hidden < 1 || cfg.embed < 1)
    throw Error::config("model.hidden and model.embed must be >= 1");
  if (cfg.eval_pool_min < 31)
    throw Error::config(
        "eval.pool_min must be >= 31 (hits@30 needs a pool larger than 30)");
  if (cfg.num_nodes < -1)
    throw Error::config("data.num_nodes must be >= 0, or -1 to infer");
  if (cfg.onehot_dim < 0)
    throw Error::config("data.onehot_dim must be >= 0");
  for (std::int64_t e : cfg.score_epochs)
    if (e < 0) throw Error::config("log.score_epochs entries must be >= 0");
}

std::string config_to_text(const RunConfig& c) {
  std::ostringstream out;
  auto num = [](double d) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, p);
  };
  out << "data.edges = " << c.edges << "\n";
  out << "data.features = " << c.features << "\n";
  out << "data.num_nodes = " << c.num_nodes << "\n";
  out << "data.onehot_dim = " << c.onehot_dim << "\n";
  out << "model.hidden = " << c.hidden << "\n";
  out << "model.embed = " << c.embed << "\n";
  out << "sampler.kind = " << c.kind << "\n";
  out << "sampler.delta = " << num(c.delta) << "\n";
  out << "sampler.teacher_delta = " << num(c.teacher_delta) << "\n";
  out << "sampler.student_delta = " << num(c.student_delta) << "\n";
  out << "sampler.khops = " << c.khops << "\n";
  out << "sampler.dns_pool = " << c.dns_pool << "\n";
  out << "sampler.pns_exponent = " << num(c.pns_exponent) << "\n";
  out << "teacher.epochs = " << c.teacher_epochs << "\n";
  out << "teacher.lr = " << num(c.teacher_lr) << "\n";
  out << "student.max_epochs = " << c.max_student_epochs << "\n";
  out << "student.min_epochs = " << c.min_student_epochs << "\n";
  out << "student.patience = " << c.patience << "\n";
  out << "student.outer_lr = " << num(c.outer_lr) << "\n";
  out << "student.inner_lr = " << num(c.inner_lr) << "\n";
  out << "student.meta_lr = " << num(c.meta_lr) << "\n";
  out << "filter.beta = " << num(c.beta) << "\n";
  out << "filter.scope = " << c.filter_scope << "\n";
  out << "meta.tau = " << num(c.tau) << "\n";
  out << "meta.draws = " << c.meta_draws << "\n";
  out << "meta.freeze = " << (c.meta_freeze ? "true" : "false") << "\n";
  out << "meta.hidden = " << c.meta_hidden << "\n";
  out << "eval.pool_min = " << c.eval_pool_min << "\n";
  out << "log.score_epochs = ";
  for (std::size_t i = 0; i < c.score_epochs.size(); ++i)
    out << (i ? "," : "") << c.score_epochs[i];
  out << "\n";
  out << "run.seed = " << c.seed << "\n";
  return out.str();
}

nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["data"] = {{"edges", c.edges},
               {"features", c.features},
               {"num_nodes", c.num_nodes},
               {"onehot_dim", c.onehot_dim}};
  j["model"] = {{"hidden", c.hidden}, {"embed", c.embed}};
  j["sampler"] = {{"kind", c.kind},
                  {"delta", c.delta},
                  {"teacher_delta", c.teacher_delta},
                  {"student_delta", c.student_delta},
                  {"khops", c.khops},
                  {"dns_pool", c.dns_pool},
                  {"pns_exponent", c.pns_exponent}};
  j["teacher"] = {{"epochs", c.teacher_epochs}, {"lr", c.teacher_lr}};
  j["student"] = {{"max_epochs", c.max_student_epochs},
                  {"min_epochs", c.min_student_epochs},
                  {"patience", c.patience},
                  {"outer_lr", c.outer_lr},
                  {"inner_lr", c.inner_lr},
                  {"meta_lr", c.meta_lr}};
  j["filter"] = {{"beta", c.beta}, {"scope", c.filter_scope}};
  j["meta"] = {{"tau", c.tau},
               {"draws", c.meta_draws},
               {"freeze", c.meta_freeze},
               {"hidden", c.meta_hidden}};
  j["eval"] = {{"pool_min", c.eval_pool_min}};
  j["log"] = {{"score_epochs", c.score_epochs}};
  j["run"] = {{"seed", c.seed}};
  return j;
}

}  // namespace mebns
