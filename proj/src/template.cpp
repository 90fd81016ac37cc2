#include "sg/template.hpp"

#include <fstream>
#include <sstream>

#include "sg/error.hpp"

namespace sg {

using nlohmann::json;

namespace {

std::pair<int, int> int_range(const json& v) {
  if (v.is_number_integer()) return {v.get<int>(), v.get<int>()};
  return {v.at(0).get<int>(), v.at(1).get<int>()};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, "template: " + what);
}

}  // namespace

SceneTemplate parse_template(const json& doc, const Vocabulary& vocab) {
  SceneTemplate t;
  try {
    t.name = doc.at("name").get<std::string>();
    t.room = doc.at("room").get<std::string>();
    const json& grid = doc.at("grid");
    t.cell_size_m = grid.at("cell_size").get<double>();
    std::tie(t.min_rows, t.max_rows) = int_range(grid.at("rows"));
    std::tie(t.min_cols, t.max_cols) = int_range(grid.at("cols"));
    std::tie(t.min_count, t.max_count) = int_range(doc.at("count_range"));
    const std::string style = doc.value("key_style", "code");
    if (style == "code") {
      t.key_style = KeyStyle::Code;
    } else if (style == "identifier") {
      t.key_style = KeyStyle::Identifier;
    } else if (style == "mixed") {
      t.key_style = KeyStyle::Mixed;
    } else {
      throw Error(ErrorKind::InvalidArgument, "template: unknown key_style '" + style + "'", {},
                  {"code", "identifier", "mixed"});
    }
    for (const json& o : doc.at("objects")) {
      PoolEntry e;
      e.key = o.at("key").get<std::string>();
      e.weight = o.value("weight", 1.0);
      e.required = o.value("required", false);
      e.max = o.value("max", 1);
      for (const json& c : o.value("on_top", json::array())) {
        e.on_top.push_back({c.at("key").get<std::string>(), c.value("probability", 1.0)});
      }
      t.pool.push_back(std::move(e));
    }
    for (const json& r : doc.value("relations", json::array())) {
      RelationRule rule;
      rule.subject = r.at("subject").get<std::string>();
      rule.relation = parse_relation(r.at("relation").get<std::string>());
      rule.object = r.at("object").get<std::string>();
      if (r.contains("max_distance_cells")) {
        rule.max_distance_cells = r.at("max_distance_cells").get<double>();
      }
      t.relations.push_back(std::move(rule));
    }
    t.prompts = doc.at("prompts").get<std::vector<std::string>>();
    t.reasoning = doc.at("reasoning").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed template: ") + e.what());
  }

  require(t.cell_size_m > 0.0, "cell_size must be positive");
  require(t.min_rows >= 1 && t.min_rows <= t.max_rows, "bad rows range");
  require(t.min_cols >= 1 && t.min_cols <= t.max_cols, "bad cols range");
  require(t.min_count >= 1 && t.min_count <= t.max_count, "bad count_range");
  require(!t.pool.empty(), "object pool is empty");
  require(!t.prompts.empty(), "no prompt templates");
  for (const PoolEntry& e : t.pool) {
    vocab.lookup(std::string_view(e.key));
    require(e.weight >= 0.0 && e.max >= 1, "bad weight or max for '" + e.key + "'");
    for (const ChildSpec& c : e.on_top) {
      vocab.lookup(std::string_view(c.key));
      require(c.probability >= 0.0 && c.probability <= 1.0, "bad probability for '" + c.key + "'");
    }
  }
  return t;
}

SceneTemplate load_template(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read template " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, path.string() + ": " + e.what());
  }
  return parse_template(doc, vocab);
}

SceneTemplate find_template(const std::string& name_or_path, const std::filesystem::path& data_dir,
                            const Vocabulary& vocab) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return load_template(direct, vocab);
  const auto named = data_dir / "templates" / (name_or_path + ".json");
  if (std::filesystem::is_regular_file(named)) return load_template(named, vocab);
  throw Error(ErrorKind::Io, "no template '" + name_or_path + "' (looked for " + named.string() + ")");
}

std::string fill_placeholders(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i);
      if (close != std::string_view::npos) {
        const std::string_view name = text.substr(i + 1, close - i - 1);
        bool done = false;
        for (const auto& [key, value] : values) {
          if (key == name) {
            out += value;
            done = true;
            break;
          }
        }
        if (done) {
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

}  // namespace sg
