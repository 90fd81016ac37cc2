#include "sg/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sg/error.hpp"
#include "sg/validator.hpp"

namespace sg {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<CheckKind, std::string_view>, 4> kKinds{{
    {CheckKind::Exist, "exist"},
    {CheckKind::AttributeSize, "attribute_size"},
    {CheckKind::SpatialRelation, "spatial_relation"},
    {CheckKind::HierarchySupport, "hierarchy_support"},
}};

double param(const AtomicCheck& c, const std::string& key, double fallback) {
  const auto it = c.params.find(key);
  return it == c.params.end() ? fallback : it->second;
}

const std::string& need_object(const AtomicCheck& c) {
  if (!c.object) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(c.kind)) + " check on '" + c.subject + "' needs an object");
  }
  return *c.object;
}

bool size_ok(const AtomicCheck& c, const Vec3& s) {
  const double inf = std::numeric_limits<double>::infinity();
  return s.x >= param(c, "min_length", -inf) && s.x <= param(c, "max_length", inf) &&
         s.y >= param(c, "min_width", -inf) && s.y <= param(c, "max_width", inf) &&
         s.z >= param(c, "min_height", -inf) && s.z <= param(c, "max_height", inf);
}

}  // namespace

std::string_view to_string(CheckKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "?";
}

bool evaluate_check(const CompiledScene& scene, const AtomicCheck& c) {
  const auto& ps = scene.placements;
  switch (c.kind) {
    case CheckKind::Exist: {
      const auto n = std::count_if(ps.begin(), ps.end(),
                                   [&](const Placement& p) { return matches(p, c.subject); });
      return static_cast<double>(n) >= param(c, "min_count", 1.0);
    }
    case CheckKind::AttributeSize:
      return std::any_of(ps.begin(), ps.end(), [&](const Placement& p) {
        return matches(p, c.subject) && (!c.category || p.category == *c.category) &&
               size_ok(c, p.box.size);
      });
    case CheckKind::SpatialRelation: {
      if (!c.relation) {
        throw Error(ErrorKind::UnknownRelation,
                    "spatial_relation check on '" + c.subject + "' names no relation");
      }
      RelationRule rule{c.subject, *c.relation, need_object(c), std::nullopt};
      if (c.params.count("max_distance_cells") != 0) {
        rule.max_distance_cells = c.params.at("max_distance_cells");
      }
      return rule_holds(scene, rule);
    }
    case CheckKind::HierarchySupport: {
      const std::string& support = need_object(c);
      const double tol = param(c, "tol", kDefaultTol);
      return std::any_of(ps.begin(), ps.end(), [&](const Placement& p) {
        if (!matches(p, c.subject) || !p.parent) return false;
        const Placement* parent = scene.find(*p.parent);
        if (parent == nullptr || !matches(*parent, support)) return false;
        if (p.source.face == Face::Top) return std::abs(p.box.bottom() - parent->box.top()) <= tol;
        if (p.source.face == Face::Bottom) {
          return std::abs(parent->box.bottom() - p.box.top()) <= tol;
        }
        return true;
      });
    }
  }
  return false;
}

DrfrResult evaluate_drfr(const CompiledScene& scene, const Checklist& checklist) {
  if (checklist.checks.empty()) {
    throw Error(ErrorKind::InvalidArgument, "checklist has no checks");
  }
  DrfrResult r;
  r.total = static_cast<int>(checklist.checks.size());
  for (const AtomicCheck& c : checklist.checks) {
    const bool ok = evaluate_check(scene, c);
    r.per_check.push_back(ok);
    r.satisfied += ok ? 1 : 0;
  }
  r.ratio = static_cast<double>(r.satisfied) / static_cast<double>(r.total);
  return r;
}

std::vector<Checklist> accumulate_checklists(const std::vector<Checklist>& checklists) {
  std::vector<Checklist> out;
  std::vector<AtomicCheck> active;
  for (const Checklist& turn : checklists) {
    for (const std::string& id : turn.drop) {
      std::erase_if(active, [&](const AtomicCheck& c) { return c.id == id; });
    }
    for (const AtomicCheck& c : turn.checks) {
      const auto same = c.id ? std::find_if(active.begin(), active.end(),
                                            [&](const AtomicCheck& a) { return a.id == c.id; })
                             : active.end();
      if (same != active.end()) {
        *same = c;
      } else {
        active.push_back(c);
      }
    }
    Checklist acc;
    acc.checks = active;
    acc.turn_id = turn.turn_id;
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<DrfrResult> evaluate_cumulative(const std::vector<CompiledScene>& scenes,
                                            const std::vector<Checklist>& checklists) {
  if (scenes.size() != checklists.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(scenes.size()) + " scenes but " +
                                               std::to_string(checklists.size()) + " checklists");
  }
  const auto turns = accumulate_checklists(checklists);
  std::vector<DrfrResult> out;
  for (std::size_t t = 0; t < scenes.size(); ++t) out.push_back(evaluate_drfr(scenes[t], turns[t]));
  return out;
}

Checklist checklist_from_json(const json& doc) {
  try {
    Checklist cl;
    if (doc.contains("turn_id")) cl.turn_id = doc.at("turn_id").get<int>();
    cl.drop = doc.value("drop", std::vector<std::string>{});
    for (const json& j : doc.at("checks")) {
      AtomicCheck c;
      const std::string kind = j.at("kind").get<std::string>();
      const auto it = std::find_if(kKinds.begin(), kKinds.end(),
                                   [&](const auto& k) { return k.second == kind; });
      if (it == kKinds.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown check kind '" + kind + "'", {},
                    {"exist", "attribute_size", "spatial_relation", "hierarchy_support"});
      }
      c.kind = it->first;
      if (j.contains("id")) c.id = j.at("id").get<std::string>();
      c.subject = j.at("subject").get<std::string>();
      if (j.contains("object")) c.object = j.at("object").get<std::string>();
      if (j.contains("relation")) c.relation = parse_relation(j.at("relation").get<std::string>());
      if (j.contains("category")) {
        c.category = parse_category(j.at("category").get<std::string>());
        if (!c.category) throw Error(ErrorKind::InvalidArgument, "unknown category in checklist");
      }
      c.params = j.value("params", std::map<std::string, double>{});
      if (c.kind == CheckKind::SpatialRelation && !c.relation) {
        throw Error(ErrorKind::UnknownRelation, "spatial_relation check without a relation");
      }
      if ((c.kind == CheckKind::SpatialRelation || c.kind == CheckKind::HierarchySupport) &&
          !c.object) {
        throw Error(ErrorKind::InvalidArgument, std::string(to_string(c.kind)) + " needs an object");
      }
      cl.checks.push_back(std::move(c));
    }
    return cl;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed checklist: ") + e.what());
  }
}

json checklist_to_json(const Checklist& cl) {
  json doc;
  doc["schema"] = "sg.checklist.v1";
  if (cl.turn_id) doc["turn_id"] = *cl.turn_id;
  if (!cl.drop.empty()) doc["drop"] = cl.drop;
  doc["checks"] = json::array();
  for (const AtomicCheck& c : cl.checks) {
    json j{{"kind", std::string(to_string(c.kind))}, {"subject", c.subject}};
    if (c.id) j["id"] = *c.id;
    if (c.object) j["object"] = *c.object;
    if (c.relation) j["relation"] = std::string(to_string(*c.relation));
    if (c.category) j["category"] = std::string(to_string(*c.category));
    if (!c.params.empty()) j["params"] = c.params;
    doc["checks"].push_back(std::move(j));
  }
  return doc;
}

std::vector<Checklist> parse_checklist_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed checklist: ") + e.what());
  }
  std::vector<Checklist> out;
  if (doc.is_object() && doc.contains("turns")) {
    for (const json& t : doc.at("turns")) out.push_back(checklist_from_json(t));
  } else {
    out.push_back(checklist_from_json(doc));
  }
  return out;
}

json drfr_to_json(const DrfrResult& r, const Checklist& cl) {
  json checks = json::array();
  for (std::size_t i = 0; i < cl.checks.size() && i < r.per_check.size(); ++i) {
    json c = checklist_to_json({{cl.checks[i]}, std::nullopt, {}}).at("checks").at(0);
    c["satisfied"] = static_cast<bool>(r.per_check[i]);
    checks.push_back(std::move(c));
  }
  json doc{{"ratio", r.ratio}, {"satisfied", r.satisfied}, {"total", r.total}, {"checks", checks}};
  if (cl.turn_id) doc["turn_id"] = *cl.turn_id;
  return doc;
}

}  // namespace sg
