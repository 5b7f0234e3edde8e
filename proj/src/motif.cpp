#include "motiq/motif.hpp"

#include <algorithm>
#include <variant>

#include <nlohmann/json.hpp>

namespace motiq {

using nlohmann::json;

std::string to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Qfree: return "qfree";
    case PrimitiveKind::Qconv: return "qconv";
    case PrimitiveKind::Qpool: return "qpool";
    case PrimitiveKind::Qdense: return "qdense";
  }
  return "?";
}

PrimitiveKind kind_from_string(const std::string& s) {
  if (s == "qfree") return PrimitiveKind::Qfree;
  if (s == "qconv") return PrimitiveKind::Qconv;
  if (s == "qpool") return PrimitiveKind::Qpool;
  if (s == "qdense") return PrimitiveKind::Qdense;
  throw ConfigError("unknown primitive kind: " + s);
}

const std::array<std::string, 6>& FilterSpec::families() {
  static const std::array<std::string, 6> f = {"even",  "inside",  "left",
                                               "odd",   "outside", "right"};
  return f;
}

bool FilterSpec::is_literal() const {
  return !value.empty() &&
         value.find_first_not_of("01") == std::string::npos;
}

std::string default_mapping(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Qconv:
    case PrimitiveKind::Qdense: return "u_ttn";
    case PrimitiveKind::Qpool: return "v_pool";
    default: return "";
  }
}

struct Motif::Node {
  std::variant<Primitive, std::vector<Motif>> data;
  int level = 1;
};

Motif Motif::make_primitive(PrimitiveKind kind, Hyperparams params) {
  if (params.mapping.empty()) params.mapping = default_mapping(kind);
  auto node = std::make_shared<Node>();
  node->data = Primitive{kind, std::move(params)};
  node->level = 1;
  return Motif(std::move(node));
}

Motif Motif::make_composite(std::vector<Motif> children) {
  if (children.empty()) throw ConfigError("composite motif needs at least one child");
  for (const auto& c : children)
    if (!c.valid()) throw ConfigError("composite motif child is empty");
  auto node = std::make_shared<Node>();
  int lvl = 0;
  for (const auto& c : children) lvl = std::max(lvl, c.level());
  node->level = lvl + 1;
  node->data = std::move(children);
  return Motif(std::move(node));
}

bool Motif::is_primitive() const {
  return node_ && std::holds_alternative<Primitive>(node_->data);
}

PrimitiveKind Motif::kind() const {
  return std::get<Primitive>(node_->data).kind;
}

const Hyperparams& Motif::params() const {
  return std::get<Primitive>(node_->data).params;
}

const std::vector<Motif>& Motif::children() const {
  return std::get<std::vector<Motif>>(node_->data);
}

int Motif::level() const { return node_ ? node_->level : 0; }

static void flatten_into(const Motif& m, PrimitiveSequence& out) {
  if (m.is_primitive()) {
    out.push_back({m.kind(), m.params()});
    return;
  }
  for (const auto& c : m.children()) flatten_into(c, out);
}

PrimitiveSequence Motif::flatten() const {
  PrimitiveSequence seq;
  if (node_) flatten_into(*this, seq);
  return seq;
}

bool Motif::operator==(const Motif& other) const {
  if (node_ == other.node_) return true;
  if (!node_ || !other.node_) return false;
  if (is_primitive() != other.is_primitive()) return false;
  if (is_primitive())
    return std::get<Primitive>(node_->data) ==
           std::get<Primitive>(other.node_->data);
  const auto& a = children();
  const auto& b = other.children();
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Motif append(const Motif& a, const Motif& b) {
  return Motif::make_composite({a, b});
}

Motif repeat(const Motif& m, int k) {
  if (k < 1) throw ConfigError("repeat count must be >= 1");
  return Motif::make_composite(std::vector<Motif>(k, m));
}

Motif qfree(int n) {
  if (n < 0) throw ConfigError("qfree count must be non-negative");
  Hyperparams h;
  h.free_count = n;
  return Motif::make_primitive(PrimitiveKind::Qfree, std::move(h));
}

Motif qfree(std::vector<int> labels) {
  Hyperparams h;
  h.free_count = static_cast<int>(labels.size());
  h.free_labels = std::move(labels);
  return Motif::make_primitive(PrimitiveKind::Qfree, std::move(h));
}

Motif qconv(int stride, int step, int offset) {
  Hyperparams h;
  h.stride = stride;
  h.step = step;
  h.offset = offset;
  return qconv(std::move(h));
}

Motif qconv(Hyperparams h) {
  if (h.stride < 0) throw ConfigError("convolution stride must be non-negative");
  if (h.step < 1) throw ConfigError("step must be positive");
  if (h.offset < 0) throw ConfigError("offset must be non-negative");
  if (h.qpu < 1) throw ConfigError("qpu arity must be positive");
  return Motif::make_primitive(PrimitiveKind::Qconv, std::move(h));
}

Motif qpool(int stride, FilterSpec filter) {
  Hyperparams h;
  h.stride = stride;
  h.filter = std::move(filter);
  return qpool(std::move(h));
}

Motif qpool(Hyperparams h) {
  if (h.stride < 0) throw ConfigError("pooling stride must be non-negative");
  const auto& fam = FilterSpec::families();
  if (!h.filter.is_literal() &&
      std::find(fam.begin(), fam.end(), h.filter.value) == fam.end())
    throw ConfigError("unknown pooling filter: " + h.filter.value);
  return Motif::make_primitive(PrimitiveKind::Qpool, std::move(h));
}

Motif qdense() { return qdense(Hyperparams{}); }

Motif qdense(Hyperparams h) {
  return Motif::make_primitive(PrimitiveKind::Qdense, std::move(h));
}

// --- JSON ------------------------------------------------------------

static json primitive_to_json(const Primitive& p) {
  json j;
  j["kind"] = to_string(p.kind);
  const Hyperparams& h = p.params;
  if (p.kind == PrimitiveKind::Qfree) {
    if (h.free_labels)
      j["labels"] = *h.free_labels;
    else
      j["n"] = h.free_count;
    return j;
  }
  if (p.kind != PrimitiveKind::Qdense) j["stride"] = h.stride;
  j["step"] = h.step;
  j["offset"] = h.offset;
  j["qpu"] = h.qpu;
  j["boundary"] = h.boundary == Boundary::Periodic ? "periodic" : "open";
  j["mapping"] = h.mapping;
  if (p.kind == PrimitiveKind::Qpool) j["filter"] = h.filter.value;
  if (h.edge_order) j["edge_order"] = *h.edge_order;
  return j;
}

json Motif::to_json() const {
  if (!node_) throw ConfigError("empty motif");
  if (is_primitive()) return primitive_to_json(std::get<Primitive>(node_->data));
  json arr = json::array();
  for (const auto& c : children()) arr.push_back(c.to_json());
  return json{{"seq", std::move(arr)}};
}

Motif Motif::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("motif json must be an object");
  if (j.contains("seq")) {
    std::vector<Motif> children;
    for (const auto& c : j.at("seq")) children.push_back(from_json(c));
    return make_composite(std::move(children));
  }
  PrimitiveKind kind = kind_from_string(j.at("kind").get<std::string>());
  Hyperparams h;
  if (kind == PrimitiveKind::Qfree) {
    if (j.contains("labels"))
      h.free_labels = j.at("labels").get<std::vector<int>>();
    else
      h.free_count = j.at("n").get<int>();
    if (h.free_labels) h.free_count = static_cast<int>(h.free_labels->size());
    return make_primitive(kind, std::move(h));
  }
  if (j.contains("stride")) h.stride = j.at("stride").get<int>();
  if (j.contains("step")) h.step = j.at("step").get<int>();
  if (j.contains("offset")) h.offset = j.at("offset").get<int>();
  if (j.contains("qpu")) h.qpu = j.at("qpu").get<int>();
  if (j.contains("boundary")) {
    const std::string b = j.at("boundary").get<std::string>();
    if (b == "periodic")
      h.boundary = Boundary::Periodic;
    else if (b == "open")
      h.boundary = Boundary::Open;
    else
      throw ConfigError("unknown boundary: " + b);
  }
  if (j.contains("mapping")) h.mapping = j.at("mapping").get<std::string>();
  if (j.contains("filter")) h.filter.value = j.at("filter").get<std::string>();
  if (j.contains("edge_order"))
    h.edge_order = j.at("edge_order").get<std::vector<int>>();
  switch (kind) {
    case PrimitiveKind::Qconv: return qconv(std::move(h));
    case PrimitiveKind::Qpool: return qpool(std::move(h));
    case PrimitiveKind::Qdense: return qdense(std::move(h));
    default: throw ConfigError("bad kind");
  }
}

}  // namespace motiq
