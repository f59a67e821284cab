#include "selex/trait_fn.hpp"

#include <algorithm>
#include <cmath>

#include "selex/errors.hpp"
#include "json.hpp"

namespace selex::model {

enum class Op {
  constant,
  coord,
  tri,
  par,
  ind,
  add,
  mul,
  scale,
  recip1p,
  min_c,
  max_c,
};

struct TraitFn::Node {
  Op op;
  double a = 0.0;  // interval left / constant / scale factor / cap / floor
  double b = 0.0;  // interval right
  int axis = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = TraitFn::Node;
using NodePtr = std::shared_ptr<const Node>;

double eval(const Node& n, const Point& p) {
  switch (n.op) {
    case Op::constant:
      return n.a;
    case Op::coord:
      if (n.axis >= p.dim()) throw DimensionError("trait fn: axis >= dim");
      return p[n.axis];
    case Op::tri: {
      if (n.axis >= p.dim()) throw DimensionError("trait fn: axis >= dim");
      const double u = p[n.axis];
      const double mid = 0.5 * (n.a + n.b);
      const double hw = 0.5 * (n.b - n.a);
      return std::max(0.0, 1.0 - std::abs(u - mid) / hw);
    }
    case Op::par: {
      if (n.axis >= p.dim()) throw DimensionError("trait fn: axis >= dim");
      const double u = p[n.axis];
      const double q = (n.a + n.b - 2.0 * u);
      const double d = (n.a - n.b);
      return std::max(1.0 - q * q / (d * d), 0.0);
    }
    case Op::ind: {
      if (n.axis >= p.dim()) throw DimensionError("trait fn: axis >= dim");
      const double u = p[n.axis];
      return (u >= n.a && u <= n.b) ? 1.0 : 0.0;
    }
    case Op::add: {
      double s = 0.0;
      for (const NodePtr& c : n.args) s += eval(*c, p);
      return s;
    }
    case Op::mul: {
      double s = 1.0;
      for (const NodePtr& c : n.args) s *= eval(*c, p);
      return s;
    }
    case Op::scale:
      return n.a * eval(*n.args[0], p);
    case Op::recip1p: {
      const double u = 1.0 + eval(*n.args[0], p);
      if (!(u > 0.0)) throw EvaluationError("trait fn: recip1p of value <= -1");
      return 1.0 / u;
    }
    case Op::min_c:
      return std::min(n.a, eval(*n.args[0], p));
    case Op::max_c:
      return std::max(n.a, eval(*n.args[0], p));
  }
  throw Error("trait fn: corrupt node");
}

NodePtr leaf(Op op, int axis, double a, double b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->axis = axis;
  n->a = a;
  n->b = b;
  return n;
}

NodePtr wrap(Op op, double a, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = a;
  n->args = std::move(args);
  return n;
}

void check_interval(double a, double b) {
  if (!(a < b)) throw ArgumentError("trait fn: interval needs a < b");
}

nlohmann::json node_to_json(const Node& n) {
  nlohmann::json j;
  switch (n.op) {
    case Op::constant:
      j["op"] = "const";
      j["value"] = n.a;
      break;
    case Op::coord:
      j["op"] = "coord";
      j["axis"] = n.axis;
      break;
    case Op::tri:
    case Op::par:
    case Op::ind:
      j["op"] = n.op == Op::tri ? "tri" : (n.op == Op::par ? "par" : "ind");
      j["axis"] = n.axis;
      j["a"] = n.a;
      j["b"] = n.b;
      break;
    case Op::add:
    case Op::mul: {
      j["op"] = n.op == Op::add ? "add" : "mul";
      nlohmann::json args = nlohmann::json::array();
      for (const NodePtr& c : n.args) args.push_back(node_to_json(*c));
      j["args"] = std::move(args);
      break;
    }
    case Op::scale:
      j["op"] = "scale";
      j["factor"] = n.a;
      j["arg"] = node_to_json(*n.args[0]);
      break;
    case Op::recip1p:
      j["op"] = "recip1p";
      j["arg"] = node_to_json(*n.args[0]);
      break;
    case Op::min_c:
      j["op"] = "min";
      j["cap"] = n.a;
      j["arg"] = node_to_json(*n.args[0]);
      break;
    case Op::max_c:
      j["op"] = "max";
      j["floor"] = n.a;
      j["arg"] = node_to_json(*n.args[0]);
      break;
  }
  return j;
}

NodePtr node_from_json(const nlohmann::json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "const") return leaf(Op::constant, 0, j.at("value"), 0.0);
  if (op == "coord") return leaf(Op::coord, j.at("axis"), 0.0, 0.0);
  if (op == "tri" || op == "par" || op == "ind") {
    const double a = j.at("a"), b = j.at("b");
    check_interval(a, b);
    const Op o = op == "tri" ? Op::tri : (op == "par" ? Op::par : Op::ind);
    return leaf(o, j.at("axis"), a, b);
  }
  if (op == "add" || op == "mul") {
    std::vector<NodePtr> args;
    for (const auto& c : j.at("args")) args.push_back(node_from_json(c));
    if (args.empty()) throw ArgumentError("trait fn: empty add/mul");
    return wrap(op == "add" ? Op::add : Op::mul, 0.0, std::move(args));
  }
  if (op == "scale")
    return wrap(Op::scale, j.at("factor"), {node_from_json(j.at("arg"))});
  if (op == "recip1p")
    return wrap(Op::recip1p, 0.0, {node_from_json(j.at("arg"))});
  if (op == "min")
    return wrap(Op::min_c, j.at("cap"), {node_from_json(j.at("arg"))});
  if (op == "max")
    return wrap(Op::max_c, j.at("floor"), {node_from_json(j.at("arg"))});
  throw ArgumentError("trait fn: unknown op '" + op + "'");
}

std::vector<NodePtr> roots(std::vector<TraitFn> fs) {
  std::vector<NodePtr> out;
  out.reserve(fs.size());
  for (TraitFn& f : fs)
    out.push_back(std::make_shared<Node>(f.root()));
  return out;
}

}  // namespace

double TraitFn::operator()(const Point& p) const { return eval(*root_, p); }

TraitFn TraitFn::constant(double c) {
  return TraitFn(leaf(Op::constant, 0, c, 0.0));
}

TraitFn TraitFn::coord(int axis) {
  if (axis < 0 || axis > 1) throw ArgumentError("trait fn: axis must be 0/1");
  return TraitFn(leaf(Op::coord, axis, 0.0, 0.0));
}

TraitFn TraitFn::tri(int axis, double a, double b) {
  check_interval(a, b);
  return TraitFn(leaf(Op::tri, axis, a, b));
}

TraitFn TraitFn::par(int axis, double a, double b) {
  check_interval(a, b);
  return TraitFn(leaf(Op::par, axis, a, b));
}

TraitFn TraitFn::indicator(int axis, double a, double b) {
  check_interval(a, b);
  return TraitFn(leaf(Op::ind, axis, a, b));
}

TraitFn TraitFn::add(std::vector<TraitFn> terms) {
  if (terms.empty()) throw ArgumentError("trait fn: empty sum");
  return TraitFn(wrap(Op::add, 0.0, roots(std::move(terms))));
}

TraitFn TraitFn::mul(std::vector<TraitFn> factors) {
  if (factors.empty()) throw ArgumentError("trait fn: empty product");
  return TraitFn(wrap(Op::mul, 0.0, roots(std::move(factors))));
}

TraitFn TraitFn::scale(double factor, TraitFn f) {
  return TraitFn(wrap(Op::scale, factor, roots({std::move(f)})));
}

TraitFn TraitFn::recip1p(TraitFn f) {
  return TraitFn(wrap(Op::recip1p, 0.0, roots({std::move(f)})));
}

TraitFn TraitFn::min_with(double cap, TraitFn f) {
  return TraitFn(wrap(Op::min_c, cap, roots({std::move(f)})));
}

TraitFn TraitFn::max_with(double floor, TraitFn f) {
  return TraitFn(wrap(Op::max_c, floor, roots({std::move(f)})));
}

std::string TraitFn::to_json() const { return node_to_json(*root_).dump(); }

TraitFn TraitFn::from_json(const std::string& text) {
  return TraitFn(node_from_json(nlohmann::json::parse(text)));
}

}  // namespace selex::model
