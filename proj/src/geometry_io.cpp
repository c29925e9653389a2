#include "hexvessel/geometry_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "hexvessel/error.hpp"

namespace hexvessel {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
  throw SchemaError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) fail(ptr + "/" + it.key(), "unknown property");
  }
}

const json& object_at(const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  return j;
}

const json& array_at(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array");
  return j;
}

const json& member(const json& obj, const char* key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ptr, std::string("missing required property '") + key + "'");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ptr, int lo, int hi) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  const auto v = j.get<long long>();
  if (v < lo || v > hi) fail(ptr, "integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

bool boolean(const json& j, const std::string& ptr) {
  if (!j.is_boolean()) fail(ptr, "expected a boolean");
  return j.get<bool>();
}

std::string string(const json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& ptr) {
  array_at(j, ptr);
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], ptr + "/" + std::to_string(i)));
  return out;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> point(const json& j, const std::string& ptr) {
  array_at(j, ptr);
  if (j.size() != Dim) fail(ptr, "expected " + std::to_string(Dim) + " coordinates");
  Eigen::Matrix<double, Dim, 1> p;
  for (int d = 0; d < Dim; ++d) p[d] = number(j[d], ptr + "/" + std::to_string(d));
  return p;
}

// Splines: degree plus optional knots; a missing knot vector means clamped uniform.
KnotVector knots_of(const json& obj, const std::string& ptr, int num_coefficients, const std::string& branch) {
  const int degree = integer(member(obj, "degree", ptr), ptr + "/degree", 1, 10);
  try {
    if (auto it = obj.find("knots"); it != obj.end()) return KnotVector(degree, numbers(*it, ptr + "/knots"));
    if (num_coefficients < degree + 1)
      throw SplineError("need at least degree+1 = " + std::to_string(degree + 1) + " coefficients");
    return KnotVector::clamped_uniform(degree, num_coefficients);
  } catch (const SplineError& e) {
    throw SplineError("branch '" + branch + "': " + e.what());
  }
}

BranchGeometry parse_branch(const json& j, const std::string& ptr) {
  object_at(j, ptr);
  allow_keys(j, ptr, {"id", "centerline", "profile"});
  BranchGeometry g;
  g.id = string(member(j, "id", ptr), ptr + "/id");
  if (g.id.empty()) fail(ptr + "/id", "empty branch id");

  const std::string cptr = ptr + "/centerline";
  const json& c = object_at(member(j, "centerline", ptr), cptr);
  allow_keys(c, cptr, {"degree", "knots", "control_points"});
  const json& cps = array_at(member(c, "control_points", cptr), cptr + "/control_points");
  std::vector<Vec3> points;
  for (std::size_t i = 0; i < cps.size(); ++i)
    points.push_back(point<3>(cps[i], cptr + "/control_points/" + std::to_string(i)));
  KnotVector kv = knots_of(c, cptr, static_cast<int>(points.size()), g.id);
  try {
    g.centerline = Curve3(std::move(kv), std::move(points));
  } catch (const SplineError& e) {
    throw SplineError("branch '" + g.id + "' centerline: " + e.what());
  }

  const std::string pptr = ptr + "/profile";
  const json& p = object_at(member(j, "profile", ptr), pptr);
  allow_keys(p, pptr, {"radius", "contours"});
  const bool has_r = p.contains("radius"), has_c = p.contains("contours");
  if (has_r == has_c) fail(pptr, "exactly one of 'radius' or 'contours' is required");
  if (has_r) {
    const std::string rptr = pptr + "/radius";
    const json& r = object_at(p["radius"], rptr);
    allow_keys(r, rptr, {"degree", "knots", "coefficients"});
    auto coeffs = numbers(member(r, "coefficients", rptr), rptr + "/coefficients");
    KnotVector rk = knots_of(r, rptr, static_cast<int>(coeffs.size()), g.id);
    try {
      g.radius = ScalarSpline(std::move(rk), std::move(coeffs));
    } catch (const SplineError& e) {
      throw SplineError("branch '" + g.id + "' radius: " + e.what());
    }
  } else {
    const std::string lptr = pptr + "/contours";
    const json& list = array_at(p["contours"], lptr);
    if (list.empty()) fail(lptr, "at least one contour is required");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string iptr = lptr + "/" + std::to_string(i);
      const json& cj = object_at(list[i], iptr);
      allow_keys(cj, iptr, {"t", "points"});
      Contour contour;
      contour.t = number(member(cj, "t", iptr), iptr + "/t");
      const json& pts = array_at(member(cj, "points", iptr), iptr + "/points");
      if (pts.size() < 3) fail(iptr + "/points", "a contour needs at least 3 points");
      for (std::size_t k = 0; k < pts.size(); ++k)
        contour.points.push_back(point<2>(pts[k], iptr + "/points/" + std::to_string(k)));
      if (!g.contours.empty() && contour.t <= g.contours.back().t) fail(iptr + "/t", "contour parameters must increase");
      g.contours.push_back(std::move(contour));
    }
  }
  return g;
}

BlendMode blend_mode(const json& j, const std::string& ptr) {
  const std::string s = string(j, ptr);
  if (s == "hermite") return BlendMode::Hermite;
  if (s == "linear") return BlendMode::Linear;
  fail(ptr, "expected 'hermite' or 'linear'");
}

const char* blend_name(BlendMode m) { return m == BlendMode::Hermite ? "hermite" : "linear"; }

JunctionSpec parse_junction(const json& j, const std::string& ptr) {
  object_at(j, ptr);
  allow_keys(j, ptr, {"id", "ends", "blend", "tangent_scale", "layers"});
  JunctionSpec s;
  s.id = string(member(j, "id", ptr), ptr + "/id");
  const json& ends = array_at(member(j, "ends", ptr), ptr + "/ends");
  if (ends.size() < 2) fail(ptr + "/ends", "a junction joins at least 2 branch ends");
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const std::string eptr = ptr + "/ends/" + std::to_string(i);
    object_at(ends[i], eptr);
    allow_keys(ends[i], eptr, {"branch", "end"});
    JunctionEnd e;
    e.branch = string(member(ends[i], "branch", eptr), eptr + "/branch");
    const std::string which = string(member(ends[i], "end", eptr), eptr + "/end");
    if (which != "head" && which != "tail") fail(eptr + "/end", "expected 'head' or 'tail'");
    e.head = which == "head";
    s.ends.push_back(e);
  }
  if (auto it = j.find("blend"); it != j.end()) s.mode = blend_mode(*it, ptr + "/blend");
  if (auto it = j.find("tangent_scale"); it != j.end()) {
    s.tangent_scale = number(*it, ptr + "/tangent_scale");
    if (!(*s.tangent_scale > 0)) fail(ptr + "/tangent_scale", "must be positive");
  }
  if (auto it = j.find("layers"); it != j.end()) s.layers = integer(*it, ptr + "/layers", 1, 10000);
  return s;
}

MeshOptions parse_options(const json& j, const std::string& ptr) {
  object_at(j, ptr);
  allow_keys(j, ptr,
             {"template", "cells_per_side", "sections", "spacing", "boundary_layer_alpha", "straighten", "blend",
              "tangent_scale", "diameter_rule", "source_tangent_scale", "kink_threshold"});
  MeshOptions o;
  if (auto it = j.find("template"); it != j.end()) {
    const std::string tptr = ptr + "/template";
    object_at(*it, tptr);
    allow_keys(*it, tptr, {"degree", "points_per_side", "radial_aspect", "core_half_width", "smooth"});
    const json& t = *it;
    if (t.contains("degree")) o.disc.degree = integer(t["degree"], tptr + "/degree", 2, 7);
    if (t.contains("points_per_side"))
      o.disc.points_per_side = integer(t["points_per_side"], tptr + "/points_per_side", 4, 64);
    if (t.contains("radial_aspect")) {
      o.disc.radial_aspect = number(t["radial_aspect"], tptr + "/radial_aspect");
      if (!(o.disc.radial_aspect > 0)) fail(tptr + "/radial_aspect", "must be positive");
    }
    if (t.contains("core_half_width")) {
      o.disc.core_half_width = number(t["core_half_width"], tptr + "/core_half_width");
      if (!(o.disc.core_half_width > 0 && o.disc.core_half_width < 1 / std::sqrt(2.0)))
        fail(tptr + "/core_half_width", "must lie in (0, 1/sqrt(2))");
    }
    if (t.contains("smooth")) o.disc.smooth = boolean(t["smooth"], tptr + "/smooth");
  }
  if (j.contains("cells_per_side")) {
    o.cells_per_side = integer(j["cells_per_side"], ptr + "/cells_per_side", 2, 512);
    if (o.cells_per_side % 2) fail(ptr + "/cells_per_side", "must be even");
  }
  if (j.contains("sections")) {
    o.sections = integer(j["sections"], ptr + "/sections", 0, 1000000);
    if (o.sections == 1) fail(ptr + "/sections", "must be 0 (automatic) or at least 2");
  }
  if (j.contains("spacing")) {
    const std::string s = string(j["spacing"], ptr + "/spacing");
    if (s != "uniform" && s != "arclength") fail(ptr + "/spacing", "expected 'uniform' or 'arclength'");
    o.arclength_spacing = s == "arclength";
  }
  if (j.contains("boundary_layer_alpha")) {
    o.boundary_layer_alpha = number(j["boundary_layer_alpha"], ptr + "/boundary_layer_alpha");
    if (!(o.boundary_layer_alpha >= 0 && o.boundary_layer_alpha < 1))
      fail(ptr + "/boundary_layer_alpha", "must lie in [0, 1)");
  }
  if (j.contains("straighten")) o.straighten = boolean(j["straighten"], ptr + "/straighten");
  if (j.contains("blend")) o.mode = blend_mode(j["blend"], ptr + "/blend");
  if (j.contains("tangent_scale")) {
    o.tangent_scale = number(j["tangent_scale"], ptr + "/tangent_scale");
    if (!(o.tangent_scale > 0)) fail(ptr + "/tangent_scale", "must be positive");
  }
  if (j.contains("diameter_rule")) o.diameter_rule = boolean(j["diameter_rule"], ptr + "/diameter_rule");
  if (j.contains("source_tangent_scale")) {
    o.source_tangent_scale = number(j["source_tangent_scale"], ptr + "/source_tangent_scale");
    if (!(o.source_tangent_scale > 0)) fail(ptr + "/source_tangent_scale", "must be positive");
  }
  if (j.contains("kink_threshold")) {
    o.kink_threshold = number(j["kink_threshold"], ptr + "/kink_threshold");
    if (!(o.kink_threshold > 0 && o.kink_threshold <= kPi)) fail(ptr + "/kink_threshold", "must lie in (0, pi]");
  }
  return o;
}

json spline_json(const KnotVector& kv) {
  json j;
  j["degree"] = kv.degree();
  j["knots"] = kv.knots();
  return j;
}

}  // namespace

GeometryInput parse_geometry(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  object_at(root, "");
  allow_keys(root, "", {"units", "branches", "junctions", "options"});
  if (auto it = root.find("units"); it != root.end() && string(*it, "/units") != "mm")
    fail("/units", "only 'mm' is supported");

  GeometryInput g;
  const json& branches = array_at(member(root, "branches", ""), "/branches");
  if (branches.empty()) fail("/branches", "at least one branch is required");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const std::string ptr = "/branches/" + std::to_string(i);
    g.branches.push_back(parse_branch(branches[i], ptr));
    if (!index.emplace(g.branches.back().id, i).second)
      fail(ptr + "/id", "duplicate branch id '" + g.branches.back().id + "'");
  }

  if (auto it = root.find("junctions"); it != root.end()) {
    array_at(*it, "/junctions");
    std::set<std::pair<std::string, bool>> used;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ptr = "/junctions/" + std::to_string(i);
      JunctionSpec s = parse_junction((*it)[i], ptr);
      if (!ids.insert(s.id).second) fail(ptr + "/id", "duplicate junction id '" + s.id + "'");
      for (std::size_t k = 0; k < s.ends.size(); ++k) {
        const std::string eptr = ptr + "/ends/" + std::to_string(k);
        if (!index.count(s.ends[k].branch)) fail(eptr + "/branch", "unknown branch id '" + s.ends[k].branch + "'");
        if (!used.emplace(s.ends[k].branch, s.ends[k].head).second)
          fail(eptr, "branch '" + s.ends[k].branch + "' " + (s.ends[k].head ? "head" : "tail") +
                         " is used by more than one junction end");
      }
      g.junctions.push_back(std::move(s));
    }
  }

  if (auto it = root.find("options"); it != root.end()) g.options = parse_options(*it, "/options");

  for (const auto& b : g.branches) b.validate();
  return g;
}

GeometryInput read_geometry(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot open geometry", path,
                                                   std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_geometry(ss.str());
}

std::string to_json_text(const GeometryInput& geometry) {
  json root;
  root["units"] = "mm";
  root["branches"] = json::array();
  for (const auto& b : geometry.branches) {
    json jb;
    jb["id"] = b.id;
    json c = spline_json(b.centerline.knot_vector());
    c["control_points"] = json::array();
    for (const auto& p : b.centerline.control_points()) c["control_points"].push_back({p.x(), p.y(), p.z()});
    jb["centerline"] = c;
    json profile;
    if (b.radius) {
      json r = spline_json(b.radius->knot_vector());
      r["coefficients"] = b.radius->coefficients();
      profile["radius"] = r;
    } else {
      profile["contours"] = json::array();
      for (const auto& contour : b.contours) {
        json jc;
        jc["t"] = contour.t;
        jc["points"] = json::array();
        for (const auto& p : contour.points) jc["points"].push_back({p.x(), p.y()});
        profile["contours"].push_back(jc);
      }
    }
    jb["profile"] = profile;
    root["branches"].push_back(jb);
  }
  root["junctions"] = json::array();
  for (const auto& s : geometry.junctions) {
    json js;
    js["id"] = s.id;
    js["ends"] = json::array();
    for (const auto& e : s.ends) js["ends"].push_back({{"branch", e.branch}, {"end", e.head ? "head" : "tail"}});
    if (s.mode) js["blend"] = blend_name(*s.mode);
    if (s.tangent_scale) js["tangent_scale"] = *s.tangent_scale;
    if (s.layers) js["layers"] = *s.layers;
    root["junctions"].push_back(js);
  }
  const MeshOptions& o = geometry.options;
  json opt;
  opt["template"] = {{"degree", o.disc.degree},
                     {"points_per_side", o.disc.points_per_side},
                     {"radial_aspect", o.disc.radial_aspect},
                     {"core_half_width", o.disc.core_half_width},
                     {"smooth", o.disc.smooth}};
  opt["cells_per_side"] = o.cells_per_side;
  opt["sections"] = o.sections;
  opt["spacing"] = o.arclength_spacing ? "arclength" : "uniform";
  opt["boundary_layer_alpha"] = o.boundary_layer_alpha;
  opt["straighten"] = o.straighten;
  opt["blend"] = blend_name(o.mode);
  opt["tangent_scale"] = o.tangent_scale;
  if (o.diameter_rule) opt["diameter_rule"] = *o.diameter_rule;
  opt["source_tangent_scale"] = o.source_tangent_scale;
  opt["kink_threshold"] = o.kink_threshold;
  root["options"] = opt;
  return root.dump(2) + "\n";
}

void write_geometry(const GeometryInput& geometry, const std::filesystem::path& path) {
  const std::string text = to_json_text(geometry);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::filesystem::filesystem_error("cannot open for writing", path,
                                                    std::make_error_code(std::errc::io_error));
  out << text;
  if (!out) throw std::filesystem::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
}

}  // namespace hexvessel
