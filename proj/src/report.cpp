#include "hardy/report.hpp"

#include "hardy/errors.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hardy {

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_rec(const Json& j, int indent, int level, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, level + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) {
          out += ",";
          out += nl;
        }
        out += pad;
        dump_rec(j[i], indent, level + 1, out);
      }
      out += nl + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    os << text;
    os.flush();
    if (!os) throw Error(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorKind::io, "rename to " + path + " failed: " + ec.message());
}

Json to_json(const MeshParams& m) {
  Json j;
  j["h"] = m.h;
  j["boundary_factor"] = m.boundary_factor;
  j["layers"] = m.layers;
  j["layer_ratio"] = m.layer_ratio;
  j["layer_depth"] = m.layer_depth;
  j["grading"] = m.grading;
  j["quality_angle"] = m.quality_angle;
  j["jitter"] = m.jitter;
  j["seed"] = m.seed;
  return j;
}

Json to_json(const HardyResult& r) {
  Json j;
  j["p"] = number(r.p);
  j["H"] = number(r.H);
  j["alpha"] = number(r.alpha);
  j["K"] = number(r.K);
  j["iterations"] = r.iterations;
  j["residual"] = number(r.residual);
  j["existence_flag"] = r.existence_flag;
  j["margin"] = number(r.margin);
  j["H_coarse"] = number(r.H_coarse);
  j["mesh"] = Json{{"h", number(r.h)}, {"n_vertices", r.n_vertices}};
  return j;
}

Json to_json(const DerivativeReport& r) {
  Json j;
  j["formula_value"] = number(r.formula_value);
  j["fd_value"] = number(r.fd_value);
  j["fd_step"] = number(r.fd_step);
  j["relative_gap"] = number(r.relative_gap);
  j["t0"] = number(r.t0);
  j["applicability"] = r.applicability;
  j["ridge_weight"] = number(r.ridge_weight);
  j["H"] = number(r.H);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const StabilityTable& t) {
  Json j;
  j["applicability"] = t.applicability;
  j["H_base"] = number(t.H_base);
  j["translation_baseline"] = number(t.translation_baseline);
  j["remesh_baseline"] = number(t.remesh_baseline);
  j["noise_floor"] = number(t.noise_floor);
  Json rows = Json::array();
  for (const auto& r : t.rows)
    rows.push_back(Json{{"t", number(r.t)},
                        {"pullback_gap", number(r.pullback_gap)},
                        {"extension_gap", number(r.extension_gap)},
                        {"H", number(r.H)},
                        {"existence_flag", r.existence_flag}});
  j["rows"] = rows;
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json to_json(const StabilityReport& r) {
  Json j;
  j["check_name"] = r.check;
  j["p"] = number(r.p);
  j["r_or_s"] = number(r.exponent);
  j["n_rows"] = r.rows.size();
  j["fitted_slope"] = number(r.fitted_slope);
  j["C_emp_band"] = Json{{"min", number(r.C_min)}, {"max", number(r.C_max)}, {"ratio", number(r.band)}};
  j["noise_floor"] = number(r.noise_floor);
  j["alpha"] = number(r.alpha);
  j["i_gamma"] = number(r.i_gamma);
  j["applicability"] = r.applicability;
  j["inconclusive"] = r.inconclusive;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const TOperatorReport& r) {
  Json j;
  j["delta"] = number(r.delta);
  j["max_ratio_coarse"] = number(r.max_coarse);
  j["max_ratio_fine"] = number(r.max_fine);
  Json a = Json::array(), b = Json::array();
  for (double v : r.ratios_coarse) a.push_back(number(v));
  for (double v : r.ratios_fine) b.push_back(number(v));
  j["ratios_coarse"] = a;
  j["ratios_fine"] = b;
  j["ridge_weight"] = number(r.ridge_weight);
  j["pass"] = r.pass;
  return j;
}

std::string to_csv(const StabilityTable& t) {
  std::ostringstream os;
  os << "t,pullback_gap,extension_gap,H,existence_flag\n";
  for (const auto& r : t.rows)
    os << format_number(r.t) << "," << format_number(r.pullback_gap) << "," << format_number(r.extension_gap) << ","
       << format_number(r.H) << "," << (r.existence_flag ? 1 : 0) << "\n";
  return os.str();
}

std::string to_csv(const StabilityReport& r) {
  std::ostringstream os;
  os << "eps,distortion,delta_rp,sym_diff,profile_l1,H_base,H_pert,gap,ratio,above_floor\n";
  for (const auto& w : r.rows)
    os << format_number(w.eps) << "," << format_number(w.distortion) << "," << format_number(w.delta_rp) << ","
       << format_number(w.sym_diff) << "," << format_number(w.profile_l1) << "," << format_number(w.H_base) << ","
       << format_number(w.H_pert) << "," << format_number(w.gap) << "," << format_number(w.ratio) << ","
       << (w.above_floor ? 1 : 0) << "\n";
  return os.str();
}

std::string to_csv(const std::vector<FamilyRow>& rows) {
  std::ostringstream os;
  os << "t,H,min_det,n_vertices\n";
  for (const auto& r : rows)
    os << format_number(r.t) << "," << format_number(r.H) << "," << format_number(r.min_det) << "," << r.n_vertices
       << "\n";
  return os.str();
}

}  // namespace hardy
